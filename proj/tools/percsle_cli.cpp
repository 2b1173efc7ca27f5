// Command line front end: percsle <crossing|hitting|sle|arms|compare|goldens> [options]

#include "percsle/percsle.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using percsle::json;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    bool check = false;
    std::string out;
    std::string goldens;
};

/// Recomputes the entries of the golden table that follow from the formulas,
/// keeps the calibrated ones, and reports where each value comes from.
json regenerate_goldens(const json& old)
{
    using namespace percsle;
    json entries = old.value("entries", json::object());
    auto put = [&](const std::string& key, double value, const std::string& how) {
        entries[key]["value"] = value;
        entries[key]["origin"] = "computed";
        entries[key]["source"] = how;
    };
    const MarkedDomain rect = rect_with_corner_marks(2.0);
    const double eta = quad_cross_ratio(rect);
    put("rect2_eta", eta, "cross-ratio of the Schwarz-Christoffel prevertices of the 2x1 rectangle");
    put("rect2_crossing", cardy_phi(eta), "Cardy's formula at rect2_eta");
    const MarkedDomain square = rect_with_corner_marks(1.0);
    put("square_crossing", cardy_phi(quad_cross_ratio(square)), "Cardy's formula for the unit square");
    put("half_disc_cdf_at_half", HittingCdf(canonical_half_disc())(0.5),
        "hitting distribution of the symmetric half-disc at the arc midpoint");
    json out = old;
    out["entries"] = entries;
    return out;
}

int run_goldens(const Flags& f)
{
    using namespace percsle;
    const std::filesystem::path path = f.goldens.empty() ? Goldens::default_path() : std::filesystem::path(f.goldens);
    json old = json::object();
    if (std::filesystem::exists(path))
        old = Goldens::load(path).table();
    const json fresh = regenerate_goldens(old);
    bool same = true;
    for (const auto& [key, entry] : fresh.at("entries").items()) {
        const std::string origin = entry.value("origin", std::string("?"));
        std::printf("%-28s %-11s %.17g  (%s)\n", key.c_str(), origin.c_str(), entry.value("value", 0.0),
                    entry.value("source", std::string()).c_str());
        if (old.contains("entries") && old["entries"].contains(key)) {
            const double before = old["entries"][key].value("value", 0.0);
            const double now = entry.value("value", 0.0);
            if (std::abs(before - now) > 1e-12 * std::max(1.0, std::abs(now))) {
                std::printf("  changed: stored %.17g\n", before);
                same = false;
            }
        } else {
            std::printf("  new entry\n");
            same = false;
        }
    }
    if (!f.out.empty()) {
        std::filesystem::create_directories(f.out);
        std::ofstream(std::filesystem::path(f.out) / "goldens.json") << fresh.dump(2) << '\n';
    }
    return (f.check && !same) ? 3 : 0;
}

int run(const std::string& kind, const Flags& f)
{
    using namespace percsle;
    if (kind == "goldens")
        return run_goldens(f);
    if (f.config.empty())
        throw ConfigInvalid("--config is required");
    RunOptions opt;
    opt.seed = f.seed;
    opt.workers = std::max(1u, f.workers);
    opt.check = f.check;
    if (!f.out.empty())
        opt.outDir = f.out;
    if (!f.goldens.empty())
        opt.goldens = f.goldens;
    const RunOutcome o = run_experiment(load_config(f.config), opt, kind);
    std::cout << results_csv(o.result);
    if (f.check) {
        std::cerr << (o.result.passed ? "check passed" : "check FAILED") << '\n';
        return o.result.passed ? 0 : 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Percolation exploration, Cardy's formula and SLE(6) experiments"};
    app.require_subcommand(1);
    Flags flags;
    for (const char* name : {"crossing", "hitting", "sle", "arms", "compare", "goldens"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config, "experiment config (JSON)");
        sub->add_option("--seed", flags.seed, "root seed, overrides the config");
        sub->add_option("--workers", flags.workers, "worker threads");
        sub->add_flag("--check", flags.check, "exit with status 3 when an acceptance check fails");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--goldens", flags.goldens, "golden table (default: data/goldens.json)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string kind = app.get_subcommands().front()->get_name();
    try {
        return run(kind, flags);
    } catch (const percsle::ConfigInvalid& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    } catch (const percsle::InvalidDomain& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const percsle::DegenerateMarks& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const percsle::MeshTooCoarse& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const percsle::UnsupportedDomain& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
