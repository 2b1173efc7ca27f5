#pragma once

// Monte Carlo experiments: estimators, configuration, result files.

#include "percsle/arms.hpp"
#include "percsle/cardy.hpp"
#include "percsle/exploration.hpp"
#include "percsle/lattice.hpp"
#include "percsle/rng.hpp"
#include "percsle/sle.hpp"
#include "percsle/stats.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef PERCSLE_DATA_DIR
#define PERCSLE_DATA_DIR "data"
#endif

namespace percsle {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kResultsSchemaVersion = 1;

inline unsigned default_workers()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

/// Evaluates job(i) for i < n on `workers` threads. Each thread builds its own
/// job with `factory`, so jobs may keep scratch state. Results are stored by
/// index, which makes the output independent of scheduling.
template <class R>
std::vector<R> parallel_map(std::size_t n, unsigned workers, const std::function<std::function<R(std::size_t)>()>& factory)
{
    std::vector<R> out(n);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex errorMutex;
    const std::size_t chunk = std::max<std::size_t>(1, n / (64 * workers));
    auto body = [&] {
        try {
            auto job = factory();
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n)
                    break;
                const std::size_t end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i)
                    out[i] = job(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(errorMutex);
            if (!error)
                error = std::current_exception();
            next.store(n);
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    return out;
}

inline std::uint64_t sample_seed(std::uint64_t root, const std::string& experimentId, std::size_t i)
{
    return derive_seed(root, fnv1a64(experimentId), i);
}

// ---------------------------------------------------------------- domains

/// Lattice rhombus of side about 1 whose sides run along two lattice
/// directions, marked at BR, TR, TL, BL. Its hexagons are exactly
/// q, r in [0, L - 1] with L = round(1 / (sqrt 3 delta)).
inline MarkedDomain rhombus_domain(double delta)
{
    const int L = std::max(2, static_cast<int>(std::lround(1 / (std::sqrt(3.0) * delta))));
    const cplx e1 = hex_center({1, 0}, delta), e2 = hex_center({0, 1}, delta);
    const cplx v0 = -0.5 * (e1 + e2);
    const Shape s = Shape::polygon({v0, v0 + double(L) * e1, v0 + double(L) * (e1 + e2), v0 + double(L) * e2});
    return {s, {s.vertex_param(1), s.vertex_param(2), s.vertex_param(3), 0.0}};
}

/// Builds a marked domain from its JSON description. The rhombus depends on
/// the mesh, the other shapes do not.
inline MarkedDomain domain_from_json(const json& j, double delta)
{
    if (!j.is_object() || !j.contains("shape"))
        throw ConfigInvalid("domain needs a shape");
    const std::string shape = j.at("shape").get<std::string>();
    std::optional<std::vector<double>> marks;
    if (j.contains("marks"))
        marks = j.at("marks").get<std::vector<double>>();
    MarkedDomain md = [&]() -> MarkedDomain {
        if (shape == "rhombus")
            return rhombus_domain(delta);
        if (shape == "rect")
            return rect_with_corner_marks(j.value("aspect", 1.0));
        if (shape == "half_disc")
            return canonical_half_disc();
        if (shape == "disc")
            return {Shape::disc(0.0, 1.0), {}};
        if (shape == "equilateral_triangle")
            return {Shape::equilateral_triangle(0.0, 1.0), {}};
        if (shape == "polygon") {
            std::vector<cplx> v;
            for (const auto& p : j.at("vertices"))
                v.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            return {Shape::polygon(std::move(v)), {}};
        }
        throw ConfigInvalid("unknown shape '" + shape + "'");
    }();
    if (marks)
        md.marks = *marks;
    if (md.marks.empty())
        throw ConfigInvalid("shape '" + shape + "' needs explicit marks");
    md.validate();
    return md;
}

// ---------------------------------------------------------------- crossing

/// Detects a blue path between the hexagons along arc z1 z2 and those along
/// arc z3 z4 of a lattice domain with four marks.
class CrossingDetector {
public:
    explicit CrossingDetector(const LatticeDomain& d) : d_(&d)
    {
        if (d.marks().size() != 4)
            throw DegenerateMarks("crossing needs four marks");
        const auto& m = d.marks();
        const auto& g = d.grid();
        goal_ = HexGrid<std::uint8_t>(g.q0(), g.r0(), g.q1(), g.r1(), 0);
        for (std::size_t i : d.arc_steps(m[0], m[1]))
            sources_.push_back(d.walk()[i].left);
        for (std::size_t i : d.arc_steps(m[2], m[3]))
            goal_[d.walk()[i].left] = 1;
        seen_ = HexGrid<std::uint8_t>(g.q0(), g.r0(), g.q1(), g.r1(), 0);
    }

    template <class Color>
    bool blue_crossing(const Color& blue)
    {
        std::fill(seen_.raw().begin(), seen_.raw().end(), std::uint8_t{0});
        // 1 = visited, 2 = known yellow
        queue_.clear();
        for (Hex h : sources_) {
            if (seen_[h])
                continue;
            if (!blue(h)) {
                seen_[h] = 2;
                continue;
            }
            seen_[h] = 1;
            queue_.push_back(h);
        }
        while (!queue_.empty()) {
            const Hex h = queue_.back();
            queue_.pop_back();
            if (goal_[h])
                return true;
            for (Hex n : neighbors(h)) {
                if (!d_->is_interior(n) || seen_[n])
                    continue;
                if (!blue(n)) {
                    seen_[n] = 2;
                    continue;
                }
                seen_[n] = 1;
                queue_.push_back(n);
            }
        }
        return false;
    }

private:
    const LatticeDomain* d_;
    std::vector<Hex> sources_;
    HexGrid<std::uint8_t> goal_, seen_;
    std::vector<Hex> queue_;
};

inline EstimateRecord mc_crossing(const MarkedDomain& md, double delta, std::size_t n, std::uint64_t rootSeed,
                                  unsigned workers = 1, const std::string& experimentId = "crossing")
{
    if (n == 0)
        throw ConfigInvalid("mc_crossing needs n > 0");
    if (md.marks.size() != 4)
        throw DegenerateMarks("crossing needs four marks");
    const LatticeDomain d = build_delta_approximation(md, delta);
    const auto hits = parallel_map<std::uint8_t>(n, workers, [&]() -> std::function<std::uint8_t(std::size_t)> {
        auto det = std::make_shared<CrossingDetector>(d);
        return [&, det](std::size_t i) -> std::uint8_t {
            return det->blue_crossing(SeededColoring(sample_seed(rootSeed, experimentId, i))) ? 1 : 0;
        };
    });
    std::size_t k = 0;
    for (auto h : hits)
        k += h;
    return bernoulli_estimate(k, n, "mc_crossing/bfs");
}

// ---------------------------------------------------------------- hitting

/// Lattice setup for hitting experiments: marks a, c, d snapped, an endpoint b
/// inside the target arc, and arc positions measured on the continuum boundary.
struct HittingSetup {
    MarkedDomain md;
    LatticeDomain lattice;
    EVertex a, b, c, d;
    ArcTarget target;

    HittingSetup(const MarkedDomain& m, double delta) : md(m), lattice(build_delta_approximation(m, delta))
    {
        if (m.marks.size() != 3)
            throw DegenerateMarks("hitting needs marks a, c, d");
        a = lattice.marks()[0];
        c = lattice.marks()[1];
        d = lattice.marks()[2];
        // b: the e-vertex in the middle of the arc c d
        std::vector<EVertex> inside;
        const auto steps = lattice.arc_steps(c, d);
        std::unordered_set<std::size_t> onArc(steps.begin(), steps.end());
        for (const EVertex& e : lattice.e_vertices())
            if (onArc.count(e.step) && !(e.v == d.v))
                inside.push_back(e);
        if (inside.empty())
            throw MeshTooCoarse("target arc has no interior e-vertex");
        const std::size_t n = lattice.walk().size();
        std::sort(inside.begin(), inside.end(), [&](const EVertex& p, const EVertex& q) {
            return (p.step + n - c.step) % n < (q.step + n - c.step) % n;
        });
        b = inside[inside.size() / 2];
        const double delta0 = delta;
        target = make_arc_target(lattice, c, d, [this, delta0](Vertex v) {
            return arc_fraction(md.marks[1], md.marks[2], md.shape.boundary_param(vertex_position(v, delta0)));
        });
    }
};

/// Hit fractions of n explorations from a, stopped on the arc c d.
inline std::vector<double> percolation_hits(const HittingSetup& s, std::size_t n, std::uint64_t rootSeed,
                                            unsigned workers, const std::string& experimentId)
{
    return parallel_map<double>(n, workers, [&]() -> std::function<double(std::size_t)> {
        auto ex = std::make_shared<Explorer>(s.lattice, s.a, s.b);
        return [&, ex](std::size_t i) {
            return ex->run_until(SeededColoring(sample_seed(rootSeed, experimentId, i)), s.target).fraction;
        };
    });
}

struct HittingResult {
    std::vector<double> samples;
    KSResult ks;
    double cdfAtHalf = 0;
    double cdfAtHalfSE = 0;
};

inline HittingResult mc_hitting(const MarkedDomain& md, double delta, std::size_t n, std::uint64_t rootSeed,
                                unsigned workers = 1, double alpha = 0.01, double slack = 0,
                                const std::string& experimentId = "hitting")
{
    if (n == 0)
        throw ConfigInvalid("mc_hitting needs n > 0");
    const HittingSetup setup(md, delta);
    HittingResult r;
    r.samples = percolation_hits(setup, n, rootSeed, workers, experimentId);
    const HittingCdf F(md);
    r.ks = ks_one_sample(r.samples, [&](double s) { return F(s); }, alpha, slack);
    r.cdfAtHalf = empirical_cdf(r.samples, {0.5})[0];
    r.cdfAtHalfSE = std::sqrt(r.cdfAtHalf * (1 - r.cdfAtHalf) / double(n));
    return r;
}

inline std::vector<double> sle_hits(const MarkedDomain& md, std::size_t n, std::uint64_t rootSeed, unsigned workers,
                                    const SleHittingOptions& opt, const std::string& experimentId)
{
    return parallel_map<double>(n, workers, [&]() -> std::function<double(std::size_t)> {
        return [&](std::size_t i) { return sle_hitting_sample(md, sample_seed(rootSeed, experimentId, i), opt); };
    });
}

inline KSResult compare_hitting(const std::vector<double>& percSamples, const std::vector<double>& sleSamples,
                                double alpha = 0.01, double slack = 0)
{
    if (percSamples.empty() || sleSamples.empty())
        throw EmptySamples("compare_hitting needs two nonempty samples");
    return ks_two_sample(percSamples, sleSamples, alpha, slack);
}

// ---------------------------------------------------------------- SLE stopping times

struct StoppingRun {
    std::vector<double> tau;
    /// Recentred driving increments W(T_j) - W(T_{j-1}).
    std::vector<double> increments;
};

inline std::vector<StoppingRun> semiball_runs(double eps, std::size_t runs, std::size_t events, std::uint64_t rootSeed,
                                              unsigned workers, const std::string& experimentId, double dt = 0)
{
    if (dt <= 0)
        dt = semiball_dt(eps);
    return parallel_map<StoppingRun>(runs, workers, [&]() -> std::function<StoppingRun(std::size_t)> {
        return [&](std::size_t i) {
            LoewnerState s = LoewnerState::seeded(sample_seed(rootSeed, experimentId, i), dt);
            StoppingRun r;
            double prevW = 0;
            for (const HullSnapshot& h : semiball_stopping_times(s, eps, events)) {
                r.tau.push_back(h.tau);
                r.increments.push_back(h.driving - prevW);
                prevW = h.driving;
            }
            return r;
        };
    });
}

// ---------------------------------------------------------------- arms

/// Colors of a box, filled on first use from a seeded coloring.
class BoxColoring {
public:
    BoxColoring(int radius, std::uint64_t seed)
        : grid_(-2 * radius, -radius, 2 * radius, radius, 0), base_(seed)
    {
    }

    void reset(std::uint64_t seed)
    {
        base_ = SeededColoring(seed);
        std::fill(grid_.raw().begin(), grid_.raw().end(), std::int8_t{0});
    }

    bool operator()(Hex h) const
    {
        if (!grid_.in_box(h))
            return base_(h);
        std::int8_t& c = const_cast<std::int8_t&>(grid_[h]);
        if (c == 0)
            c = base_(h) ? 1 : 2;
        return c == 1;
    }

private:
    HexGrid<std::int8_t> grid_;
    SeededColoring base_;
};

struct ArmRow {
    double ratio = 0;
    double rInner = 0, rOuter = 0;
    EstimateRecord sixArm;
    EstimateRecord threeArm;
};

struct ArmScaling {
    std::vector<ArmRow> rows;
    std::optional<LineFit> sixArmFit;
    std::optional<LineFit> threeArmFit;
};

namespace detail {

inline std::optional<LineFit> log_fit(const std::vector<ArmRow>& rows, bool six)
{
    std::vector<double> x, y, s;
    for (const ArmRow& r : rows) {
        const EstimateRecord& e = six ? r.sixArm : r.threeArm;
        if (e.pointEstimate <= 0)
            continue;
        x.push_back(std::log(r.ratio));
        y.push_back(std::log(e.pointEstimate));
        s.push_back(e.stdError / e.pointEstimate);
    }
    if (x.size() < 2)
        return std::nullopt;
    return weighted_line_fit(x, y, s);
}

} // namespace detail

/// P(interior arms >= 6) and P(half-annulus arms >= 3) for annuli of inner
/// radius rInner around the origin. Each ratio uses its own colorings.
template <class ColorFactory>
ArmScaling arm_scaling_with(double rInner, const std::vector<double>& ratios, std::size_t n, unsigned workers,
                            const ColorFactory& colors)
{
    ArmScaling out;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        const double rOuter = rInner * ratios[k];
        const Annulus full({0, 0}, rInner, rOuter, AnnulusKind::full);
        const Annulus half({0, 0}, rInner, rOuter, AnnulusKind::half);
        const auto counts = parallel_map<std::uint8_t>(n, workers, [&]() -> std::function<std::uint8_t(std::size_t)> {
            return [&, k](std::size_t i) -> std::uint8_t {
                auto blue = colors(k, i, rOuter);
                const bool six = annulus_arm_count(blue, full).armCount >= 6;
                const bool three = annulus_arm_count(blue, half).armCount >= 3;
                return static_cast<std::uint8_t>((six ? 1 : 0) | (three ? 2 : 0));
            };
        });
        std::size_t six = 0, three = 0;
        for (auto c : counts) {
            six += c & 1;
            three += (c >> 1) & 1;
        }
        out.rows.push_back({ratios[k], rInner, rOuter, bernoulli_estimate(six, n, "arms/six"),
                            bernoulli_estimate(three, n, "arms/three-half")});
    }
    out.sixArmFit = detail::log_fit(out.rows, true);
    out.threeArmFit = detail::log_fit(out.rows, false);
    return out;
}

inline ArmScaling arm_scaling(double rInner, const std::vector<double>& ratios, std::size_t n, std::uint64_t rootSeed,
                              unsigned workers = 1, const std::string& experimentId = "arms")
{
    if (n == 0)
        throw ConfigInvalid("arm_scaling needs n > 0");
    for (double r : ratios)
        if (!(r >= 1))
            throw ConfigInvalid("annulus ratios must be at least 1");
    return arm_scaling_with(rInner, ratios, n, workers, [&](std::size_t k, std::size_t i, double rOuter) {
        const int box = static_cast<int>(std::ceil(1.2 * rOuter)) + 3;
        return BoxColoring(box, sample_seed(rootSeed, experimentId + "/ratio" + std::to_string(k), i));
    });
}

// ---------------------------------------------------------------- goldens

class Goldens {
public:
    Goldens() = default;
    explicit Goldens(json table) : table_(std::move(table)) {}

    static Goldens load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigInvalid("cannot open golden table " + path.string());
        return Goldens(json::parse(in));
    }

    static std::filesystem::path default_path() { return std::filesystem::path(PERCSLE_DATA_DIR) / "goldens.json"; }

    std::string version() const { return table_.value("version", std::string("none")); }

    double value(const std::string& key) const
    {
        const auto& entries = table_.at("entries");
        if (!entries.contains(key))
            throw ConfigInvalid("no golden value '" + key + "'");
        return entries.at(key).at("value").get<double>();
    }

    /// A number, or a string "golden:<key>" looked up in the table.
    double resolve(const json& v) const
    {
        if (v.is_number())
            return v.get<double>();
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s.rfind("golden:", 0) == 0)
                return value(s.substr(7));
        }
        throw ConfigInvalid("expected a number or golden:<key>, got " + v.dump());
    }

    const json& table() const { return table_; }

private:
    json table_ = json::object();
};

// ---------------------------------------------------------------- experiments

struct ResultRow {
    std::string quantity;
    double estimate = 0;
    std::optional<double> stdError;
    std::optional<std::size_t> nSamples;
    std::optional<double> ciLow, ciHigh;
    std::string method;
    /// "pass", "fail", or empty when unchecked.
    std::string decision;
};

struct ExperimentResult {
    std::string experiment;
    std::string id;
    std::vector<ResultRow> rows;
    std::vector<std::pair<std::string, std::vector<double>>> samples;
    json parameters;
    bool checked = false;
    bool passed = true;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    bool check = false;
    std::optional<std::filesystem::path> outDir;
    std::optional<std::filesystem::path> goldens;
    bool writeSamples = true;
};

namespace detail {

inline ResultRow estimate_row(const std::string& quantity, const EstimateRecord& e)
{
    return {quantity, e.pointEstimate, e.stdError, e.nSamples, e.ciLow, e.ciHigh, e.method, ""};
}

inline void add_check(ExperimentResult& r, ResultRow& row, bool ok)
{
    row.decision = ok ? "pass" : "fail";
    r.checked = true;
    r.passed = r.passed && ok;
}

inline void ks_rows(ExperimentResult& r, const std::string& prefix, const KSResult& ks, bool check)
{
    ResultRow d{prefix + ".D", ks.statistic, std::nullopt, static_cast<std::size_t>(std::llround(ks.nEff)),
                std::nullopt, std::nullopt, "ks", ""};
    if (check)
        add_check(r, d, ks.accept);
    r.rows.push_back(d);
    r.rows.push_back({prefix + ".critical", ks.critical, {}, {}, {}, {}, "ks", ""});
    r.rows.push_back({prefix + ".slack", ks.slack, {}, {}, {}, {}, "ks", ""});
    r.rows.push_back({prefix + ".p_value", ks.pValueBound, {}, {}, {}, {}, "ks", ""});
}

template <class T>
T require(const json& cfg, const char* key)
{
    if (!cfg.contains(key))
        throw ConfigInvalid(std::string("missing config key '") + key + "'");
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline void require_positive(double v, const char* what)
{
    if (!(v > 0))
        throw ConfigInvalid(std::string(what) + " must be positive");
}

} // namespace detail

inline ExperimentResult run_crossing(const json& cfg, std::uint64_t seed, const RunOptions& opt, const Goldens& g)
{
    ExperimentResult r;
    r.id = cfg.value("id", "crossing");
    const double delta = detail::require<double>(cfg, "delta");
    detail::require_positive(delta, "delta");
    const auto n = detail::require<std::size_t>(cfg, "nSamples");
    const MarkedDomain md = domain_from_json(cfg.at("domain"), delta);
    const EstimateRecord e = mc_crossing(md, delta, n, seed, opt.workers, r.id);
    ResultRow row = detail::estimate_row("crossing_probability", e);
    if (cfg.contains("check")) {
        const json& c = cfg.at("check");
        const double expected =
            c.contains("expected") ? g.resolve(c.at("expected")) : crossing_probability(md);
        const double allowance = c.contains("allowance") ? g.resolve(c.at("allowance")) : 0.0;
        r.rows.push_back({"expected", expected, {}, {}, {}, {}, "reference", ""});
        const double tol = std::max(3 * e.stdError, allowance);
        if (opt.check)
            detail::add_check(r, row, std::abs(e.pointEstimate - expected) <= tol);
        r.rows.push_back({"tolerance", tol, {}, {}, {}, {}, "max(3se,allowance)", ""});
    }
    r.rows.insert(r.rows.begin(), row);
    return r;
}

inline ExperimentResult run_hitting(const json& cfg, std::uint64_t seed, const RunOptions& opt, const Goldens& g)
{
    ExperimentResult r;
    r.id = cfg.value("id", "hitting");
    const double delta = detail::require<double>(cfg, "delta");
    detail::require_positive(delta, "delta");
    const auto n = detail::require<std::size_t>(cfg, "nSamples");
    const MarkedDomain md = domain_from_json(cfg.at("domain"), delta);
    const json c = cfg.value("check", json::object());
    const double alpha = c.value("alpha", 0.01);
    const double slack = c.contains("slack") ? g.resolve(c.at("slack")) : 0.0;
    const HittingResult h = mc_hitting(md, delta, n, seed, opt.workers, alpha, slack, r.id);
    detail::ks_rows(r, "ks_vs_cardy", h.ks, opt.check && cfg.contains("check"));
    ResultRow half{"cdf_at_half", h.cdfAtHalf, h.cdfAtHalfSE, n, h.cdfAtHalf - 1.96 * h.cdfAtHalfSE,
                   h.cdfAtHalf + 1.96 * h.cdfAtHalfSE, "empirical", ""};
    const double predicted = HittingCdf(md)(0.5);
    if (opt.check && c.value("checkHalf", false))
        detail::add_check(r, half, std::abs(h.cdfAtHalf - predicted) <= 3 * h.cdfAtHalfSE);
    r.rows.push_back(half);
    r.rows.push_back({"cdf_at_half.predicted", predicted, {}, {}, {}, {}, "cardy", ""});
    r.rows.push_back(detail::estimate_row("hit_mean", mean_estimate(h.samples, "empirical")));
    r.samples.push_back({"percolation", h.samples});
    return r;
}

namespace detail {

inline SleHittingOptions sle_options(const json& j)
{
    SleHittingOptions so;
    so.relStep = j.value("relStep", so.relStep);
    so.stopRatio = j.value("stopRatio", so.stopRatio);
    so.probeExponent = j.value("probeExponent", so.probeExponent);
    require_positive(so.relStep, "relStep");
    require_positive(so.stopRatio, "stopRatio");
    if (!(so.stopRatio < 1) || !(so.probeExponent > 0 && so.probeExponent < 1))
        throw ConfigInvalid("stopRatio must be below 1 and probeExponent in (0, 1)");
    return so;
}

} // namespace detail

inline ExperimentResult run_compare(const json& cfg, std::uint64_t seed, const RunOptions& opt, const Goldens& g)
{
    ExperimentResult r;
    r.id = cfg.value("id", "compare");
    const json& perc = cfg.at("percolation");
    const json& sle = cfg.at("sle");
    const double delta = detail::require<double>(perc, "delta");
    detail::require_positive(delta, "delta");
    const MarkedDomain md = domain_from_json(cfg.at("domain"), delta);
    const HittingSetup setup(md, delta);
    const auto percSamples =
        percolation_hits(setup, detail::require<std::size_t>(perc, "nSamples"), seed, opt.workers, r.id + "/perc");
    const SleHittingOptions so = detail::sle_options(sle);
    const auto sleSamples = sle_hits(md, detail::require<std::size_t>(sle, "nSamples"), seed, opt.workers, so,
                                     r.id + "/sle");
    const json c = cfg.value("check", json::object());
    const double slack = c.contains("slack") ? g.resolve(c.at("slack")) : 0.0;
    const KSResult ks = compare_hitting(percSamples, sleSamples, c.value("alpha", 0.01), slack);
    detail::ks_rows(r, "ks_perc_vs_sle", ks, opt.check && cfg.contains("check"));
    r.rows.push_back(detail::estimate_row("perc_mean", mean_estimate(percSamples, "empirical")));
    r.rows.push_back(detail::estimate_row("sle_mean", mean_estimate(sleSamples, "empirical")));
    r.samples.push_back({"percolation", percSamples});
    r.samples.push_back({"sle", sleSamples});
    return r;
}

inline ExperimentResult run_sle(const json& cfg, std::uint64_t seed, const RunOptions& opt, const Goldens& g)
{
    ExperimentResult r;
    r.id = cfg.value("id", "sle");
    const std::string mode = cfg.value("mode", "stopping");
    const bool check = opt.check && cfg.contains("check");
    const json c = cfg.value("check", json::object());
    const double alpha = c.value("alpha", 0.01);
    if (mode == "hitting") {
        const MarkedDomain md = domain_from_json(cfg.at("domain"), 0.01);
        const SleHittingOptions so = detail::sle_options(cfg);
        const auto samples = sle_hits(md, detail::require<std::size_t>(cfg, "nSamples"), seed, opt.workers, so, r.id);
        const HittingCdf F(md);
        const double slack = c.contains("slack") ? g.resolve(c.at("slack")) : 0.0;
        detail::ks_rows(r, "ks_vs_cardy", ks_one_sample(samples, [&](double s) { return F(s); }, alpha, slack),
                        check);
        r.rows.push_back(detail::estimate_row("hit_mean", mean_estimate(samples, "empirical")));
        r.samples.push_back({"sle", samples});
        return r;
    }
    if (mode != "stopping")
        throw ConfigInvalid("unknown sle mode '" + mode + "'");
    for (const json& block : detail::require<json>(cfg, "blocks")) {
        const double eps = detail::require<double>(block, "eps");
        detail::require_positive(eps, "eps");
        const auto runs = detail::require<std::size_t>(block, "runs");
        const auto events = block.value("events", std::size_t{1});
        const std::string tag = "eps=" + json(eps).dump();
        const double dt = block.value("dt", semiball_dt(eps));

        // driving W = 0: the slit reaches height eps at capacity eps^2 / 4
        LoewnerState flat(explicit_driving(dt, std::vector<double>(std::size_t(std::ceil(eps * eps / dt)) + 2, 0.0), 0.0));
        const double tauFlat = first_exit_semiball(flat, eps, 0).tau;
        ResultRow flatRow{tag + ".tau_flat_over_eps2", tauFlat / (eps * eps), {}, {}, {}, {}, "loewner/W=0", ""};
        if (check)
            detail::add_check(r, flatRow, std::abs(tauFlat - eps * eps / 4) <= 1e-12 * eps * eps);
        r.rows.push_back(flatRow);

        const auto data = semiball_runs(eps, runs, events, seed, opt.workers, r.id + "/" + tag, dt);
        std::vector<double> taus;
        std::vector<std::vector<double>> byJ(events);
        std::vector<double> lagX, lagY;
        for (const StoppingRun& run : data) {
            taus.insert(taus.end(), run.tau.begin(), run.tau.end());
            for (std::size_t j = 0; j < run.increments.size(); ++j) {
                byJ[j].push_back(run.increments[j]);
                if (j + 1 < run.increments.size()) {
                    lagX.push_back(run.increments[j]);
                    lagY.push_back(run.increments[j + 1]);
                }
            }
        }
        std::size_t within = 0;
        double maxTau = 0;
        for (double t : taus) {
            within += t <= eps * eps / 2 ? 1 : 0;
            maxTau = std::max(maxTau, t);
        }
        ResultRow bound = detail::estimate_row(tag + ".tau_bound_fraction",
                                               bernoulli_estimate(within, taus.size(), "tau<=eps^2/2"));
        if (check)
            detail::add_check(r, bound, within == taus.size());
        r.rows.push_back(bound);
        r.rows.push_back({tag + ".tau_max_over_eps2", maxTau / (eps * eps), {}, taus.size(), {}, {}, "max", ""});
        r.rows.push_back(detail::estimate_row(tag + ".tau_mean_over_eps2", [&] {
            std::vector<double> scaled;
            for (double t : taus)
                scaled.push_back(t / (eps * eps));
            return mean_estimate(scaled, "mean");
        }()));
        const EstimateRecord m1 = mean_estimate(byJ[0], "mean");
        ResultRow meanRow = detail::estimate_row(tag + ".increment_mean", m1);
        if (check)
            detail::add_check(r, meanRow, std::abs(m1.pointEstimate) <= 3 * m1.stdError);
        r.rows.push_back(meanRow);
        if (events >= 2) {
            const PermutationResult p = permutation_correlation_test(
                lagX, lagY, sample_seed(seed, r.id + "/" + tag + "/perm", 0), c.value("permutations", 999), alpha);
            ResultRow lag{tag + ".lag1_correlation", p.statistic, {}, lagX.size(), {}, {}, "permutation", ""};
            if (check)
                detail::add_check(r, lag, !p.reject);
            r.rows.push_back(lag);
            r.rows.push_back({tag + ".lag1_p_value", p.pValue, {}, {}, {}, {}, "permutation", ""});
            detail::ks_rows(r, tag + ".ks_first_vs_last", ks_two_sample(byJ.front(), byJ.back(), alpha), check);
        }
        r.samples.push_back({tag + "/increment_j1", byJ[0]});
    }
    return r;
}

inline ExperimentResult run_arms(const json& cfg, std::uint64_t seed, const RunOptions& opt, const Goldens&)
{
    ExperimentResult r;
    r.id = cfg.value("id", "arms");
    const double rInner = detail::require<double>(cfg, "rInner");
    detail::require_positive(rInner, "rInner");
    const auto ratios = detail::require<std::vector<double>>(cfg, "ratios");
    const auto n = detail::require<std::size_t>(cfg, "nSamples");
    const ArmScaling a = arm_scaling(rInner, ratios, n, seed, opt.workers, r.id);
    for (const ArmRow& row : a.rows) {
        const std::string tag = "ratio=" + json(row.ratio).dump();
        r.rows.push_back(detail::estimate_row(tag + ".p_six_arm", row.sixArm));
        r.rows.push_back(detail::estimate_row(tag + ".p_three_arm_half", row.threeArm));
    }
    const bool check = opt.check && cfg.contains("check");
    const json c = cfg.value("check", json::object());
    auto fitRow = [&](const char* name, const std::optional<LineFit>& fit, double bound) {
        if (!fit) {
            ResultRow missing{name, 0, {}, {}, {}, {}, "wls", ""};
            if (check)
                detail::add_check(r, missing, false);
            r.rows.push_back(missing);
            return;
        }
        ResultRow row{name, fit->slope, fit->slopeSE, {}, fit->slope - 1.96 * fit->slopeSE,
                      fit->slope + 1.96 * fit->slopeSE, "wls", ""};
        if (check)
            detail::add_check(r, row, fit->slope + 2 * fit->slopeSE < bound);
        r.rows.push_back(row);
    };
    fitRow("slope_six_arm", a.sixArmFit, c.value("sixArmBelow", -2.0));
    fitRow("slope_three_arm_half", a.threeArmFit, c.value("threeArmBelow", -1.0));
    return r;
}

// ---------------------------------------------------------------- files

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string results_csv(const ExperimentResult& r)
{
    std::ostringstream out;
    out << "schema_version,experiment,id,quantity,estimate,std_error,n_samples,ci_low,ci_high,method,decision\n";
    for (const ResultRow& row : r.rows) {
        auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
        out << kResultsSchemaVersion << ',' << r.experiment << ',' << r.id << ',' << row.quantity << ','
            << format_number(row.estimate) << ',' << opt(row.stdError) << ','
            << (row.nSamples ? std::to_string(*row.nSamples) : std::string()) << ',' << opt(row.ciLow) << ','
            << opt(row.ciHigh) << ',' << row.method << ',' << row.decision << '\n';
    }
    return out.str();
}

inline std::string samples_csv(const ExperimentResult& r)
{
    std::ostringstream out;
    out << "source,index,value\n";
    for (const auto& [name, values] : r.samples)
        for (std::size_t i = 0; i < values.size(); ++i)
            out << name << ',' << i << ',' << format_number(values[i]) << '\n';
    return out.str();
}

inline std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

inline std::uint64_t config_hash(const json& cfg) { return fnv1a64(cfg.dump()); }

struct RunOutcome {
    ExperimentResult result;
    json manifest;
};

/// Runs one experiment described by a JSON config. The experiment kind comes
/// from the "experiment" key unless `kind` is given.
inline RunOutcome run_experiment(const json& cfg, const RunOptions& opt, std::string kind = "")
{
    if (!cfg.is_object())
        throw ConfigInvalid("config must be a JSON object");
    if (kind.empty())
        kind = cfg.value("experiment", std::string());
    if (cfg.contains("experiment") && cfg.at("experiment").get<std::string>() != kind)
        throw ConfigInvalid("config is for '" + cfg.at("experiment").get<std::string>() + "', not '" + kind + "'");
    const std::uint64_t seed = opt.seed ? *opt.seed : cfg.value("rootSeed", std::uint64_t{1});
    const Goldens g = Goldens::load(opt.goldens ? *opt.goldens : Goldens::default_path());
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult r;
    try {
        if (kind == "crossing")
            r = run_crossing(cfg, seed, opt, g);
        else if (kind == "hitting")
            r = run_hitting(cfg, seed, opt, g);
        else if (kind == "compare")
            r = run_compare(cfg, seed, opt, g);
        else if (kind == "sle")
            r = run_sle(cfg, seed, opt, g);
        else if (kind == "arms")
            r = run_arms(cfg, seed, opt, g);
        else
            throw ConfigInvalid("unknown experiment '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigInvalid(e.what());
    }
    r.experiment = kind;
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    m["configHash"] = hash;
    m["rootSeed"] = seed;
    m["workerCount"] = opt.workers;
    m["toolVersion"] = kToolVersion;
    m["goldenVersion"] = g.version();
    m["resultsSchemaVersion"] = kResultsSchemaVersion;
    m["wallClock"] = {{"finishedUtc", utc_now()}, {"seconds", seconds}};
    m["experiment"] = kind;
    m["id"] = r.id;
    m["parameters"] = cfg;
    m["checked"] = r.checked && opt.check;
    if (opt.check)
        m["passed"] = r.passed;
    if (opt.outDir) {
        std::filesystem::create_directories(*opt.outDir);
        std::ofstream(*opt.outDir / "results.csv") << results_csv(r);
        std::ofstream(*opt.outDir / "manifest.json") << m.dump(2) << '\n';
        if (opt.writeSamples && !r.samples.empty())
            std::ofstream(*opt.outDir / "samples.csv") << samples_csv(r);
    }
    return {std::move(r), std::move(m)};
}

inline json load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigInvalid("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigInvalid("config " + path.string() + ": " + e.what());
    }
}

} // namespace percsle
