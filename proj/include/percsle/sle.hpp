#pragma once

// Chordal Loewner chains in the upper half-plane driven by sqrt(kappa) times
// Brownian motion, discretized with piecewise constant driving.
//
// On each step the driving is constant, so the step map is the vertical slit map
//   phi_k(w) = sqrt((w - dW_k)^2 + 4 dt_k)
// in recentred coordinates (tip sent to 0). Its inverse is
//   phi_k^{-1}(u) = dW_k + sqrt(u^2 - 4 dt_k),
// and the tip after n steps is phi_1^{-1} o ... o phi_n^{-1}(0).

#include "percsle/conformal.hpp"
#include "percsle/curvemetric.hpp"
#include "percsle/errors.hpp"
#include "percsle/rng.hpp"
#include "percsle/shapes.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace percsle {

inline constexpr double kSleKappa = 6.0;

struct DrivingFunction {
    double dt = 0;
    double kappa = kSleKappa;
    std::uint64_t seed = 0;
    /// W_0 .. W_N with W_0 = 0.
    std::vector<double> samples;

    std::size_t steps() const { return samples.empty() ? 0 : samples.size() - 1; }
};

/// Increment k (0-based) of the Brownian driving with the given seed.
inline double driving_increment(std::uint64_t seed, double kappa, double dt, std::uint64_t k)
{
    return std::sqrt(kappa * dt) * CounterStream(seed, 0x5E1E).normal(k);
}

inline DrivingFunction sample_driving(double dt, double T, std::uint64_t seed, double kappa = kSleKappa)
{
    if (!(dt > 0) || !(T >= dt))
        throw InvalidDomain("sample_driving needs dt > 0 and T >= dt");
    const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    DrivingFunction w{dt, kappa, seed, {0.0}};
    w.samples.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k)
        w.samples.push_back(w.samples.back() + driving_increment(seed, kappa, dt, k));
    return w;
}

/// Driving function from explicit samples (W_0 must be 0).
inline DrivingFunction explicit_driving(double dt, std::vector<double> samples, double kappa = kSleKappa)
{
    if (samples.empty() || samples[0] != 0.0)
        throw InvalidDomain("explicit driving must start at 0");
    return {dt, kappa, 0, std::move(samples)};
}

namespace detail {

/// Square root with values in the closed upper half-plane. On the real axis the
/// sign follows `side`, which keeps the slit maps continuous from above.
inline cplx upper_sqrt(double x, double y, double side)
{
    const double r = std::sqrt(x * x + y * y);
    double re, im;
    if (x >= 0) {
        re = std::sqrt(0.5 * (r + x));
        im = re > 0 ? 0.5 * y / re : 0.0;
    } else {
        im = std::sqrt(0.5 * (r - x));
        re = 0.5 * std::abs(y) / im;
        if (y < 0)
            im = -im;
    }
    if (im < 0 || (im == 0 && ((side < 0) != (re < 0)))) {
        re = -re;
        im = -im;
    }
    return {re, im == 0 ? 0.0 : im};
}

inline cplx slit_inverse(cplx u, double dW, double dt)
{
    const double x = u.real(), y = u.imag();
    return cplx(dW, 0) + upper_sqrt(x * x - y * y - 4 * dt, 2 * x * y, x);
}

inline cplx slit_forward(cplx w, double dW, double dt)
{
    const double x = w.real() - dW, y = w.imag();
    return upper_sqrt(x * x - y * y + 4 * dt, 2 * x * y, x);
}

/// Closed-form tip of a single step: phi^{-1}(0) = dW + 2i sqrt(dt).
inline cplx slit_tip(double dW, double dt) { return {dW, 2 * std::sqrt(dt)}; }

} // namespace detail

struct SlitStep {
    double dt = 0;
    double dW = 0;
};

/// Discretized Loewner chain. Steps come from an explicit driving function or
/// are generated on demand from a seed.
class LoewnerState {
public:
    LoewnerState() = default;

    explicit LoewnerState(const DrivingFunction& w) : kappa_(w.kappa), dt_(w.dt)
    {
        for (std::size_t k = 1; k < w.samples.size(); ++k)
            append({w.dt, w.samples[k] - w.samples[k - 1]});
    }

    /// Unbounded chain driven by sqrt(kappa) B with increments drawn lazily.
    static LoewnerState seeded(std::uint64_t seed, double dt, double kappa = kSleKappa)
    {
        LoewnerState s;
        s.seed_ = seed;
        s.dt_ = dt;
        s.kappa_ = kappa;
        return s;
    }

    std::size_t steps() const { return steps_.size(); }
    const std::vector<SlitStep>& composed_maps() const { return steps_; }
    double kappa() const { return kappa_; }
    double dt() const { return dt_; }

    /// Capacity time t_n = sum of dt_k (so g_t(z) = z + 2t/z + ...).
    double time(std::size_t n) const { return times_[n]; }
    double capacity_time() const { return times_.back(); }
    double driving(std::size_t n) const { return driving_[n]; }

    /// Makes sure steps 1..n exist; false if the driving is exhausted.
    bool ensure(std::size_t n)
    {
        if (n <= steps())
            return true;
        if (!seed_)
            return false;
        steps_.reserve(n);
        while (steps() < n)
            append({dt_, driving_increment(*seed_, kappa_, dt_, steps())});
        return true;
    }

    /// phi_{from+1}^{-1} o ... o phi_to^{-1}(u).
    cplx inverse(std::size_t from, std::size_t to, cplx u) const
    {
        for (std::size_t k = to; k > from; --k)
            u = detail::slit_inverse(u, steps_[k - 1].dW, steps_[k - 1].dt);
        return u;
    }

    /// Recentred tip phi_{from+1}^{-1} o ... o phi_n^{-1}(0), for n > from.
    cplx recentred_tip(std::size_t from, std::size_t n) const
    {
        const SlitStep& last = steps_[n - 1];
        return inverse(from, n - 1, detail::slit_tip(last.dW, last.dt));
    }

    /// Trace point gamma(t_n); gamma(0) = W_0 = 0.
    cplx tip(std::size_t n) const
    {
        if (n == 0)
            return 0.0;
        const cplx z = recentred_tip(0, n);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericOverflow("non-finite trace point");
        return z;
    }

    /// g_{t_n}(z) for z in the closed upper half-plane outside the hull,
    /// extended to the lower half-plane by reflection.
    cplx forward(cplx z, std::size_t n) const
    {
        if (z.imag() < 0)
            return std::conj(forward(std::conj(z), n));
        cplx w = z;
        for (std::size_t k = 0; k < n; ++k)
            w = detail::slit_forward(w, steps_[k].dW, steps_[k].dt);
        return w + driving_[n];
    }

    /// Coefficient of 1/z in the expansion of g_{t_n} at infinity, extracted by
    /// the trapezoid rule on a circle of radius R (which must enclose the hull).
    double inverse_z_coefficient(std::size_t n, double R, int points = 128) const
    {
        cplx sum = 0;
        for (int j = 0; j < points; ++j) {
            const cplx z = std::polar(R, 2 * std::numbers::pi * (j + 0.5) / points);
            sum += (forward(z, n) - z) * z;
        }
        return (sum / double(points)).real();
    }

    std::vector<cplx> trace;

    /// Appends a step with its own capacity increment.
    void append(SlitStep s)
    {
        steps_.push_back(s);
        times_.push_back(times_.back() + s.dt);
        driving_.push_back(driving_.back() + s.dW);
    }

private:
    std::vector<SlitStep> steps_;
    std::vector<double> times_{0.0};
    std::vector<double> driving_{0.0};
    std::optional<std::uint64_t> seed_;
    double kappa_ = kSleKappa;
    double dt_ = 0;
};

/// Builds the chain and its trace points gamma(t_0), ..., gamma(t_N). Cost is
/// quadratic in N.
inline LoewnerState loewner_trace(const DrivingFunction& w)
{
    LoewnerState s(w);
    s.trace.reserve(s.steps() + 1);
    for (std::size_t n = 0; n <= s.steps(); ++n)
        s.trace.push_back(s.tip(n));
    return s;
}

struct HullSnapshot {
    std::size_t j = 0;
    std::size_t step = 0;
    double time = 0;
    cplx tip{};
    double driving = 0;
    double tau = 0;
};

/// Largest step that resolves exit from a semi-ball of radius eps: the typical
/// move of a mapped trace point, sqrt((kappa + 4) dt), stays below eps / 10.
inline double semiball_max_dt(double eps, double kappa = kSleKappa)
{
    return (eps / 10) * (eps / 10) / (kappa + 4);
}

/// Default step for semi-ball stopping with parameter eps.
inline double semiball_dt(double eps, double kappa = kSleKappa)
{
    return std::min(eps * eps / 1000, semiball_max_dt(eps, kappa));
}

/// First step n > fromIndex at which the trace, mapped by the uniformizing map
/// at step fromIndex (tip sent to 0), leaves the semi-ball C(0, eps).
inline HullSnapshot first_exit_semiball(LoewnerState& s, double eps, std::size_t fromIndex, std::size_t j = 1)
{
    if (!(eps > 0))
        throw InvalidDomain("semi-ball radius must be positive");
    const double threshold = eps * (1 - 1e-12);
    for (std::size_t n = fromIndex + 1;; ++n) {
        if (!s.ensure(n))
            throw StepBudgetExceeded("driving ended before leaving the semi-ball");
        const SlitStep& st = s.composed_maps()[n - 1];
        if (st.dt > semiball_max_dt(eps, s.kappa()) * (1 + 1e-12))
            throw ResolutionTooCoarse("step too coarse for semi-ball radius");
        if (std::abs(s.recentred_tip(fromIndex, n)) >= threshold) {
            HullSnapshot h;
            h.j = j;
            h.step = n;
            h.time = s.time(n);
            h.tip = s.tip(n);
            h.driving = s.driving(n);
            h.tau = s.time(n) - s.time(fromIndex);
            return h;
        }
    }
}

/// Successive semi-ball stopping times T_1 < T_2 < ... ; stops after `count`
/// snapshots or when the driving runs out.
inline std::vector<HullSnapshot> semiball_stopping_times(LoewnerState& s, double eps, std::size_t count)
{
    std::vector<HullSnapshot> out;
    std::size_t from = 0;
    while (out.size() < count) {
        try {
            out.push_back(first_exit_semiball(s, eps, from, out.size() + 1));
        } catch (const StepBudgetExceeded&) {
            break;
        }
        from = out.back().step;
    }
    return out;
}

/// The polyline 0, gamma(T_1), gamma(T_2), ... over the available driving.
inline Polyline polygonal_approximation(LoewnerState& s, double eps)
{
    Polyline poly{0.0};
    for (const HullSnapshot& h : semiball_stopping_times(s, eps, s.steps()))
        poly.push_back(h.tip);
    return poly;
}

/// Trace points gamma(t_0) .. gamma(t_n).
inline Polyline trace_prefix(const LoewnerState& s, std::size_t n)
{
    Polyline out;
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        out.push_back(k < s.trace.size() ? s.trace[k] : s.tip(k));
    return out;
}

struct SleHittingOptions {
    /// Step size relative to the squared distance from the tip to the nearer target.
    double relStep = 1.5e-3;
    /// The run stops once that distance is this fraction of the distance to the other side.
    double stopRatio = 1e-30;
    /// The hit point is the preimage of d^e D^(1-e) for distances d < D; any
    /// exponent in (2/3, 1) gives the same limit.
    double probeExponent = 0.85;
    double kappa = kSleKappa;
    std::size_t maxSteps = 5'000'000;
};

struct BoundaryHit {
    double point = 0;
    std::size_t steps = 0;
};

/// First point of (-inf, q] u [p, inf) hit by chordal SLE from 0 to infinity in H,
/// for q < 0 < p.
///
/// The driving is sampled on an adapted grid with dt = relStep * d^2, where d is the
/// distance in the uniformized picture from the driving point to the nearer of
/// g_t(p), g_t(q). Each step uses the driving value at the middle of the step, so
/// the step map is a shift by dW/2, a slit of capacity dt and another shift by dW/2.
///
/// The run stops when d / D < stopRatio. Points of the target that the curve is
/// about to enclose then have images within about d^(2/3) D^(1/3) of the driving
/// point, while the rest stay at distance comparable to D; the preimage of a point
/// between the two scales is the hit point.
inline BoundaryHit sle_boundary_hit(std::uint64_t seed, double p, double q, const SleHittingOptions& opt = {})
{
    if (!(q < 0 && p > 0))
        throw DegenerateMarks("targets must lie on both sides of the start");
    const CounterStream rng(seed, 0x5E1E);
    LoewnerState s;
    double xp = p, xq = q, half = 0;
    auto hit_at = [&](double u) {
        cplx z = s.inverse(0, s.steps(), cplx(u + half, 0));
        return BoundaryHit{z.real(), s.steps()};
    };
    for (std::size_t k = 0; k < opt.maxSteps; ++k) {
        const double d = std::min(xp, -xq), D = std::max(xp, -xq);
        const double sign = xp < -xq ? 1.0 : -1.0;
        if (d < opt.stopRatio * D)
            return hit_at(sign * std::pow(d, opt.probeExponent) * std::pow(D, 1 - opt.probeExponent));
        const double dt = opt.relStep * d * d;
        const double a = 0.5 * std::sqrt(opt.kappa * dt) * rng.normal(k);
        const double yp = xp - a, yq = xq - a;
        if (yp <= 0 || yq >= 0)
            return hit_at(a); // the half step already crosses a target
        s.append({dt, half + a});
        half = a;
        xp = std::sqrt(yp * yp + 4 * dt) - a;
        xq = -std::sqrt(yq * yq + 4 * dt) - a;
    }
    throw StepBudgetExceeded("SLE run did not reach the target");
}

/// Marks (a, c, d) of the unit half-disc with a at the center of the diameter
/// and target arc the semicircle from c = 1 to d = -1.
inline MarkedDomain canonical_half_disc()
{
    const Shape s = Shape::half_disc(0.0, 1.0);
    const double per = std::numbers::pi + 2;
    return {s, {(std::numbers::pi + 1) / per, 0.0, std::numbers::pi / per}};
}

/// Hit position (fraction of the arc cd) of chordal SLE started at a. The domain
/// is sent to H by a Moebius map of its disc picture with a -> 0, c -> 1 and the
/// middle of the arc to infinity, so the arc becomes (-inf, q] u [1, inf). By
/// locality the law of the trace up to the hitting time does not depend on the
/// far endpoint.
inline double sle_hitting_sample(const MarkedDomain& md, std::uint64_t seed, const SleHittingOptions& opt = {})
{
    if (md.shape.kind() != ShapeKind::half_disc && md.shape.kind() != ShapeKind::disc)
        throw UnsupportedDomain("SLE hitting is sampled on the disc and the half-disc");
    if (md.marks.size() != 3)
        throw DegenerateMarks("hitting needs marks a, c, d");
    md.validate();
    const DiscAtlas atlas(md.shape);
    const auto ang = mark_angles(md, atlas);
    const cplx A = std::polar(1.0, ang[0]), C = std::polar(1.0, ang[1]), Dm = std::polar(1.0, ang[2]);
    const cplx B = std::polar(1.0, ang[1] + 0.5 * wrap_angle(ang[2] - ang[1]));
    // psi(z) = (B k z + A) / (k z + 1): psi(0) = A, psi(1) = C, psi(inf) = B
    const cplx k = (A - C) / (C - B);
    const MobiusMap psi(B * k, A, k, 1.0);
    const double q = psi.inverse()(Dm).real();
    const BoundaryHit h = sle_boundary_hit(seed, 1.0, q, opt);
    const double t = atlas.from_disc_angle(std::arg(psi(h.point)));
    return arc_fraction(md.marks[1], md.marks[2], t);
}

} // namespace percsle
