#pragma once

// Conformal atlas: boundary correspondences between catalogue domains and the
// unit disc, cross-ratios of marked domains and images of semi-balls.
//
// Polygons are handled by the disc Schwarz-Christoffel map
//   f(w) = A * integral prod_k (1 - w / w_k)^beta_k dw + C,
// with prevertices w_k = exp(i theta_k) and beta_k = (interior angle)/pi - 1.
// On the circle |f'(exp(i phi))| = |A| prod_k (2 |sin((phi - theta_k)/2)|)^beta_k,
// so every boundary correspondence reduces to real singular integrals.

#include "percsle/errors.hpp"
#include "percsle/mobius.hpp"
#include "percsle/quadrature.hpp"
#include "percsle/shapes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace percsle {

inline constexpr double kTwoPi = 2 * std::numbers::pi;

/// Angle in [0, 2 pi).
inline double wrap_angle(double t)
{
    t = std::fmod(t, kTwoPi);
    if (t < 0)
        t += kTwoPi;
    return t >= kTwoPi ? 0.0 : t;
}

/// Cross-ratio (w1 - w2)(w3 - w4) / ((w1 - w3)(w2 - w4)).
inline cplx cross_ratio(cplx w1, cplx w2, cplx w3, cplx w4)
{
    return (w1 - w2) * (w3 - w4) / ((w1 - w3) * (w2 - w4));
}

/// Cross-ratio of four points exp(i theta_k) on the unit circle (real valued).
inline double circle_cross_ratio(double t1, double t2, double t3, double t4)
{
    const double s12 = std::sin(0.5 * (t1 - t2)), s34 = std::sin(0.5 * (t3 - t4));
    const double s13 = std::sin(0.5 * (t1 - t3)), s24 = std::sin(0.5 * (t2 - t4));
    return s12 * s34 / (s13 * s24);
}

class ScDiscMap {
public:
    /// `vertices` counterclockwise; `theta` strictly increasing prevertex angles spanning less than 2 pi.
    ScDiscMap(std::vector<cplx> vertices, std::vector<double> theta) : vertices_(std::move(vertices)), theta_(std::move(theta))
    {
        const std::size_t n = vertices_.size();
        if (n < 3 || theta_.size() != n)
            throw UnsupportedDomain("Schwarz-Christoffel map needs matching vertices and prevertices");
        beta_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx prev = vertices_[(k + n - 1) % n], cur = vertices_[k], next = vertices_[(k + 1) % n];
            // turning angle at vertex k; interior angle = pi - turn
            const double turn = std::arg((next - cur) / (cur - prev));
            beta_[k] = (std::numbers::pi - turn) / std::numbers::pi - 1.0;
        }
        refresh();
    }

    std::size_t size() const { return vertices_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<cplx>& vertices() const { return vertices_; }
    /// Side lengths of the image polygon per unit |A|, side k running from vertex k to k+1.
    const std::vector<double>& side_integrals() const { return sides_; }

    /// |f'(exp(i phi))| / |A|.
    double density(double phi) const
    {
        double logv = 0;
        for (std::size_t m = 0; m < theta_.size(); ++m)
            logv += beta_[m] * std::log(2 * std::abs(std::sin(0.5 * (phi - theta_[m]))));
        return std::exp(logv);
    }

    /// Integral of the density over [u, v] inside the prevertex gap of side k
    /// (theta_k <= u <= v <= theta_{k+1}, unwrapped).
    double integrate(std::size_t k, double u, double v) const
    {
        if (v <= u)
            return 0;
        const double a = theta_[k], b = next_theta(k);
        return integrate_piece(k, a, b, u, v, std::abs(u - a) < 1e-15, std::abs(v - b) < 1e-15);
    }

    /// Integral of the density from theta_k to phi. Past the middle of the gap it
    /// is taken as the side length minus the rest, so that the quadrature always
    /// absorbs the nearer prevertex singularity.
    double cumulative(std::size_t k, double phi) const
    {
        const double a = theta_[k], b = next_theta(k);
        if (phi - a <= b - phi)
            return integrate(k, a, phi);
        return sides_[k] - integrate(k, phi, b);
    }

    /// Side index and fraction along the side for a polygon boundary point.
    std::pair<std::size_t, double> locate(cplx p) const
    {
        std::size_t best = 0;
        double bestDist = 1e300, bestFrac = 0;
        for (std::size_t k = 0; k < vertices_.size(); ++k) {
            const cplx a = vertices_[k], b = vertices_[(k + 1) % vertices_.size()];
            const double len2 = std::norm(b - a);
            const double u = std::clamp(std::real((p - a) * std::conj(b - a)) / len2, 0.0, 1.0);
            const double dist = std::abs(p - (a + u * (b - a)));
            if (dist < bestDist) {
                bestDist = dist;
                best = k;
                bestFrac = u;
            }
        }
        return {best, bestFrac};
    }

    /// Prevertex-circle angle whose image is the point at fraction s along side k.
    double side_to_angle(std::size_t k, double s) const
    {
        const double a = theta_[k], b = next_theta(k);
        if (s <= 0)
            return wrap_angle(a);
        if (s >= 1)
            return wrap_angle(b);
        const double target = s * sides_[k];
        // start from the local power law at the nearer prevertex
        const double alphaA = 1 + beta_[k], alphaB = 1 + beta_[(k + 1) % theta_.size()];
        double lo = a, hi = b;
        double phi = s <= 0.5 ? a + 0.5 * (b - a) * std::pow(2 * s, 1 / alphaA)
                              : b - 0.5 * (b - a) * std::pow(2 * (1 - s), 1 / alphaB);
        for (int it = 0; it < 200; ++it) {
            const double val = cumulative(k, phi) - target;
            if (std::abs(val) <= 1e-15 * sides_[k])
                break;
            if (val > 0)
                hi = phi;
            else
                lo = phi;
            const double step = val / density(phi);
            double next = phi - step;
            if (!(next > lo && next < hi) || !std::isfinite(next))
                next = 0.5 * (lo + hi);
            if (hi - lo < 1e-16 * kTwoPi)
                break;
            const bool settled = std::abs(next - phi) <= 1e-15 * std::abs(phi) + 1e-300;
            phi = next;
            if (settled)
                break;
        }
        return wrap_angle(phi);
    }

    /// Fraction along side k of the image of exp(i phi), with phi in that side's gap.
    double angle_to_side(std::size_t k, double phi) const
    {
        const double a = theta_[k];
        const double u = wrap_angle(phi - a) + a;
        return std::clamp(cumulative(k, u) / sides_[k], 0.0, 1.0);
    }

    /// Side whose prevertex gap contains phi.
    std::size_t side_of_angle(double phi) const
    {
        const std::size_t n = theta_.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double off = wrap_angle(phi - theta_[k]);
            if (off < next_theta(k) - theta_[k])
                return k;
        }
        return n - 1;
    }

    /// Preimage angle of a polygon boundary point.
    double boundary_to_angle(cplx p) const
    {
        const auto [k, s] = locate(p);
        return side_to_angle(k, s);
    }

    /// Image of exp(i phi) on the polygon boundary.
    cplx angle_to_boundary(double phi) const
    {
        const std::size_t k = side_of_angle(phi);
        const double s = angle_to_side(k, phi);
        return vertices_[k] + s * (vertices_[(k + 1) % vertices_.size()] - vertices_[k]);
    }

    /// Largest relative error of the image side lengths against the polygon.
    double side_error() const
    {
        const std::size_t n = vertices_.size();
        const double scale = std::abs(vertices_[1] - vertices_[0]) / sides_[0];
        double err = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double want = std::abs(vertices_[(k + 1) % n] - vertices_[k]);
            err = std::max(err, std::abs(scale * sides_[k] - want) / want);
        }
        return err;
    }

    void set_theta(std::vector<double> theta)
    {
        theta_ = std::move(theta);
        refresh();
    }

private:
    double next_theta(std::size_t k) const
    {
        return k + 1 < theta_.size() ? theta_[k + 1] : theta_[0] + kTwoPi;
    }

    void refresh()
    {
        sides_.resize(theta_.size());
        for (std::size_t k = 0; k < theta_.size(); ++k)
            sides_[k] = integrate(k, theta_[k], next_theta(k));
    }

    // Compound Gauss-Jacobi: endpoint singularities at the gap ends go into the
    // weight; the interval is halved while a non-absorbed prevertex is close.
    double integrate_piece(std::size_t k, double a, double b, double u, double v, bool leftSing, bool rightSing) const
    {
        const std::size_t n = theta_.size();
        const std::size_t kA = k, kB = (k + 1) % n;
        double near = 1e300;
        for (std::size_t m = 0; m < n; ++m) {
            if ((m == kA && leftSing) || (m == kB && rightSing))
                continue;
            double du, dv;
            if (m == kA) {
                du = u - a;
                dv = v - a;
            } else if (m == kB) {
                du = b - u;
                dv = b - v;
            } else {
                du = std::abs(wrap_angle(theta_[m] - u));
                du = std::min(du, kTwoPi - du);
                dv = std::abs(wrap_angle(theta_[m] - v));
                dv = std::min(dv, kTwoPi - dv);
            }
            near = std::min({near, du, dv});
        }
        const double len = v - u;
        if ((len > 0.5 * near || len > 1.0) && len > 1e-12) {
            const double mid = 0.5 * (u + v);
            return integrate_piece(k, a, b, u, mid, leftSing, false) + integrate_piece(k, a, b, mid, v, false, rightSing);
        }
        auto g = [&](double phi) {
            double logv = 0;
            for (std::size_t m = 0; m < n; ++m) {
                const double s = 2 * std::abs(std::sin(0.5 * (phi - theta_[m])));
                // 2 sin(x/2) / x -> 1 when a node rounds onto the prevertex
                if (m == kA && leftSing)
                    logv += phi > a ? beta_[m] * std::log(s / (phi - a)) : 0.0;
                else if (m == kB && rightSing)
                    logv += b > phi ? beta_[m] * std::log(s / (b - phi)) : 0.0;
                else
                    logv += beta_[m] * std::log(s);
            }
            return std::exp(logv);
        };
        // weight (v - x)^alpha (x - u)^beta
        return gauss_jacobi_integrate(g, u, v, rightSing ? beta_[kB] : 0.0, leftSing ? beta_[kA] : 0.0, 24);
    }

    std::vector<cplx> vertices_;
    std::vector<double> theta_;
    std::vector<double> beta_;
    std::vector<double> sides_;
};

namespace detail {

/// Prevertices on the circle for the rectangle of the given aspect (width / height),
/// vertices ordered BL, BR, TR, TL. Bisection on the elliptic modulus k: in the
/// half-plane the prevertices are -1/k, -1, 1, 1/k and the Cayley map carries them
/// to the circle.
inline std::vector<double> rect_prevertices(const std::vector<cplx>& verts, double aspect)
{
    auto thetas = [](double k) {
        const MobiusMap c = MobiusMap::cayley();
        std::vector<double> t;
        for (double x : {-1.0, 1.0, 1.0 / k, -1.0 / k})
            t.push_back(std::arg(c(cplx(x, 0))));
        // unwrap into increasing order starting at the image of -1
        for (std::size_t i = 1; i < t.size(); ++i)
            while (t[i] <= t[i - 1])
                t[i] += kTwoPi;
        return t;
    };
    auto aspect_of = [&](double k) {
        ScDiscMap m(verts, thetas(k));
        return m.side_integrals()[0] / m.side_integrals()[1];
    };
    // aspect increases as k -> 1
    double lo = 1e-6, hi = 1 - 1e-9;
    if (aspect < aspect_of(lo) || aspect > aspect_of(hi))
        throw MapNotConverged("rectangle aspect outside the bracket");
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (aspect_of(mid) < aspect)
            lo = mid;
        else
            hi = mid;
    }
    return thetas(0.5 * (lo + hi));
}

/// Solves the parameter problem for a general polygon by damped Newton iteration
/// with a finite-difference Jacobian. Three prevertices are fixed; the others are
/// softmax-weighted gaps of the remaining arc.
inline std::vector<double> polygon_prevertices(const std::vector<cplx>& verts)
{
    const std::size_t n = verts.size();
    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k)
        base[k] = kTwoPi * double(k) / double(n);
    if (n == 3)
        return base;
    const std::size_t m = n - 3;
    const double arcEnd = base[n - 2];
    auto thetas = [&](const Eigen::VectorXd& y) {
        std::vector<double> t(n);
        double total = 0;
        std::vector<double> g(n - 2);
        for (std::size_t j = 0; j < n - 2; ++j) {
            g[j] = j < m ? std::exp(y[j]) : 1.0;
            total += g[j];
        }
        double acc = 0;
        t[0] = 0;
        for (std::size_t j = 1; j <= n - 3; ++j) {
            acc += g[j - 1];
            t[j] = arcEnd * acc / total;
        }
        t[n - 2] = base[n - 2];
        t[n - 1] = base[n - 1];
        return t;
    };
    std::vector<double> target(n);
    for (std::size_t k = 0; k < n; ++k)
        target[k] = std::abs(verts[(k + 1) % n] - verts[k]);
    auto residual = [&](const Eigen::VectorXd& y) {
        ScDiscMap map(verts, thetas(y));
        const auto& s = map.side_integrals();
        Eigen::VectorXd r(m);
        for (std::size_t k = 1; k <= m; ++k)
            r[k - 1] = std::log(s[k] / s[0]) - std::log(target[k] / target[0]);
        return r;
    };
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd r = residual(y);
    for (int it = 0; it < 100 && r.norm() > 1e-13; ++it) {
        Eigen::MatrixXd J(m, m);
        for (std::size_t j = 0; j < m; ++j) {
            Eigen::VectorXd yp = y;
            const double h = 1e-7;
            yp[j] += h;
            J.col(j) = (residual(yp) - r) / h;
        }
        const Eigen::VectorXd step = J.fullPivLu().solve(-r);
        double lambda = 1;
        for (; lambda > 1e-6; lambda *= 0.5) {
            const Eigen::VectorXd yn = y + lambda * step;
            const Eigen::VectorXd rn = residual(yn);
            if (rn.norm() < r.norm()) {
                y = yn;
                r = rn;
                break;
            }
        }
        if (lambda <= 1e-6)
            break;
    }
    return thetas(y);
}

} // namespace detail

/// Boundary correspondence between a catalogue domain and the unit circle.
/// Domain boundary points are perimeter fractions (real x for the half-plane).
class DiscAtlas {
public:
    explicit DiscAtlas(const Shape& shape) : shape_(shape)
    {
        if (!shape.is_polygonal())
            return;
        const auto& v = shape.vertices();
        std::vector<double> theta;
        if (shape.kind() == ShapeKind::rect) {
            const double aspect = std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]);
            theta = detail::rect_prevertices(v, aspect);
        } else if (shape.kind() == ShapeKind::equilateral_triangle) {
            theta = {0.0, kTwoPi / 3, 2 * kTwoPi / 3};
        } else {
            theta = detail::polygon_prevertices(v);
        }
        sc_ = std::make_shared<ScDiscMap>(v, theta);
        if (!(sc_->side_error() <= 1e-9))
            throw MapNotConverged("Schwarz-Christoffel vertex error " + std::to_string(sc_->side_error()));
    }

    const Shape& shape() const { return shape_; }
    const ScDiscMap* sc() const { return sc_.get(); }

    /// Circle angle of the boundary point with perimeter fraction t (or real x).
    double to_disc_angle(double t) const
    {
        switch (shape_.kind()) {
        case ShapeKind::disc: return wrap_angle(kTwoPi * t);
        case ShapeKind::half_plane: return wrap_angle(std::arg(MobiusMap::cayley()(cplx(t, 0))));
        case ShapeKind::half_disc: {
            const cplx z = (shape_.boundary_point(t) - shape_.center()) / shape_.radius();
            return wrap_angle(std::arg(half_disc_to_disc(z)));
        }
        default: return sc_->boundary_to_angle(shape_.boundary_point(t));
        }
    }

    /// Perimeter fraction (or real x) of the boundary point with circle angle phi.
    double from_disc_angle(double phi) const
    {
        switch (shape_.kind()) {
        case ShapeKind::disc: return wrap_unit(phi / kTwoPi);
        case ShapeKind::half_plane: {
            const cplx w = std::polar(1.0, phi);
            return std::real(MobiusMap::cayley().inverse()(w));
        }
        case ShapeKind::half_disc: {
            const cplx z = disc_to_half_disc(std::polar(1.0, phi));
            return shape_.boundary_param(shape_.center() + shape_.radius() * z);
        }
        default: return shape_.boundary_param(sc_->angle_to_boundary(phi));
        }
    }

    /// Upper unit half-disc onto the unit disc: z -> ((1+z)/(1-z))^2 -> Cayley.
    /// The ends 1, -1 go to 1, -1; the center goes to -i.
    static cplx half_disc_to_disc(cplx z)
    {
        const cplx p = (1.0 + z) * (1.0 + z), m = (1.0 - z) * (1.0 - z);
        const cplx num = p - cplx(0, 1) * m, den = p + cplx(0, 1) * m;
        if (std::abs(den) == 0)
            return {1.0, 0.0};
        return num / den;
    }

    static cplx disc_to_half_disc(cplx w)
    {
        if (std::abs(w - 1.0) < 1e-300)
            return {1.0, 0.0};
        const cplx zeta = cplx(0, 1) * (1.0 + w) / (1.0 - w);
        // (1 + z) / (1 - z) maps the half-disc onto the first quadrant
        cplx r = std::sqrt(zeta);
        if (r.real() + r.imag() < 0)
            r = -r;
        return (r - 1.0) / (r + 1.0);
    }

private:
    Shape shape_;
    std::shared_ptr<ScDiscMap> sc_;
};

/// Circle angles of the marks of a marked domain.
inline std::vector<double> mark_angles(const MarkedDomain& md, const DiscAtlas& atlas)
{
    std::vector<double> out;
    for (double m : md.marks)
        out.push_back(atlas.to_disc_angle(m));
    return out;
}

/// Cross-ratio of the disc preimages of the four marks.
inline double quad_cross_ratio(const MarkedDomain& md, const DiscAtlas& atlas)
{
    if (md.marks.size() != 4)
        throw DegenerateMarks("cross-ratio needs four marks");
    md.validate();
    const auto t = mark_angles(md, atlas);
    return circle_cross_ratio(t[0], t[1], t[2], t[3]);
}

inline double quad_cross_ratio(const MarkedDomain& md) { return quad_cross_ratio(md, DiscAtlas(md.shape)); }

/// Image of the semicircle {|z| = eps, Im z >= 0} under a map of the half-plane.
inline std::vector<cplx> semiball_image(const std::function<cplx(cplx)>& base, double eps, int points = 257)
{
    std::vector<cplx> poly;
    poly.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double ang = std::numbers::pi * double(i) / double(points - 1);
        poly.push_back(base(std::polar(eps, ang)));
    }
    return poly;
}

} // namespace percsle
