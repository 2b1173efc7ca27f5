#pragma once

// Continuum domains from a fixed catalogue, with marked boundary points.
//
// Boundary positions are perimeter fractions t in [0, 1), measured
// counterclockwise from a reference point:
//   disc          angle 0 (the point center + R)
//   half_disc     the right end of the diameter; the arc comes first
//   rect, equilateral_triangle, polygon   vertex 0
// The half_plane is the exception: its marks are real coordinates.

#include "percsle/errors.hpp"
#include "percsle/hex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace percsle {

enum class ShapeKind { disc, half_disc, rect, equilateral_triangle, polygon, half_plane };

inline std::string to_string(ShapeKind k)
{
    switch (k) {
    case ShapeKind::disc: return "disc";
    case ShapeKind::half_disc: return "half_disc";
    case ShapeKind::rect: return "rect";
    case ShapeKind::equilateral_triangle: return "equilateral_triangle";
    case ShapeKind::polygon: return "polygon";
    case ShapeKind::half_plane: return "half_plane";
    }
    return "?";
}

inline ShapeKind shape_kind_from_string(const std::string& s)
{
    if (s == "disc") return ShapeKind::disc;
    if (s == "half_disc") return ShapeKind::half_disc;
    if (s == "rect") return ShapeKind::rect;
    if (s == "equilateral_triangle") return ShapeKind::equilateral_triangle;
    if (s == "polygon") return ShapeKind::polygon;
    if (s == "half_plane") return ShapeKind::half_plane;
    throw InvalidDomain("unknown domain kind '" + s + "'");
}

inline double wrap_unit(double t)
{
    t -= std::floor(t);
    return t >= 1.0 ? 0.0 : t;
}

class Shape {
public:
    static Shape disc(cplx center, double radius)
    {
        if (!(radius > 0))
            throw InvalidDomain("disc radius must be positive");
        Shape s(ShapeKind::disc);
        s.center_ = center;
        s.radius_ = radius;
        return s;
    }

    static Shape half_disc(cplx center, double radius)
    {
        if (!(radius > 0))
            throw InvalidDomain("half-disc radius must be positive");
        Shape s(ShapeKind::half_disc);
        s.center_ = center;
        s.radius_ = radius;
        return s;
    }

    /// Axis-aligned rectangle; vertex 0 is the bottom-left corner.
    static Shape rect(cplx lowerLeft, double width, double height)
    {
        if (!(width > 0) || !(height > 0))
            throw InvalidDomain("rectangle sides must be positive");
        Shape s(ShapeKind::rect);
        s.vertices_ = {lowerLeft, lowerLeft + width, lowerLeft + cplx(width, height), lowerLeft + cplx(0, height)};
        return s;
    }

    /// Equilateral triangle with a horizontal base starting at `base0`.
    static Shape equilateral_triangle(cplx base0, double side)
    {
        if (!(side > 0))
            throw InvalidDomain("triangle side must be positive");
        Shape s(ShapeKind::equilateral_triangle);
        s.vertices_ = {base0, base0 + side, base0 + std::polar(side, std::numbers::pi / 3)};
        return s;
    }

    /// Simple polygon, vertices in counterclockwise order.
    static Shape polygon(std::vector<cplx> vertices)
    {
        if (vertices.size() < 3)
            throw InvalidDomain("polygon needs at least 3 vertices");
        double area2 = 0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const cplx a = vertices[i], b = vertices[(i + 1) % vertices.size()];
            area2 += a.real() * b.imag() - a.imag() * b.real();
            if (std::abs(b - a) == 0)
                throw InvalidDomain("polygon has a repeated vertex");
        }
        if (!(area2 > 0))
            throw InvalidDomain("polygon must be counterclockwise with positive area");
        Shape s(ShapeKind::polygon);
        s.vertices_ = std::move(vertices);
        return s;
    }

    static Shape half_plane() { return Shape(ShapeKind::half_plane); }

    ShapeKind kind() const { return kind_; }
    cplx center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<cplx>& vertices() const { return vertices_; }
    bool is_polygonal() const
    {
        return kind_ == ShapeKind::rect || kind_ == ShapeKind::equilateral_triangle || kind_ == ShapeKind::polygon;
    }
    bool bounded() const { return kind_ != ShapeKind::half_plane; }

    /// Closed-domain membership.
    bool contains(cplx p, double tol = 1e-12) const
    {
        switch (kind_) {
        case ShapeKind::disc: return std::abs(p - center_) <= radius_ * (1 + tol);
        case ShapeKind::half_disc:
            return std::abs(p - center_) <= radius_ * (1 + tol) && p.imag() >= center_.imag() - tol * radius_;
        case ShapeKind::half_plane: return p.imag() >= -tol;
        default: break;
        }
        // winding number, with points on an edge counted as inside
        const double scale = std::max(1.0, std::abs(vertices_[0]));
        int wn = 0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const cplx a = vertices_[i], b = vertices_[(i + 1) % vertices_.size()];
            const double cr = (b.real() - a.real()) * (p.imag() - a.imag()) - (p.real() - a.real()) * (b.imag() - a.imag());
            const double len = std::abs(b - a);
            if (std::abs(cr) <= tol * scale * len) {
                const double proj = std::real((p - a) * std::conj(b - a)) / (len * len);
                if (proj >= -tol && proj <= 1 + tol)
                    return true;
            }
            if (a.imag() <= p.imag()) {
                if (b.imag() > p.imag() && cr > 0)
                    ++wn;
            } else if (b.imag() <= p.imag() && cr < 0) {
                --wn;
            }
        }
        return wn != 0;
    }

    double perimeter() const
    {
        switch (kind_) {
        case ShapeKind::disc: return 2 * std::numbers::pi * radius_;
        case ShapeKind::half_disc: return (std::numbers::pi + 2) * radius_;
        case ShapeKind::half_plane: throw UnsupportedDomain("half-plane has no perimeter");
        default: break;
        }
        double total = 0;
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            total += std::abs(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
        return total;
    }

    /// Boundary point at perimeter fraction t.
    cplx boundary_point(double t) const
    {
        t = wrap_unit(t);
        switch (kind_) {
        case ShapeKind::disc: return center_ + std::polar(radius_, 2 * std::numbers::pi * t);
        case ShapeKind::half_disc: {
            const double s = t * perimeter();
            const double arc = std::numbers::pi * radius_;
            if (s <= arc)
                return center_ + std::polar(radius_, s / radius_);
            return center_ + cplx(-radius_ + (s - arc), 0.0);
        }
        case ShapeKind::half_plane: throw UnsupportedDomain("half-plane boundary is parametrized by x");
        default: break;
        }
        double s = t * perimeter();
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const cplx a = vertices_[i], b = vertices_[(i + 1) % vertices_.size()];
            const double len = std::abs(b - a);
            if (s <= len)
                return a + (b - a) * (s / len);
            s -= len;
        }
        return vertices_[0];
    }

    /// Perimeter fraction of the boundary point nearest to p.
    double boundary_param(cplx p) const
    {
        switch (kind_) {
        case ShapeKind::disc: {
            const double ang = std::arg(p - center_);
            return wrap_unit(ang / (2 * std::numbers::pi));
        }
        case ShapeKind::half_disc: {
            const double per = perimeter();
            const cplx z = p - center_;
            double best = 1e300, tBest = 0;
            // arc candidate
            double ang = std::arg(z);
            if (ang < 0)
                ang = (z.real() >= 0) ? 0.0 : std::numbers::pi;
            const double dArc = std::abs(z - std::polar(radius_, ang));
            best = dArc;
            tBest = ang * radius_ / per;
            // diameter candidate
            const double x = std::clamp(z.real(), -radius_, radius_);
            const double dDia = std::abs(z - cplx(x, 0.0));
            if (dDia < best)
                tBest = (std::numbers::pi * radius_ + (x + radius_)) / per;
            return wrap_unit(tBest);
        }
        case ShapeKind::half_plane: throw UnsupportedDomain("half-plane boundary is parametrized by x");
        default: break;
        }
        const double per = perimeter();
        double best = 1e300, tBest = 0, acc = 0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const cplx a = vertices_[i], b = vertices_[(i + 1) % vertices_.size()];
            const double len = std::abs(b - a);
            const double u = std::clamp(std::real((p - a) * std::conj(b - a)) / (len * len), 0.0, 1.0);
            const double dist = std::abs(p - (a + u * (b - a)));
            if (dist < best) {
                best = dist;
                tBest = (acc + u * len) / per;
            }
            acc += len;
        }
        return wrap_unit(tBest);
    }

    /// Perimeter fraction of polygon vertex i.
    double vertex_param(std::size_t i) const
    {
        double acc = 0;
        for (std::size_t k = 0; k < i; ++k)
            acc += std::abs(vertices_[(k + 1) % vertices_.size()] - vertices_[k]);
        return acc / perimeter();
    }

    /// Axis-aligned bounding box {min, max}.
    std::pair<cplx, cplx> bounding_box() const
    {
        switch (kind_) {
        case ShapeKind::disc: return {center_ - cplx(radius_, radius_), center_ + cplx(radius_, radius_)};
        case ShapeKind::half_disc: return {center_ - cplx(radius_, 0), center_ + cplx(radius_, radius_)};
        case ShapeKind::half_plane: throw UnsupportedDomain("half-plane is unbounded");
        default: break;
        }
        double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
        for (cplx v : vertices_) {
            x0 = std::min(x0, v.real());
            y0 = std::min(y0, v.imag());
            x1 = std::max(x1, v.real());
            y1 = std::max(y1, v.imag());
        }
        return {{x0, y0}, {x1, y1}};
    }

    /// Smallest length scale of the shape (radius or shortest side).
    double feature_size() const
    {
        if (kind_ == ShapeKind::disc || kind_ == ShapeKind::half_disc)
            return radius_;
        if (kind_ == ShapeKind::half_plane)
            return 1e300;
        double m = 1e300;
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            m = std::min(m, std::abs(vertices_[(i + 1) % vertices_.size()] - vertices_[i]));
        return m;
    }

private:
    explicit Shape(ShapeKind k) : kind_(k) {}

    ShapeKind kind_;
    cplx center_{};
    double radius_ = 0;
    std::vector<cplx> vertices_;
};

/// A catalogue domain with 2 to 4 marked boundary points in counterclockwise order.
struct MarkedDomain {
    Shape shape;
    /// Perimeter fractions (real coordinates for the half-plane).
    std::vector<double> marks;

    cplx mark_point(std::size_t i) const
    {
        if (shape.kind() == ShapeKind::half_plane)
            return {marks.at(i), 0.0};
        return shape.boundary_point(marks.at(i));
    }

    /// Throws DegenerateMarks unless the marks are distinct and counterclockwise.
    void validate() const
    {
        if (marks.size() < 2 || marks.size() > 4)
            throw DegenerateMarks("need 2 to 4 marks, got " + std::to_string(marks.size()));
        if (shape.kind() == ShapeKind::half_plane) {
            // counterclockwise on the boundary of H means increasing x, cyclically
            int descents = 0;
            for (std::size_t i = 0; i < marks.size(); ++i) {
                const double a = marks[i], b = marks[(i + 1) % marks.size()];
                if (a == b)
                    throw DegenerateMarks("coincident marks");
                if (b < a)
                    ++descents;
            }
            if (descents != 1)
                throw DegenerateMarks("half-plane marks are not in counterclockwise order");
            return;
        }
        double total = 0;
        for (std::size_t i = 0; i < marks.size(); ++i) {
            const double gap = wrap_unit(marks[(i + 1) % marks.size()] - marks[i]);
            if (gap == 0)
                throw DegenerateMarks("coincident marks");
            total += gap;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw DegenerateMarks("marks are not in counterclockwise order");
    }
};

/// Fraction of the counterclockwise arc from `from` to `to` covered up to t.
/// Points off the arc count as the nearer end.
inline double arc_fraction(double from, double to, double t)
{
    const double len = wrap_unit(to - from);
    if (len == 0)
        return 0;
    const double u = wrap_unit(t - from);
    if (u > len)
        return (u - len < 1 - u) ? 1.0 : 0.0;
    return u / len;
}

/// Rectangle of width `aspect` and height 1 with marks at BR, TR, TL, BL, so the
/// arc z1 z2 is the right side and z3 z4 the left side (a left-right crossing).
inline MarkedDomain rect_with_corner_marks(double aspect)
{
    Shape s = Shape::rect({0, 0}, aspect, 1.0);
    return {s, {s.vertex_param(1), s.vertex_param(2), s.vertex_param(3), 0.0}};
}

} // namespace percsle
