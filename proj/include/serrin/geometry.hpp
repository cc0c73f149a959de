#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace serrin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double t) { return {t * a.x, t * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double t) { return {a.x / t, a.y / t}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Reflection of p across the line {x . e = s}, e a unit vector.
constexpr Vec2 reflect(Vec2 p, Vec2 e, double s) { return p - 2.0 * (dot(p, e) - s) * e; }

struct Box {
    Vec2 lo;
    Vec2 hi;
};

/// An open planar domain described through the queries the grid builder needs.
class Region {
public:
    virtual ~Region() = default;

    /// Positive inside, negative outside, zero on the boundary.
    virtual double signed_distance(Vec2 p) const = 0;
    bool contains(Vec2 p) const { return signed_distance(p) > 0.0; }

    /// Distance from `inside` to the first boundary point on the segment
    /// towards `outside` (which must not lie in the open domain).
    virtual double crossing(Vec2 inside, Vec2 outside) const = 0;

    virtual Box bounds() const = 0;
};

/// Position and parametric derivatives of a closed curve at one parameter.
struct CurveSample {
    Vec2 x;
    Vec2 dx;
    Vec2 ddx;
};

struct CurveProjection {
    double t = 0.0;
    Vec2 foot;
    double signed_distance = 0.0;  // positive on the interior side
};

/// Smooth closed parametric curve x(t), t in [0, 1), counter-clockwise so
/// that the interior lies to the left. Copies share the immutable sampled
/// representation.
class DomainCurve final : public Region {
public:
    using Evaluator = std::function<CurveSample(double)>;

    /// `breaks` lists parameters where x'' may jump (piecewise-smooth curves).
    DomainCurve(std::string name, Evaluator eval, std::vector<double> breaks = {});

    static DomainCurve circle(double R, Vec2 center = {});
    static DomainCurve ellipse(double a, double b);
    /// Polar curve r(phi) = 1 + amplitude * cos(phi).
    static DomainCurve egg(double amplitude);
    /// Two flats of length 2*half_flat joined by semicircles of `radius`.
    static DomainCurve stadium(double half_flat, double radius);

    const std::string& name() const;
    CurveSample sample(double t) const;
    Vec2 point(double t) const { return sample(t).x; }
    Vec2 tangent(double t) const;
    /// Interior unit normal.
    Vec2 normal(double t) const;
    /// Signed curvature, positive for convex curves (circle of radius R -> 1/R).
    double curvature(double t) const;
    std::span<const double> breaks() const;

    CurveProjection project(Vec2 p) const;
    /// +1 or -1 when p is certainly inside or outside, 0 near the curve.
    int side_hint(Vec2 p) const;
    double signed_distance(Vec2 p) const override { return project(p).signed_distance; }
    double crossing(Vec2 inside, Vec2 outside) const override;
    Box bounds() const override;
    double diameter() const;

    /// Dense polyline vertices at t_i = i / n.
    std::span<const Vec2> polyline() const;

    /// Returns false if the sampled polyline self-intersects.
    bool is_simple(int samples = 512) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// {r_in < |x| < r_out, 0 < arg x < theta}, used for the truncated cone problems.
class AnnularSector final : public Region {
public:
    AnnularSector(double theta, double r_in, double r_out = 1.0);

    double theta() const { return theta_; }
    double inner_radius() const { return r_in_; }
    double outer_radius() const { return r_out_; }

    /// Polar angle of p measured in [0, 2 pi).
    double angle(Vec2 p) const;

    double signed_distance(Vec2 p) const override;
    double crossing(Vec2 inside, Vec2 outside) const override;
    Box bounds() const override;

private:
    double theta_;
    double r_in_;
    double r_out_;
    Vec2 side0_;  // unit direction of the ray arg = 0
    Vec2 side1_;  // unit direction of the ray arg = theta
};

}  // namespace serrin
