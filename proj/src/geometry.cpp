#include "serrin/geometry.hpp"

#include "serrin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace serrin {

namespace {

constexpr int kPolylineSize = 4096;
constexpr int kBucketsPerSide = 64;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double t) {
    double w = t - std::floor(t);
    if (w >= 1.0) w = 0.0;
    return w;
}

/// Closest point parameter in [0, 1] on segment ab to p.
double segment_param(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

}  // namespace

struct DomainCurve::Impl {
    std::string name;
    Evaluator eval;
    std::vector<double> breaks;
    std::vector<Vec2> poly;  // poly[i] = x(i / n)
    Box box;
    double diameter = 0.0;

    // uniform buckets over the bounding box, each listing polyline segments
    double cell = 0.0;
    std::vector<std::vector<int>> buckets;
    std::vector<signed char> bucket_side;  // +1 / -1 if the whole cell is inside / outside, else 0

    int bucket_coord(double v, double lo) const {
        return std::clamp(static_cast<int>(std::floor((v - lo) / cell)), 0, kBucketsPerSide - 1);
    }
    const std::vector<int>& bucket(int bi, int bj) const { return buckets[bj * kBucketsPerSide + bi]; }

    Vec2 vertex(int i) const { return poly[((i % kPolylineSize) + kPolylineSize) % kPolylineSize]; }

    /// Index of the polyline segment closest to p and the segment parameter.
    std::pair<int, double> nearest_segment(Vec2 p) const {
        const int ci = bucket_coord(p.x, box.lo.x);
        const int cj = bucket_coord(p.y, box.lo.y);
        const double outside = std::max({box.lo.x - p.x, p.x - box.hi.x, box.lo.y - p.y, p.y - box.hi.y, 0.0});
        double best = std::numeric_limits<double>::infinity();
        int best_seg = 0;
        double best_param = 0.0;
        for (int ring = 0; ring < kBucketsPerSide; ++ring) {
            for (int bj = cj - ring; bj <= cj + ring; ++bj) {
                for (int bi = ci - ring; bi <= ci + ring; ++bi) {
                    if (std::max(std::abs(bi - ci), std::abs(bj - cj)) != ring) continue;
                    if (bi < 0 || bj < 0 || bi >= kBucketsPerSide || bj >= kBucketsPerSide) continue;
                    for (int seg : bucket(bi, bj)) {
                        const Vec2 a = vertex(seg);
                        const Vec2 b = vertex(seg + 1);
                        const double s = segment_param(a, b, p);
                        const double d = norm(a + s * (b - a) - p);
                        if (d < best) {
                            best = d;
                            best_seg = seg;
                            best_param = s;
                        }
                    }
                }
            }
            if (best <= std::hypot(outside, ring * cell)) break;  // lower bound for later rings
        }
        return {best_seg, best_param};
    }
};

DomainCurve::DomainCurve(std::string name, Evaluator eval, std::vector<double> breaks) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->eval = std::move(eval);
    impl->breaks = std::move(breaks);
    std::sort(impl->breaks.begin(), impl->breaks.end());

    impl->poly.resize(kPolylineSize);
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi = -lo;
    for (int i = 0; i < kPolylineSize; ++i) {
        const CurveSample s = impl->eval(static_cast<double>(i) / kPolylineSize);
        if (norm(s.dx) == 0.0) {
            throw std::invalid_argument("curve '" + impl->name + "' has a zero-speed point");
        }
        impl->poly[i] = s.x;
        lo = {std::min(lo.x, s.x.x), std::min(lo.y, s.x.y)};
        hi = {std::max(hi.x, s.x.x), std::max(hi.y, s.x.y)};
    }
    const double pad = 1e-6 * norm(hi - lo);
    impl->box = {lo - Vec2{pad, pad}, hi + Vec2{pad, pad}};
    impl->cell = std::max(impl->box.hi.x - impl->box.lo.x, impl->box.hi.y - impl->box.lo.y) / kBucketsPerSide;
    impl->buckets.assign(kBucketsPerSide * kBucketsPerSide, {});
    for (int i = 0; i < kPolylineSize; ++i) {
        const Vec2 a = impl->vertex(i);
        const Vec2 b = impl->vertex(i + 1);
        const int i0 = impl->bucket_coord(std::min(a.x, b.x), impl->box.lo.x);
        const int i1 = impl->bucket_coord(std::max(a.x, b.x), impl->box.lo.x);
        const int j0 = impl->bucket_coord(std::min(a.y, b.y), impl->box.lo.y);
        const int j1 = impl->bucket_coord(std::max(a.y, b.y), impl->box.lo.y);
        for (int bj = j0; bj <= j1; ++bj)
            for (int bi = i0; bi <= i1; ++bi) impl->buckets[bj * kBucketsPerSide + bi].push_back(i);
    }
    for (int i = 0; i < kPolylineSize; i += 8)
        for (int j = i + 8; j < kPolylineSize; j += 8)
            impl->diameter = std::max(impl->diameter, norm(impl->poly[i] - impl->poly[j]));
    impl_ = impl;

    // A cell whose centre is farther from the curve than its half-diagonal
    // (plus the polyline sagitta margin) lies entirely on one side.
    auto sides = std::vector<signed char>(kBucketsPerSide * kBucketsPerSide, 0);
    const double reach = impl_->cell * (0.5 * std::numbers::sqrt2 + 0.05);
    for (int bj = 0; bj < kBucketsPerSide; ++bj) {
        for (int bi = 0; bi < kBucketsPerSide; ++bi) {
            const Vec2 c = impl_->box.lo + impl_->cell * Vec2{bi + 0.5, bj + 0.5};
            const double sd = project(c).signed_distance;
            if (std::abs(sd) > reach) sides[bj * kBucketsPerSide + bi] = sd > 0.0 ? 1 : -1;
        }
    }
    impl->bucket_side = std::move(sides);
}

int DomainCurve::side_hint(Vec2 p) const {
    const Impl& im = *impl_;
    if (p.x < im.box.lo.x || p.y < im.box.lo.y || p.x > im.box.hi.x || p.y > im.box.hi.y) return -1;
    const int bi = im.bucket_coord(p.x, im.box.lo.x);
    const int bj = im.bucket_coord(p.y, im.box.lo.y);
    return im.bucket_side[bj * kBucketsPerSide + bi];
}

DomainCurve DomainCurve::circle(double R, Vec2 center) {
    if (!(R > 0.0)) throw std::invalid_argument("circle radius must be positive");
    return DomainCurve("circle", [R, center](double t) {
        const double a = kTwoPi * t;
        const Vec2 u{std::cos(a), std::sin(a)};
        return CurveSample{center + R * u, kTwoPi * R * perp(u), -kTwoPi * kTwoPi * R * u};
    });
}

DomainCurve DomainCurve::ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
    return DomainCurve("ellipse", [a, b](double t) {
        const double p = kTwoPi * t;
        const double c = std::cos(p);
        const double s = std::sin(p);
        return CurveSample{{a * c, b * s}, {-kTwoPi * a * s, kTwoPi * b * c},
                           {-kTwoPi * kTwoPi * a * c, -kTwoPi * kTwoPi * b * s}};
    });
}

DomainCurve DomainCurve::egg(double amplitude) {
    if (!(std::abs(amplitude) < 1.0)) throw std::invalid_argument("egg amplitude must lie in (-1, 1)");
    return DomainCurve("egg", [amplitude](double t) {
        const double p = kTwoPi * t;
        const double c = std::cos(p);
        const double s = std::sin(p);
        const double r = 1.0 + amplitude * c;
        const double r1 = -amplitude * s;
        const double r2 = -amplitude * c;
        const Vec2 er{c, s};
        const Vec2 ep{-s, c};
        const Vec2 d1 = r1 * er + r * ep;
        const Vec2 d2 = (r2 - r) * er + 2.0 * r1 * ep;
        return CurveSample{r * er, kTwoPi * d1, kTwoPi * kTwoPi * d2};
    });
}

DomainCurve DomainCurve::stadium(double half_flat, double radius) {
    if (!(half_flat > 0.0) || !(radius > 0.0)) throw std::invalid_argument("stadium dimensions must be positive");
    const double L = half_flat;
    const double rho = radius;
    const double perimeter = 4.0 * L + kTwoPi * rho;
    const double s1 = 2.0 * L;
    const double s2 = s1 + std::numbers::pi * rho;
    const double s3 = s2 + 2.0 * L;
    auto eval = [=](double t) {
        const double s = wrap01(t) * perimeter;
        Vec2 x, d1, d2;
        if (s < s1) {
            x = {-L + s, -rho};
            d1 = {1.0, 0.0};
        } else if (s < s2) {
            const double a = -std::numbers::pi / 2 + (s - s1) / rho;
            const Vec2 u{std::cos(a), std::sin(a)};
            x = Vec2{L, 0.0} + rho * u;
            d1 = perp(u);
            d2 = -1.0 / rho * u;
        } else if (s < s3) {
            x = {L - (s - s2), rho};
            d1 = {-1.0, 0.0};
        } else {
            const double a = std::numbers::pi / 2 + (s - s3) / rho;
            const Vec2 u{std::cos(a), std::sin(a)};
            x = Vec2{-L, 0.0} + rho * u;
            d1 = perp(u);
            d2 = -1.0 / rho * u;
        }
        return CurveSample{x, perimeter * d1, perimeter * perimeter * d2};
    };
    return DomainCurve("stadium", eval, {0.0, s1 / perimeter, s2 / perimeter, s3 / perimeter});
}

const std::string& DomainCurve::name() const { return impl_->name; }

CurveSample DomainCurve::sample(double t) const { return impl_->eval(wrap01(t)); }

Vec2 DomainCurve::tangent(double t) const { return normalized(sample(t).dx); }

Vec2 DomainCurve::normal(double t) const { return perp(tangent(t)); }

double DomainCurve::curvature(double t) const {
    const CurveSample s = sample(t);
    const double speed = norm(s.dx);
    if (!(speed > 0.0)) throw GeometryError("degenerate parametrization (zero speed)");
    return cross(s.dx, s.ddx) / (speed * speed * speed);
}

std::span<const double> DomainCurve::breaks() const { return impl_->breaks; }

std::span<const Vec2> DomainCurve::polyline() const { return impl_->poly; }

Box DomainCurve::bounds() const { return impl_->box; }

double DomainCurve::diameter() const { return impl_->diameter; }

CurveProjection DomainCurve::project(Vec2 p) const {
    const auto [seg, param] = impl_->nearest_segment(p);
    const double dt = 1.0 / kPolylineSize;
    double t = (seg + param) * dt;

    // safeguarded Newton on phi(t) = (x(t) - p) . x'(t) over two segments around t
    double a = t - 2 * dt;
    double b = t + 2 * dt;
    auto phi = [&](double tt) {
        const CurveSample s = sample(tt);
        return std::pair{dot(s.x - p, s.dx), dot(s.dx, s.dx) + dot(s.x - p, s.ddx)};
    };
    double fa = phi(a).first;
    double fb = phi(b).first;
    if (fa < 0.0 && fb > 0.0) {
        for (int it = 0; it < 60; ++it) {
            const auto [f, df] = phi(t);
            if (f == 0.0) break;
            if (f < 0.0) a = t; else b = t;
            double next = df > 0.0 ? t - f / df : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            if (std::abs(next - t) <= 1e-16) {
                t = next;
                break;
            }
            t = next;
        }
    }
    const CurveSample s = sample(t);
    const Vec2 offset = p - s.x;
    const double dist = norm(offset);
    const double side = cross(s.dx, offset);
    CurveProjection out;
    out.t = wrap01(t);
    out.foot = s.x;
    out.signed_distance = side >= 0.0 ? dist : -dist;
    return out;
}

double DomainCurve::crossing(Vec2 inside, Vec2 outside) const {
    const Vec2 delta = outside - inside;
    const double len = norm(delta);
    const Vec2 d = delta / len;

    // first polyline crossing as a seed
    double best_s = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    const Impl& im = *impl_;
    const int i0 = im.bucket_coord(std::min(inside.x, outside.x), im.box.lo.x);
    const int i1 = im.bucket_coord(std::max(inside.x, outside.x), im.box.lo.x);
    const int j0 = im.bucket_coord(std::min(inside.y, outside.y), im.box.lo.y);
    const int j1 = im.bucket_coord(std::max(inside.y, outside.y), im.box.lo.y);
    for (int bj = j0; bj <= j1; ++bj) {
        for (int bi = i0; bi <= i1; ++bi) {
            for (int seg : im.bucket(bi, bj)) {
                const Vec2 a = im.vertex(seg);
                const Vec2 e = im.vertex(seg + 1) - a;
                const double den = cross(d, e);
                if (den == 0.0) continue;
                const Vec2 w = a - inside;
                const double s = cross(w, e) / den;
                const double q = cross(w, d) / den;
                if (q >= 0.0 && q <= 1.0 && s >= 0.0 && s <= len * (1 + 1e-9) && s < best_s) {
                    best_s = s;
                    best_t = (seg + q) / kPolylineSize;
                }
            }
        }
    }

    if (std::isfinite(best_s)) {
        // Newton on x(t) - inside - s d = 0
        double t = best_t;
        double s = best_s;
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            const CurveSample cs = sample(t);
            const Vec2 g = cs.x - inside - s * d;
            const double det = cross(cs.dx, -d);
            if (det == 0.0) break;
            const double dt = cross(g, -d) / det;
            const double ds = cross(cs.dx, g) / det;
            t -= dt;
            s -= ds;
            if (std::abs(dt) < 1e-13 && std::abs(ds) < 1e-13 * std::max(1.0, len)) {
                ok = true;
                break;
            }
        }
        if (ok && s > 0.0 && s <= len * (1 + 1e-9) && std::abs(s - best_s) < 0.5 * len) {
            return std::min(s, len);
        }
    }

    // fall back to bisection of the signed distance along the segment
    double lo = 0.0;
    double hi = len;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (signed_distance(inside + mid * d) > 0.0) lo = mid; else hi = mid;
    }
    return hi;
}

bool DomainCurve::is_simple(int samples) const {
    std::vector<Vec2> pts(samples);
    for (int i = 0; i < samples; ++i) pts[i] = point(static_cast<double>(i) / samples);
    auto intersect = [](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        const double d1 = cross(b - a, c - a);
        const double d2 = cross(b - a, d - a);
        const double d3 = cross(d - c, a - c);
        const double d4 = cross(d - c, b - c);
        return d1 * d2 < 0.0 && d3 * d4 < 0.0;
    };
    for (int i = 0; i < samples; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % samples];
        for (int j = i + 2; j < samples; ++j) {
            if (i == 0 && j == samples - 1) continue;
            if (intersect(a, b, pts[j], pts[(j + 1) % samples])) return false;
        }
    }
    return true;
}

// --- AnnularSector -----------------------------------------------------------

AnnularSector::AnnularSector(double theta, double r_in, double r_out)
    : theta_(theta), r_in_(r_in), r_out_(r_out) {
    if (!(theta > 0.0) || theta > std::numbers::pi + 1e-12) {
        throw std::invalid_argument("annular sector opening must lie in (0, pi]");
    }
    if (!(r_in >= 0.0) || !(r_out > r_in)) throw std::invalid_argument("annular sector radii must satisfy 0 <= r_in < r_out");
    side0_ = {1.0, 0.0};
    double c = std::cos(theta);
    double s = std::sin(theta);
    if (std::abs(c) < 1e-15) c = 0.0;
    if (std::abs(s) < 1e-15) s = 0.0;
    side1_ = {c, s};
}

double AnnularSector::angle(Vec2 p) const {
    double a = std::atan2(p.y, p.x);
    if (a < 0.0) a += kTwoPi;
    return a;
}

double AnnularSector::signed_distance(Vec2 p) const {
    const double r = norm(p);
    const double angular = std::min(cross(side0_, p), cross(p, side1_));
    return std::min({r - r_in_, r_out_ - r, angular});
}

double AnnularSector::crossing(Vec2 inside, Vec2 outside) const {
    const Vec2 delta = outside - inside;
    const double len = norm(delta);
    const Vec2 d = delta / len;
    double best = len;

    auto line_root = [&](double g0, double slope) {
        if (slope < 0.0) {
            const double s = -g0 / slope;
            if (s >= 0.0) best = std::min(best, s);
        }
    };
    line_root(cross(side0_, inside), cross(side0_, d));
    line_root(cross(inside, side1_), cross(d, side1_));

    // |inside + s d|^2 = rho^2  ->  s^2 + 2 b s + c = 0
    const double bq = dot(inside, d);
    const double c_out = dot(inside, inside) - r_out_ * r_out_;
    best = std::min(best, -bq + std::sqrt(std::max(bq * bq - c_out, 0.0)));
    if (r_in_ > 0.0) {
        const double c_in = dot(inside, inside) - r_in_ * r_in_;
        const double disc = bq * bq - c_in;
        if (disc >= 0.0) {
            const double s = -bq - std::sqrt(disc);
            if (s >= 0.0) best = std::min(best, s);
        }
    }
    return std::clamp(best, 0.0, len);
}

Box AnnularSector::bounds() const { return {{-r_out_, -r_out_}, {r_out_, r_out_}}; }

}  // namespace serrin
