#include "serrin/moving_planes.hpp"

#include "local_fit.hpp"
#include "serrin/errors.hpp"
#include "serrin/parallel.hpp"
#include "serrin/solver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace serrin {

namespace {

constexpr int kCapSamples = 2048;
constexpr double kContainTol = 1e-10;   // times diameter
constexpr double kBisectTol = 1e-9;     // times diameter
// Far from the plane a genuine contact has gap ~ 2 (s_star - s_true); an
// orthogonal crossing produces third-order contact that is much larger there.
constexpr double kTangencyTol = 1e-6;   // times diameter
constexpr double kTangencyGap = 0.02;   // times diameter
constexpr double kOrthogonalTol = 1e-4;

double height(const DomainCurve& c, Vec2 e, double t, double s) { return dot(c.point(t), e) - s; }

/// Parameter intervals [a, b] (b may exceed 1) on which x(t) . e > s.
struct CapGeometry {
    std::vector<std::pair<double, double>> arcs;
    std::vector<double> crossings;
};

CapGeometry cap_geometry(const DomainCurve& curve, Vec2 e, double s) {
    const auto poly = curve.polyline();
    const int n = static_cast<int>(poly.size());
    CapGeometry cap;
    std::vector<std::pair<double, bool>> events;  // (t, upward)
    for (int i = 0; i < n; ++i) {
        const double a = dot(poly[i], e) - s;
        const double b = dot(poly[(i + 1) % n], e) - s;
        if ((a > 0.0) == (b > 0.0)) continue;
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        const bool up = b > 0.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((height(curve, e, mid, s) > 0.0) == up ? hi : lo) = mid;
        }
        events.emplace_back(0.5 * (lo + hi), up);
    }
    for (const auto& ev : events) cap.crossings.push_back(ev.first);
    if (events.empty()) {
        if (dot(poly[0], e) > s) cap.arcs.emplace_back(0.0, 1.0);
        return cap;
    }
    const std::size_t m = events.size();
    for (std::size_t k = 0; k < m; ++k) {
        if (!events[k].second) continue;
        const std::size_t next = (k + 1) % m;
        double end = events[next].first;
        if (end <= events[k].first) end += 1.0;
        cap.arcs.emplace_back(events[k].first, end);
    }
    return cap;
}

/// Samples of one arc; the arcs share kCapSamples in proportion to length.
std::vector<double> arc_samples(const std::pair<double, double>& arc, const CapGeometry& cap) {
    double total = 0.0;
    for (const auto& [a, b] : cap.arcs) total += b - a;
    const auto [a, b] = arc;
    const int k = std::max(3, static_cast<int>(std::round(kCapSamples * (b - a) / total)));
    std::vector<double> ts(k);
    for (int i = 0; i < k; ++i) ts[i] = a + (b - a) * i / (k - 1);
    return ts;
}

struct PlaneState {
    bool inside = true;
    bool normal_ok = true;
    double min_gap = std::numeric_limits<double>::infinity();  // min |sd| away from the plane
    Vec2 touch;
    double min_normal = std::numeric_limits<double>::infinity();  // min |<nu, e>| at crossings
    Vec2 cross_point;
};

/// With `classify` false only the pass/fail flags are meaningful.
PlaneState plane_state(const DomainCurve& curve, Vec2 e, double s, bool classify) {
    const double diam = curve.diameter();
    const CapGeometry cap = cap_geometry(curve, e, s);
    PlaneState st;
    for (const auto& arc : cap.arcs) {
        const std::vector<double> ts = arc_samples(arc, cap);
        std::vector<double> gap;
        std::vector<Vec2> feet;
        for (double t : ts) {
            const Vec2 x = curve.point(t);
            const Vec2 q = reflect(x, e, s);
            if (!classify) {
                const int hint = curve.side_hint(q);
                if (hint < 0) {
                    st.inside = false;
                    return st;
                }
                if (hint > 0) continue;
            }
            const CurveProjection pr = curve.project(q);
            if (pr.signed_distance < -kContainTol * diam) {
                st.inside = false;
                if (!classify) return st;
            }
            gap.push_back(dot(x, e) - s > kTangencyGap * diam ? std::abs(pr.signed_distance)
                                                                : std::numeric_limits<double>::infinity());
            feet.push_back(pr.foot);
        }
        for (std::size_t i = 0; i < gap.size(); ++i) {
            if (gap[i] < st.min_gap) {
                st.min_gap = gap[i];
                st.touch = feet[i];
            }
        }
    }
    for (double t : cap.crossings) {
        const double c = dot(curve.normal(t), e);
        if (c >= 0.0) st.normal_ok = false;
        if (std::abs(c) < st.min_normal) {
            st.min_normal = std::abs(c);
            st.cross_point = curve.point(t);
        }
    }
    return st;
}

double support(const DomainCurve& curve, Vec2 e) {
    const auto poly = curve.polyline();
    const int n = static_cast<int>(poly.size());
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (dot(poly[i], e) > dot(poly[best], e)) best = i;
    double lo = static_cast<double>(best - 1) / n;
    double hi = static_cast<double>(best + 1) / n;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double a = hi - phi * (hi - lo);
        const double b = lo + phi * (hi - lo);
        if (dot(curve.point(a), e) < dot(curve.point(b), e)) lo = a;
        else hi = b;
    }
    return std::max(dot(curve.point(0.5 * (lo + hi)), e), dot(poly[best], e));
}

}  // namespace

double curvature(const DomainCurve& curve, double t) { return curve.curvature(t); }

std::string to_string(PlaneCase c) {
    switch (c) {
        case PlaneCase::tangency: return "tangency";
        case PlaneCase::orthogonality: return "orthogonality";
        case PlaneCase::both: return "both";
        case PlaneCase::unclassified: return "unclassified";
    }
    return "unclassified";
}

bool cap_reflects_inside(const DomainCurve& curve, Vec2 e, double s) {
    const PlaneState st = plane_state(curve, e, s, false);
    return st.inside && st.normal_ok;
}

MovingPlaneReport critical_position(const DomainCurve& curve, Vec2 e, double ds) {
    if (std::abs(norm(e) - 1.0) > 1e-12) throw std::invalid_argument("direction e must be a unit vector");
    const double diam = curve.diameter();
    if (!(ds > 0.0) || ds > diam / 1000.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("scan step ds must lie in (0, diameter / 1000]");
    }
    MovingPlaneReport rep;
    rep.e = e;
    rep.d0 = support(curve, e);

    double hi = rep.d0;
    double lo = rep.d0;
    const double floor = rep.d0 - 2.0 * diam;
    for (int k = 1;; ++k) {
        const double s = rep.d0 - k * ds;
        if (s < floor) throw GeometryError("moving plane never stopped inside the domain");
        if (!cap_reflects_inside(curve, e, s)) {
            if (k == 1) throw GeometryError("containment test inconclusive at resolution ds; refine the scan step");
            lo = s;
            break;
        }
        hi = s;
    }
    while (hi - lo > kBisectTol * diam) {
        const double mid = 0.5 * (lo + hi);
        (cap_reflects_inside(curve, e, mid) ? hi : lo) = mid;
    }
    rep.s_star = hi;

    const PlaneState st = plane_state(curve, e, rep.s_star, true);
    const bool tangent = st.min_gap <= kTangencyTol * diam;
    const bool orthogonal = st.min_normal <= kOrthogonalTol;
    rep.kind = tangent && orthogonal ? PlaneCase::both
               : tangent             ? PlaneCase::tangency
               : orthogonal          ? PlaneCase::orthogonality
                                     : PlaneCase::unclassified;
    rep.witness = tangent ? st.touch : st.cross_point;
    return rep;
}

ReflectionStats reflect_and_compare(const Field& field, Vec2 e, double s) {
    const Grid& g = field.grid();
    ReflectionStats out;
    out.sup_w = -std::numeric_limits<double>::infinity();
    out.min_w = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Vec2 x = g.node(n).x;
        if (dot(x, e) <= s) continue;
        const double w = field.interpolate(reflect(x, e, s)) - field[n];
        out.sup_w = std::max(out.sup_w, w);
        out.min_w = std::min(out.min_w, w);
        out.sup_abs = std::max(out.sup_abs, std::abs(w));
        ++out.nodes;
    }
    if (out.nodes == 0) out.sup_w = out.min_w = 0.0;
    return out;
}

BoundaryExpansionReport boundary_expansion_check(const Field& field, const DomainCurve& curve, int samples,
                                                 double tol_geom) {
    if (samples < 1) throw std::invalid_argument("boundary_expansion_check needs at least one sample");
    const Grid& g = field.grid();
    const double rho = 4.0 * g.h();
    BoundaryExpansionReport rep;
    rep.max_u_nunu = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / samples;
        const Vec2 xb = curve.point(t);
        const Vec2 tau = curve.tangent(t);
        std::vector<detail::FitSample> pts;
        for (int n : g.nodes_within(xb, rho)) {
            const double d = norm(g.node(n).x - xb);
            pts.push_back({g.node(n).x, field[n], std::pow(1.0 - d / rho, 2)});
        }
        for (int b : g.boundary_points_within(xb, rho)) {
            const double d = norm(g.boundary_points()[b] - xb);
            pts.push_back({g.boundary_points()[b], field.boundary_values()[b], std::pow(1.0 - d / rho, 2)});
        }
        const auto fit = detail::fit_quadratic(pts, xb, tau, g.h(), true);
        if (!fit) throw GeometryError("insufficient nodes for the boundary quadratic fit at t=" + std::to_string(t));

        BoundaryExpansionSample s;
        s.t = t;
        s.x = xb;
        s.c0 = std::hypot(fit->g1, fit->g2);
        s.mu_tau = fit->h11;
        s.a_taunu = fit->h12;
        s.u_nunu = fit->h22;
        s.kappa = curve.curvature(t);
        s.residual = std::abs(s.mu_tau + s.c0 * s.kappa);
        rep.mean_c0 += s.c0 / samples;
        rep.max_curvature_residual = std::max(rep.max_curvature_residual, s.residual);
        rep.max_mixed = std::max(rep.max_mixed, std::abs(s.a_taunu));
        rep.max_u_nunu = std::max(rep.max_u_nunu, s.u_nunu);
        rep.samples.push_back(s);
    }
    rep.tol_geom = tol_geom > 0.0 ? tol_geom : 0.05 * rep.mean_c0;
    rep.curvature_pass = rep.max_curvature_residual <= rep.tol_geom;
    rep.mixed_pass = rep.max_mixed <= rep.tol_geom;
    return rep;
}

NormalSecondDerivative u_nn_check(const Field& field, const DomainCurve& curve, int samples, double tol_geom) {
    const BoundaryExpansionReport rep = boundary_expansion_check(field, curve, samples, tol_geom);
    return {rep.max_u_nunu, rep.tol_geom, rep.max_u_nunu < -rep.tol_geom};
}

double gauss_map_measure(const DomainCurve& curve, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("curvature threshold eps must be nonnegative");
    static constexpr std::array<double, 8> node{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> weight{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                  0.2223810344533745, 0.1012285362903763};
    std::vector<double> cuts{0.0, 1.0};
    for (double b : curve.breaks()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    constexpr int kPanels = 256;
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p];
        const double len = cuts[p + 1] - a;
        if (len <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(kPanels * len)));
        const double w = len / panels;
        for (int q = 0; q < panels; ++q) {
            const double mid = a + (q + 0.5) * w;
            for (int i = 0; i < 8; ++i) {
                const double t = mid + 0.5 * w * node[i];
                const CurveSample cs = curve.sample(t);
                const double speed = norm(cs.dx);
                const double kappa = cross(cs.dx, cs.ddx) / (speed * speed * speed);
                if (std::abs(kappa) <= eps) total += 0.5 * w * weight[i] * std::abs(kappa) * speed;
            }
        }
    }
    return total;
}

std::string SymmetryVerdict::verdict() const {
    if (!all_symmetric) return "not-ball";
    return sufficient_coverage ? "ball" : "insufficient-coverage";
}

SymmetryVerdict symmetry_verdict(const Field& field, const DomainCurve& curve, double tol, int directions,
                                 double ds_fraction, int threads) {
    if (directions < 1) throw std::invalid_argument("symmetry_verdict needs at least one direction");
    SymmetryVerdict out;
    out.threshold = 2.0 * tol;
    out.rows.resize(directions);
    const double ds = ds_fraction * curve.diameter();
    parallel_chunks(static_cast<std::size_t>(directions), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / directions;
            const Vec2 e{std::cos(a), std::sin(a)};
            MovingPlaneReport rep = critical_position(curve, e, ds);
            const ReflectionStats w = reflect_and_compare(field, e, rep.s_star);
            rep.sup_w = w.sup_abs;
            rep.min_w = w.min_w;
            out.rows[k] = rep;
        }
    });
    out.all_symmetric = std::all_of(out.rows.begin(), out.rows.end(),
                                    [&](const MovingPlaneReport& r) { return r.sup_w <= out.threshold; });
    out.sufficient_coverage = directions >= 4;
    return out;
}

SymmetryVerdict symmetry_verdict(const DomainCurve& curve, const OperatorSpec& spec, const SourceSpec& f,
                                 const VerdictParams& params) {
    SolveParams sp;
    sp.tol = params.tol;
    sp.threads = params.threads;
    const Solution sol = solve(spec, f, build_grid(curve, params.h, params.K), sp);
    return symmetry_verdict(sol.field, curve, params.tol, params.directions, params.ds_fraction, params.threads);
}

void write_planes_csv(std::ostream& out, const SymmetryVerdict& verdict) {
    const auto old = out.precision(12);
    out << "e_x,e_y,s_star,case,sup_w,min_w\n";
    for (const auto& r : verdict.rows) {
        out << r.e.x << ',' << r.e.y << ',' << r.s_star << ',' << to_string(r.kind) << ',' << r.sup_w << ','
            << r.min_w << '\n';
    }
    out.precision(old);
}

void write_verdict_json(std::ostream& out, const SymmetryVerdict& verdict) {
    nlohmann::ordered_json j;
    j["verdict"] = verdict.verdict();
    j["directions"] = verdict.rows.size();
    j["threshold"] = verdict.threshold;
    j["all_symmetric"] = verdict.all_symmetric;
    j["sufficient_coverage"] = verdict.sufficient_coverage;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : verdict.rows) {
        rows.push_back({{"e", {r.e.x, r.e.y}},
                        {"d0", r.d0},
                        {"s_star", r.s_star},
                        {"case", to_string(r.kind)},
                        {"witness", {r.witness.x, r.witness.y}},
                        {"sup_w", r.sup_w},
                        {"min_w", r.min_w}});
    }
    out << j.dump(2) << '\n';
}

void write_expansion_csv(std::ostream& out, const BoundaryExpansionReport& report) {
    const auto old = out.precision(12);
    out << "t,x,y,c0,mu_tau,u_nunu,a_taunu,kappa,residual\n";
    for (const auto& s : report.samples) {
        out << s.t << ',' << s.x.x << ',' << s.x.y << ',' << s.c0 << ',' << s.mu_tau << ',' << s.u_nunu << ','
            << s.a_taunu << ',' << s.kappa << ',' << s.residual << '\n';
    }
    out.precision(old);
}

}  // namespace serrin
