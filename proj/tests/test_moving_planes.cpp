#include "serrin/errors.hpp"
#include "serrin/moving_planes.hpp"
#include "serrin/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace serrin {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-6;

Field torsion(const DomainCurve& curve, const OperatorSpec& spec, double h = 1.0 / 64) {
    SolveParams p;
    p.tol = kTol;
    return solve(spec, SourceSpec::constant(1), build_grid(curve, h), p).field;
}

/// Egg r(phi) = 1 + a cos(phi) with e = (1, 0): dense analytic scan for the
/// first s at which the reflected cap leaves the closed domain or the
/// interior normal on the plane stops pointing against e.
double egg_brute_force_s_star(double a, double step) {
    const int n = 20000;
    auto inside = [a](Vec2 p) { return std::hypot(p.x, p.y) <= 1 + a * std::cos(std::atan2(p.y, p.x)) + 1e-12; };
    auto point = [a](double phi) { return (1 + a * std::cos(phi)) * Vec2{std::cos(phi), std::sin(phi)}; };
    for (double s = 1 + a - step; s > -1; s -= step) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            const Vec2 p = point(2 * kPi * i / n);
            if (p.x > s) ok = inside({2 * s - p.x, p.y});
        }
        // Upper crossing of the plane: the interior normal is -perp of the ccw tangent.
        double lo = 0.0;
        double hi = kPi;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (point(mid).x > s ? lo : hi) = mid;
        }
        const double phi = 0.5 * (lo + hi);
        const Vec2 tangent{-(1 + a * std::cos(phi)) * std::sin(phi) - a * std::sin(phi) * std::cos(phi),
                           (1 + a * std::cos(phi)) * std::cos(phi) - a * std::sin(phi) * std::sin(phi)};
        const Vec2 nu = perp(normalized(tangent));
        if (!ok || nu.x >= 0.0) return s;
    }
    return -1;
}

TEST(Curvature, FrozenExamples) {
    for (double t : {0.0, 0.21, 0.5, 0.9}) {
        EXPECT_NEAR(curvature(DomainCurve::circle(1.0), t), 1.0, 1e-12);
        EXPECT_NEAR(curvature(DomainCurve::circle(2.0), t), 0.5, 1e-12);
    }
    const DomainCurve e = DomainCurve::ellipse(1.5, 1.0);
    EXPECT_NEAR(curvature(e, 0.0), 1.5, 1e-12);
    // finite difference of the tangent angle per unit arc length
    const double dt = 1e-5;
    for (double t : {0.1, 0.3, 0.62}) {
        const Vec2 a = e.tangent(t - dt);
        const Vec2 b = e.tangent(t + dt);
        const double dangle = std::atan2(cross(a, b), dot(a, b));
        const double ds = norm(e.point(t + dt) - e.point(t - dt));
        EXPECT_NEAR(curvature(e, t), dangle / ds, 1e-6);
    }
}

TEST(CriticalPosition, DiskIsSymmetric) {
    const MovingPlaneReport r = critical_position(DomainCurve::circle(1.0), {1, 0}, 2e-3);
    EXPECT_NEAR(r.d0, 1.0, 1e-12);
    EXPECT_NEAR(r.s_star, 0.0, 1e-3);
    EXPECT_EQ(r.kind, PlaneCase::both);
}

TEST(CriticalPosition, EllipseAxisIsSymmetric) {
    const MovingPlaneReport r = critical_position(DomainCurve::ellipse(1.5, 1.0), {1, 0}, 3e-3);
    EXPECT_NEAR(r.s_star, 0.0, 1e-3);
    const MovingPlaneReport v = critical_position(DomainCurve::ellipse(1.5, 1.0), {0, 1}, 3e-3);
    EXPECT_NEAR(v.s_star, 0.0, 1e-3);
}

TEST(CriticalPosition, EggMatchesBruteForceScan) {
    const DomainCurve egg = DomainCurve::egg(0.2);
    const double ds = egg.diameter() / 1000;
    const MovingPlaneReport r = critical_position(egg, {1, 0}, ds);
    const double oracle = egg_brute_force_s_star(0.2, ds / 10);
    EXPECT_NEAR(r.s_star, oracle, 2 * ds);
    EXPECT_EQ(r.kind, PlaneCase::tangency);
    EXPECT_NEAR(r.witness.x, 2 * r.s_star - 1.2, 1e-3);
    EXPECT_NEAR(r.witness.y, 0.0, 1e-3);
}

TEST(CriticalPosition, OrthogonalWitnessHasTangentialNormal) {
    const DomainCurve ellipse = DomainCurve::ellipse(1.5, 1.0);
    const Vec2 e = normalized({1, 1});
    const MovingPlaneReport r = critical_position(ellipse, e, ellipse.diameter() / 1000);
    ASSERT_EQ(r.kind, PlaneCase::orthogonality);
    const CurveProjection q = ellipse.project(r.witness);
    EXPECT_NEAR(q.signed_distance, 0.0, 1e-8);
    EXPECT_NEAR(dot(r.witness, e), r.s_star, 1e-8);
    EXPECT_LE(std::abs(dot(ellipse.normal(q.t), e)), 1e-4);
}

TEST(CriticalPosition, CapsReflectInsideAboveTheCriticalPosition) {
    const DomainCurve egg = DomainCurve::egg(0.2);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        const double a = angle(rng);
        const Vec2 e{std::cos(a), std::sin(a)};
        const MovingPlaneReport r = critical_position(egg, e, egg.diameter() / 1000);
        EXPECT_LE(r.s_star, r.d0);
        for (int k = 0; k < 5; ++k) {
            const double s = r.s_star + (r.d0 - r.s_star) * (0.01 + 0.98 * u(rng));
            EXPECT_TRUE(cap_reflects_inside(egg, e, s)) << a << ' ' << s;
        }
    }
}

TEST(CriticalPosition, Errors) {
    const DomainCurve disk = DomainCurve::circle(1.0);
    EXPECT_THROW(critical_position(disk, {1, 0}, 0.1), std::invalid_argument);
    EXPECT_THROW(critical_position(disk, {1, 0}, 0.0), std::invalid_argument);
}

TEST(ReflectAndCompare, DiskTorsion) {
    const Field u = torsion(DomainCurve::circle(1.0), OperatorSpec::laplacian());
    const ReflectionStats at0 = reflect_and_compare(u, {1, 0}, 0.0);
    EXPECT_LE(at0.sup_abs, 2 * kTol);
    EXPECT_GT(at0.nodes, 0u);
    const ReflectionStats at2 = reflect_and_compare(u, {1, 0}, 0.2);
    EXPECT_GE(at2.min_w, -2 * kTol);
    EXPECT_GT(at2.sup_w, 0.0);
}

TEST(ReflectAndCompare, EllipseMajorAxis) {
    const Field u = torsion(DomainCurve::ellipse(1.5, 1.0), OperatorSpec::laplacian());
    EXPECT_LE(reflect_and_compare(u, {1, 0}, 0.0).sup_abs, 2 * kTol);
    EXPECT_THROW(reflect_and_compare(u, {1, 0}, -0.5), GeometryError);
}

TEST(ReflectAndCompare, PositiveAboveCriticalPositionOnEgg) {
    const DomainCurve egg = DomainCurve::egg(0.2);
    const Field u = torsion(egg, OperatorSpec::minus(1, 2), 1.0 / 32);
    const MovingPlaneReport r = critical_position(egg, {1, 0}, egg.diameter() / 1000);
    for (int k = 1; k <= 8; ++k) {
        const double s = r.s_star + (r.d0 - r.s_star) * k / 10.0;
        EXPECT_GE(reflect_and_compare(u, {1, 0}, s).min_w, -2 * kTol) << s;
    }
}

TEST(BoundaryExpansion, DiskLaplacian) {
    const DomainCurve disk = DomainCurve::circle(1.0);
    const BoundaryExpansionReport r = boundary_expansion_check(torsion(disk, OperatorSpec::laplacian()), disk, 64);
    ASSERT_EQ(r.samples.size(), 64u);
    for (const auto& s : r.samples) {
        EXPECT_NEAR(s.c0, 0.5, 1e-6);
        EXPECT_NEAR(s.mu_tau, -0.5, 1e-6);
        EXPECT_NEAR(s.u_nunu, -0.5, 1e-6);
        EXPECT_NEAR(s.a_taunu, 0.0, 1e-6);
    }
    EXPECT_NEAR(r.tol_geom, 0.025, 1e-6);
    EXPECT_TRUE(r.curvature_pass);
    EXPECT_TRUE(r.mixed_pass);
}

TEST(BoundaryExpansion, DiskPucci) {
    const DomainCurve disk = DomainCurve::circle(1.0);
    const BoundaryExpansionReport r = boundary_expansion_check(torsion(disk, OperatorSpec::minus(1, 2)), disk, 64);
    for (const auto& s : r.samples) {
        EXPECT_NEAR(s.mu_tau, -0.25, 1e-6);
        EXPECT_NEAR(s.mu_tau, -s.c0, 1e-6);
    }
}

TEST(BoundaryExpansion, EllipseAtTheMajorVertex) {
    const DomainCurve ellipse = DomainCurve::ellipse(1.5, 1.0);
    const BoundaryExpansionReport r =
        boundary_expansion_check(torsion(ellipse, OperatorSpec::laplacian()), ellipse, 64);
    const BoundaryExpansionSample& v = r.samples[0];
    EXPECT_NEAR(v.x.x, 1.5, 1e-12);
    EXPECT_NEAR(v.mu_tau, -2.25 / 3.25, 1e-6);
    EXPECT_NEAR(v.c0 * v.kappa, 2.25 / 3.25, 1e-6);
    EXPECT_NEAR(v.u_nunu, -1.0 / 3.25, 1e-6);
    EXPECT_TRUE(r.curvature_pass);
    // The mixed entry is the tangential derivative of |Du|, nonzero away from the vertices.
    EXPECT_GT(r.max_mixed, 0.1);
    EXPECT_FALSE(r.mixed_pass);
}

TEST(UNnCheck, NegativeOnTorsionSolutions) {
    const DomainCurve disk = DomainCurve::circle(1.0);
    const NormalSecondDerivative lap = u_nn_check(torsion(disk, OperatorSpec::laplacian()), disk, 64);
    EXPECT_NEAR(lap.max_u_nunu, -0.5, 1e-6);
    EXPECT_TRUE(lap.pass);
    const NormalSecondDerivative pm = u_nn_check(torsion(disk, OperatorSpec::minus(1, 2)), disk, 64);
    EXPECT_NEAR(pm.max_u_nunu, -0.25, 1e-6);
    EXPECT_TRUE(pm.pass);
    const DomainCurve ellipse = DomainCurve::ellipse(1.5, 1.0);
    const NormalSecondDerivative el = u_nn_check(torsion(ellipse, OperatorSpec::laplacian()), ellipse, 64);
    EXPECT_NEAR(el.max_u_nunu, -1.0 / 3.25, 1e-6);
    EXPECT_TRUE(el.pass);
}

TEST(GaussMap, FlatNormalsFormNullSets) {
    EXPECT_EQ(gauss_map_measure(DomainCurve::circle(1.0), 0.01), 0.0);
    EXPECT_EQ(gauss_map_measure(DomainCurve::stadium(1.0, 0.5), 1e-6), 0.0);
    EXPECT_EQ(gauss_map_measure(DomainCurve::ellipse(1.5, 1.0), 0.0), 0.0);
    // Arcs of curvature 2 are excluded below eps = 1.5; the flats contribute nothing.
    EXPECT_EQ(gauss_map_measure(DomainCurve::stadium(1.0, 0.5), 1.5), 0.0);
}

TEST(GaussMap, TotalCurvatureOfConvexCurvesIsTwoPi) {
    const DomainCurve curves[] = {DomainCurve::circle(3.0), DomainCurve::ellipse(1.5, 1.0), DomainCurve::egg(0.2),
                                  DomainCurve::stadium(1.0, 0.5)};
    for (const auto& c : curves) EXPECT_NEAR(gauss_map_measure(c, 1e9), 2 * kPi, 1e-6) << c.name();
    EXPECT_THROW(gauss_map_measure(DomainCurve::circle(1.0), -1.0), std::invalid_argument);
}

TEST(SymmetryVerdict, DiskIsBall) {
    VerdictParams p;
    p.h = 1.0 / 32;
    p.directions = 8;
    p.threads = 4;
    const SymmetryVerdict v = symmetry_verdict(DomainCurve::circle(1.0), OperatorSpec::minus(1, 2),
                                               SourceSpec::constant(1), p);
    ASSERT_EQ(v.rows.size(), 8u);
    for (const auto& r : v.rows) {
        EXPECT_NEAR(r.s_star, 0.0, 1e-3);
        EXPECT_LE(r.sup_w, v.threshold);
    }
    EXPECT_EQ(v.verdict(), "ball");
}

TEST(SymmetryVerdict, EllipseIsNotBall) {
    VerdictParams p;
    p.h = 1.0 / 32;
    p.directions = 8;
    p.threads = 4;
    const SymmetryVerdict v = symmetry_verdict(DomainCurve::ellipse(1.5, 1.0), OperatorSpec::laplacian(),
                                               SourceSpec::constant(1), p);
    for (int axis : {0, 2, 4, 6}) EXPECT_LE(v.rows[axis].sup_w, v.threshold) << axis;
    EXPECT_GT(v.rows[1].sup_w, 100 * v.threshold);
    EXPECT_EQ(v.verdict(), "not-ball");
}

TEST(SymmetryVerdict, SingleDirectionIsInsufficient) {
    VerdictParams p;
    p.h = 1.0 / 32;
    p.directions = 1;
    const SymmetryVerdict v = symmetry_verdict(DomainCurve::circle(1.0), OperatorSpec::laplacian(),
                                               SourceSpec::constant(1), p);
    EXPECT_TRUE(v.all_symmetric);
    EXPECT_EQ(v.verdict(), "insufficient-coverage");
}

TEST(SymmetryVerdict, ThreadCountDoesNotChangeRows) {
    const DomainCurve egg = DomainCurve::egg(0.2);
    const Field u = torsion(egg, OperatorSpec::laplacian(), 1.0 / 32);
    std::ostringstream a;
    std::ostringstream b;
    write_planes_csv(a, symmetry_verdict(u, egg, kTol, 6, 1e-3, 1));
    write_planes_csv(b, symmetry_verdict(u, egg, kTol, 6, 1e-3, 3));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, 31), "e_x,e_y,s_star,case,sup_w,min_w");
}

TEST(Reports, ExpansionAndVerdictFormats) {
    const DomainCurve disk = DomainCurve::circle(1.0);
    const Field u = torsion(disk, OperatorSpec::laplacian(), 1.0 / 16);
    std::ostringstream csv;
    write_expansion_csv(csv, boundary_expansion_check(u, disk, 16));
    EXPECT_EQ(csv.str().substr(0, 47), "t,x,y,c0,mu_tau,u_nunu,a_taunu,kappa,residual\n0");
    std::ostringstream json;
    write_verdict_json(json, symmetry_verdict(u, disk, kTol, 4));
    EXPECT_NE(json.str().find("\"verdict\": \"ball\""), std::string::npos);
    EXPECT_EQ(to_string(PlaneCase::orthogonality), "orthogonality");
}

}  // namespace
}  // namespace serrin
