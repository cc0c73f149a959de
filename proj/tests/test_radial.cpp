#include "serrin/errors.hpp"
#include "serrin/radial.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace serrin {
namespace {

TEST(RadialHessian, FrozenExamples) {
    const auto [a, b] = radial_hessian_eigs(2 * 0.5, 2, 0.5);
    EXPECT_DOUBLE_EQ(a, 2.0);
    EXPECT_DOUBLE_EQ(b, 2.0);
    const auto [c, d] = radial_hessian_eigs(-0.5, -0.5, 1.0);
    EXPECT_DOUBLE_EQ(c, -0.5);
    EXPECT_DOUBLE_EQ(d, -0.5);
    const auto [e, f] = radial_hessian_eigs(1.0, 0.0, 2.0);
    EXPECT_DOUBLE_EQ(e, 0.0);
    EXPECT_DOUBLE_EQ(f, 0.5);
    EXPECT_THROW(radial_hessian_eigs(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(SolveRadial, TorsionLaplacian) {
    const RadialProfile p = solve_radial(OperatorSpec::laplacian(), SourceSpec::constant(1), 1.0, 1e-3);
    EXPECT_NEAR(p.center_value(), 0.25, 1e-8);
    EXPECT_NEAR(p.c0, 0.5, 1e-8);
    EXPECT_NEAR(p.value_at(0.5), (1 - 0.25) / 4, 1e-8);
}

TEST(SolveRadial, TorsionPucciMinus) {
    const RadialProfile p = solve_radial(OperatorSpec::minus(1, 2), SourceSpec::constant(1), 1.0, 1e-3);
    EXPECT_NEAR(p.center_value(), 0.125, 1e-8);
    EXPECT_NEAR(p.c0, 0.25, 1e-8);
}

TEST(SolveRadial, TorsionScaling) {
    const RadialProfile p = solve_radial(OperatorSpec::laplacian(), SourceSpec::constant(1), 2.0, 2e-3);
    EXPECT_NEAR(p.center_value(), 1.0, 1e-8);
    EXPECT_NEAR(p.c0, 1.0, 1e-8);
}

TEST(ClosedForm, FrozenExamples) {
    EXPECT_DOUBLE_EQ(closed_form_disk_torsion(1, 2, 1).center_value(), 0.125);
    EXPECT_DOUBLE_EQ(closed_form_disk_torsion(1, 1, 1).center_value(), 0.25);
    EXPECT_DOUBLE_EQ(closed_form_disk_torsion(1, 4, 2).center_value(), 0.25);
}

TEST(SolveRadial, AgreesWithClosedFormOverParameterGrid) {
    for (double lambda : {0.5, 1.0}) {
        for (double ratio : {1.0, 2.0, 5.0}) {
            for (double R : {0.5, 1.0, 3.0}) {
                const double Lambda = lambda * ratio;
                const RadialProfile num = solve_radial(OperatorSpec::minus(lambda, Lambda), SourceSpec::constant(1),
                                                       R, R / 1000);
                const RadialProfile ref = closed_form_disk_torsion(lambda, Lambda, R);
                double err = 0.0;
                for (std::size_t i = 0; i < num.r.size(); ++i) {
                    err = std::max(err, std::abs(num.u[i] - ref.value_at(num.r[i])));
                }
                EXPECT_LE(err, 1e-8) << lambda << ' ' << Lambda << ' ' << R;
                EXPECT_NEAR(num.c0, ref.c0, 1e-8);
            }
        }
    }
}

TEST(SolveRadial, LinearSourceMatchesBessel) {
    // Delta u + a + b u = 0 in B_1: u = (a / b) (J0(sqrt(b) r) / J0(sqrt(b)) - 1).
    const double a = 1.0;
    const double b = 2.0;
    const RadialProfile p = solve_radial(OperatorSpec::laplacian(), SourceSpec::affine(a, b), 1.0, 1e-3);
    const double sb = std::sqrt(b);
    for (double r : {0.0, 0.3, 0.7, 0.95}) {
        const double exact = a / b * (std::cyl_bessel_j(0.0, sb * r) / std::cyl_bessel_j(0.0, sb) - 1.0);
        EXPECT_NEAR(p.value_at(r), exact, 1e-8) << r;
    }
}

TEST(SolveRadial, ProfileIsPositiveAndDecreasing) {
    const RadialProfile p =
        solve_radial(OperatorSpec::minus(1, 3, 0.5, -1), SourceSpec::affine(1.0, -0.5), 1.0, 1e-3);
    for (std::size_t i = 0; i + 1 < p.u.size(); ++i) {
        EXPECT_GT(p.u[i], 0.0);
        EXPECT_GE(p.u[i], p.u[i + 1]);
    }
    EXPECT_NEAR(p.u.back(), 0.0, 1e-10);
}

TEST(SolveRadial, RescaledOperatorGivesScaledProfile) {
    const OperatorSpec spec = OperatorSpec::minus(1, 2, 0.3, -1);
    const SourceSpec f = SourceSpec::affine(1.0, -0.2);
    const double R = 4.0;
    const RadialProfile u = solve_radial(spec, f, 1.0, 1e-3);
    const RadialProfile v = solve_radial(rescale_operator(spec, R), f.rescaled(R), 1.0, 1e-3);
    for (double r : {0.0, 0.25, 0.5, 0.9}) EXPECT_NEAR(v.value_at(r), u.value_at(r) / R, 1e-9);
    EXPECT_NEAR(v.c0, u.c0 / R, 1e-9);
}

TEST(SolveRadial, Errors) {
    EXPECT_THROW(solve_radial(OperatorSpec::laplacian(), SourceSpec::constant(1), 0.0, 1e-3), std::invalid_argument);
    EXPECT_THROW(solve_radial(OperatorSpec::laplacian(), SourceSpec::constant(1), 1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(solve_radial(OperatorSpec::laplacian(), SourceSpec::constant(0), 1.0, 1e-3), NumericalError);
}

TEST(RadialProfile, CsvHeader) {
    std::ostringstream out;
    write_profile_csv(out, closed_form_disk_torsion(1, 1, 1, 0.5));
    EXPECT_EQ(out.str().substr(0, 4), "r,u\n");
}

}  // namespace
}  // namespace serrin
