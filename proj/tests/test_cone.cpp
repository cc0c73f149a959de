#include "serrin/cone.hpp"
#include "serrin/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace serrin {
namespace {

constexpr double kPi = std::numbers::pi;
// Regression constant: first verified run, cross-checked by the grid decay fit.
constexpr double kPucciQuarterBeta = 2.5598397;

TEST(PolarHessian, FrozenExamples) {
    const double phi = 0.37;
    const EigenPair xy = eig2(polar_hessian(2, std::sin(2 * phi) / 2, std::cos(2 * phi), -2 * std::sin(2 * phi), 1));
    EXPECT_NEAR(xy.mu1, -1.0, 1e-14);
    EXPECT_NEAR(xy.mu2, 1.0, 1e-14);
    for (double r : {0.5, 1.0, 3.0}) {
        const SymMat2 m = polar_hessian(2, 1, 0, 0, r);
        EXPECT_NEAR(m.a11, 2.0, 1e-14);
        EXPECT_NEAR(m.a12, 0.0, 1e-14);
        EXPECT_NEAR(m.a22, 2.0, 1e-14);
    }
    const SymMat2 cone = polar_hessian(1, 1, 0, 0, 2);
    EXPECT_NEAR(cone.a11, 0.0, 1e-15);
    EXPECT_NEAR(cone.a12, 0.0, 1e-15);
    EXPECT_NEAR(cone.a22, 0.5, 1e-15);
}

TEST(ResolveG2, FrozenExamples) {
    EXPECT_NEAR(resolve_g2(2, 1, 0, OperatorSpec::laplacian()), -4.0, 1e-12);
    EXPECT_NEAR(resolve_g2(2, 0, 1, OperatorSpec::minus(1, 2)), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(resolve_g2(3, 2, 5, OperatorSpec::laplacian()), -18.0, 1e-12);
    EXPECT_THROW(resolve_g2(2, 1, 0, OperatorSpec::minus(1, 2, 0.5)), std::invalid_argument);
}

TEST(ResolveG2, RootAnnihilatesTheOperator) {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double lambda = 0.2 + u(rng);
        const OperatorSpec spec = OperatorSpec::minus(lambda, lambda * (1 + 4 * u(rng)));
        const double beta = 0.5 + 5 * u(rng);
        const double g = 2 * u(rng);
        const double g1 = 4 * u(rng) - 2;
        const double g2 = resolve_g2(beta, g, g1, spec);
        const double scale = spec.Lambda * (1 + beta * beta * (g + std::abs(g1)) + std::abs(g2));
        ASSERT_NEAR(pucci(spec, polar_hessian(beta, g, g1, g2, 1)), 0.0, 1e-12 * scale) << "sample " << i;
    }
}

TEST(ResolveG2, PositivelyHomogeneousInTheState) {
    // The angular ODE is 1-homogeneous in (g, g'), so trajectories scale with g'(0).
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const OperatorSpec spec = OperatorSpec::minus(1, 1 + 3 * u(rng));
        const double beta = 0.5 + 5 * u(rng);
        const double g = u(rng);
        const double g1 = 2 * u(rng) - 1;
        const double s = std::pow(10.0, 4 * u(rng) - 2);
        const double base = resolve_g2(beta, g, g1, spec);
        ASSERT_NEAR(resolve_g2(beta, s * g, s * g1, spec), s * base,
                    1e-12 * s * (1 + beta * beta) * (1 + std::abs(base))) << "sample " << i;
    }
}

TEST(Shoot, FrozenExamples) {
    EXPECT_NEAR(*shoot(2, OperatorSpec::laplacian(), 2 * kPi), kPi / 2, 1e-9);
    EXPECT_NEAR(*shoot(3, OperatorSpec::laplacian(), 2 * kPi), kPi / 3, 1e-9);
    EXPECT_GT(*shoot(2, OperatorSpec::minus(1, 2), 2 * kPi), kPi / 2);
    EXPECT_FALSE(shoot(2, OperatorSpec::laplacian(), 1.0).has_value());
}

TEST(Shoot, FirstZeroIndependentOfInitialSlope) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const OperatorSpec spec = OperatorSpec::minus(1, 1 + 3 * u(rng));
        const double beta = 1 + 3 * u(rng);
        const double slope = std::pow(10.0, 4 * u(rng) - 2);
        const auto a = shoot(beta, spec, 2 * kPi);
        const auto b = shoot(beta, spec, 2 * kPi, slope);
        ASSERT_TRUE(a && b);
        ASSERT_NEAR(*a, *b, 1e-10) << "sample " << i;
    }
}

TEST(Shoot, FirstZeroDecreasesInBeta) {
    for (const OperatorSpec& spec : {OperatorSpec::laplacian(), OperatorSpec::minus(1, 2)}) {
        double prev = 2 * kPi;
        for (double beta = 0.8; beta < 6; beta += 0.2) {
            const double z = *shoot(beta, spec, 2 * kPi);
            EXPECT_LT(z, prev) << beta;
            prev = z;
        }
    }
}

TEST(BetaOfSector, LaplacianIsPiOverTheta) {
    for (double theta : {kPi / 3, kPi / 2, 2 * kPi / 3, kPi}) {
        const BetaResult r = beta_of_sector({theta, OperatorSpec::laplacian()});
        EXPECT_NEAR(r.beta, kPi / theta, 1e-3) << theta;
        EXPECT_NEAR(r.first_zero, theta, 1e-8);
        EXPECT_FALSE(r.brackets.empty());
    }
}

TEST(BetaOfSector, HalfPlaneIsOneForEveryEllipticity) {
    for (double Lambda : {1.0, 2.0, 5.0}) {
        EXPECT_NEAR(beta_of_sector({kPi, OperatorSpec::minus(1, Lambda)}).beta, 1.0, 1e-3) << Lambda;
    }
}

TEST(BetaOfSector, PucciQuarterPlaneRegression) {
    const BetaResult r = beta_of_sector({kPi / 2, OperatorSpec::minus(1, 2)});
    EXPECT_GE(r.beta, 2.01);
    EXPECT_NEAR(r.beta, kPucciQuarterBeta, 1e-6);
}

TEST(BetaOfSector, ProfilePositiveWithZeroEnds) {
    const BetaResult r = beta_of_sector({2 * kPi / 3, OperatorSpec::minus(1, 3)});
    ASSERT_GE(r.phi.size(), 3u);
    EXPECT_EQ(r.g.front(), 0.0);
    EXPECT_NEAR(r.g.back(), 0.0, 1e-8);
    for (std::size_t i = 1; i + 1 < r.g.size(); ++i) EXPECT_GT(r.g[i], 0.0);
    EXPECT_NEAR(r.g_at(r.phi[7]), r.g[7], 1e-14);
}

TEST(BetaOfSector, NonincreasingInTheOpening) {
    double prev = 1e300;
    for (double theta = kPi / 4; theta <= 1.5 * kPi; theta += kPi / 8) {
        const double b = beta_of_sector({theta, OperatorSpec::minus(1, 2)}).beta;
        EXPECT_LE(b, prev + 1e-9) << theta;
        prev = b;
    }
}

TEST(BetaOfSector, Errors) {
    EXPECT_THROW(beta_of_sector({0.0, OperatorSpec::laplacian()}), std::invalid_argument);
    EXPECT_THROW(beta_of_sector({kPi / 2, OperatorSpec::minus(1, 2, 1.0)}), std::invalid_argument);
    EXPECT_THROW(beta_of_sector({0.1, OperatorSpec::laplacian()}), NumericalError);
}

TEST(BetaLimitSequence, DecreasesToTwo) {
    const std::vector<int> m{1, 2, 4, 8, 16};
    const std::vector<double> b = beta_limit_sequence(kPi / 2, 1.0, m, 3);
    ASSERT_EQ(b.size(), m.size());
    EXPECT_NEAR(b[0], kPucciQuarterBeta, 1e-6);
    for (std::size_t i = 0; i < b.size(); ++i) {
        EXPECT_GT(b[i], 2.0);
        if (i > 0) {
            EXPECT_LE(b[i], b[i - 1]);
        }
    }
    EXPECT_LE(b.back() - 2.0, 0.05);
    EXPECT_EQ(b, beta_limit_sequence(kPi / 2, 1.0, m, 1));
}

TEST(BetaLimitSequence, HalfPlaneAllOne) {
    for (double b : beta_limit_sequence(kPi, 1.0, {1, 4, 16})) EXPECT_NEAR(b, 1.0, 1e-3);
}

TEST(DecayRateFit, MatchesShootingExponent) {
    DecayFitParams p;
    p.h = 1.0 / 64;
    const DecayFit lap = decay_rate_fit(OperatorSpec::laplacian(), kPi / 2, p);
    EXPECT_NEAR(lap.beta_fit, 2.0, 0.05);
    const DecayFit pm = decay_rate_fit(OperatorSpec::minus(1, 2), kPi / 2, p);
    EXPECT_NEAR(pm.beta_fit, pm.beta_shoot, 0.05);
    const DecayFit half = decay_rate_fit(OperatorSpec::laplacian(), kPi, p);
    EXPECT_NEAR(half.beta_fit, 1.0, 0.05);
    EXPECT_EQ(lap.r.size(), static_cast<std::size_t>(p.fit_samples));
    for (double w : lap.w) EXPECT_GT(w, 0.0);
}

TEST(IterationLowerBound, ConstantSequencePassesWithEquality) {
    const IterationCheck c = iteration_lower_bound(0.0, 2, std::vector<double>(21, 1.0));
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.bound, 1.0);
    EXPECT_EQ(c.min_ratio, 1.0);
    EXPECT_EQ(c.product, 1.0);
}

TEST(IterationLowerBound, EqualityRecursionPasses) {
    const double C = 0.5;
    const std::vector<double> q = equality_recursion(C, 22);
    const IterationCheck c = iteration_lower_bound(C, 2, q);
    EXPECT_TRUE(c.pass);
    EXPECT_FALSE(c.failing_level.has_value());
    EXPECT_DOUBLE_EQ(c.bound, std::exp(-4 * C * 0.25));
    double product = 1.0;
    for (int s = 3; s <= 22; ++s) product *= 1 - C * std::ldexp(1.0, -s);
    EXPECT_NEAR(c.product, product, 1e-15);
    EXPECT_NEAR(c.min_ratio, product, 1e-15);
    EXPECT_GT(c.min_ratio, c.bound);
}

TEST(IterationLowerBound, PropertyOverRandomAdmissibleSequences) {
    // Any q with q(r) >= q(2r)(1 - C r) below r1 satisfies the bound.
    std::mt19937_64 rng(54);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const int k1 = 1 + static_cast<int>(rng() % 4);
        const double C = 0.5 * std::ldexp(1.0, k1) * u(rng);  // C r1 <= 1/2
        std::vector<double> q(k1 + 21);
        q[0] = 0.5 + u(rng);
        for (std::size_t s = 1; s < q.size(); ++s) {
            const double factor = 1 - C * std::ldexp(1.0, -static_cast<int>(s));
            q[s] = q[s - 1] * (s > static_cast<std::size_t>(k1) ? factor * (1 + 0.01 * u(rng)) : 0.5 + u(rng));
        }
        ASSERT_TRUE(iteration_lower_bound(C, k1, q).pass) << "sample " << i;
    }
}

TEST(IterationLowerBound, DetectsBrokenLevel) {
    std::vector<double> q = equality_recursion(0.5, 22);
    q[10] *= 0.5;
    const IterationCheck c = iteration_lower_bound(0.5, 2, q);
    EXPECT_FALSE(c.pass);
    ASSERT_TRUE(c.failing_level.has_value());
    EXPECT_EQ(*c.failing_level, 10);
    EXPECT_THROW(iteration_lower_bound(4.0, 2, q), std::invalid_argument);
}

TEST(Reports, BetaRowFormat) {
    std::ostringstream out;
    write_beta_csv_header(out);
    write_beta_row(out, kPi / 2, OperatorSpec::laplacian(), 2.0000000002);
    EXPECT_EQ(out.str(), "theta,lambda,Lambda,beta\n1.5708,1,1,2.000000000200\n");
    std::ostringstream prof;
    write_profile_csv(prof, beta_of_sector({kPi / 2, OperatorSpec::laplacian()}));
    EXPECT_EQ(prof.str().substr(0, 10), "phi,g\n0,0\n");
}

}  // namespace
}  // namespace serrin
