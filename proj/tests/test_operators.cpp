#include "serrin/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace serrin {
namespace {

constexpr int kSamples = 10000;

double size_of(const SymMat2& m) { return std::abs(m.a11) + 2.0 * std::abs(m.a12) + std::abs(m.a22); }

/// Random matrices over four decades of scale and random admissible specs.
class OperatorSampler {
public:
    explicit OperatorSampler(std::uint64_t seed) : rng_(seed) {}

    SymMat2 matrix() {
        const double scale = std::pow(10.0, 4.0 * unit() - 2.0);
        return scale * SymMat2{entry(), entry(), entry()};
    }
    OperatorSpec spec() {
        const double lambda = 0.1 + unit();
        const double Lambda = lambda * (1.0 + 4.0 * unit());
        const double k = 2.0 * unit();
        return unit() < 0.5 ? OperatorSpec::minus(lambda, Lambda, k, unit() < 0.5 ? -1 : 1)
                            : OperatorSpec::plus(lambda, Lambda, k, unit() < 0.5 ? -1 : 1);
    }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

private:
    double entry() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }
    std::mt19937_64 rng_;
};

TEST(Eig2, FrozenExamples) {
    EXPECT_EQ(eig2(SymMat2::diag(3, -1)).mu1, -1.0);
    EXPECT_EQ(eig2(SymMat2::diag(3, -1)).mu2, 3.0);
    const EigenPair off = eig2({0, 1, 0});
    EXPECT_DOUBLE_EQ(off.mu1, -1.0);
    EXPECT_DOUBLE_EQ(off.mu2, 1.0);
    EXPECT_EQ(eig2({}).mu1, 0.0);
    EXPECT_EQ(eig2({}).mu2, 0.0);
}

TEST(Eig2, TraceAndDeterminantOverSamples) {
    OperatorSampler s(11);
    for (int i = 0; i < kSamples; ++i) {
        const SymMat2 m = s.matrix();
        const EigenPair e = eig2(m);
        const double scale = size_of(m);
        ASSERT_LE(e.mu1, e.mu2);
        ASSERT_NEAR(e.mu1 + e.mu2, m.trace(), 1e-13 * scale);
        ASSERT_NEAR(e.mu1 * e.mu2, m.det(), 1e-12 * scale * scale);
    }
}

TEST(Pucci, FrozenExamples) {
    EXPECT_DOUBLE_EQ(pucci_minus(SymMat2::diag(1, 1), 1, 2), 2.0);
    EXPECT_DOUBLE_EQ(pucci_minus(SymMat2::diag(1, -1), 1, 2), -1.0);
    EXPECT_DOUBLE_EQ(pucci_plus(SymMat2::diag(1, -1), 1, 2), 1.0);
    EXPECT_DOUBLE_EQ(pucci_plus({}, 1, 2), 0.0);
    EXPECT_DOUBLE_EQ(pucci_plus(SymMat2::diag(-1, -1), 1, 2), -2.0);
}

TEST(Pucci, EqualConstantsGiveTrace) {
    OperatorSampler s(12);
    for (int i = 0; i < kSamples; ++i) {
        const SymMat2 m = s.matrix();
        ASSERT_NEAR(pucci_minus(m, 1, 1), m.trace(), 1e-12 * size_of(m));
        ASSERT_NEAR(pucci_plus(m, 1, 1), m.trace(), 1e-12 * size_of(m));
    }
}

TEST(Pucci, RotationInvariance) {
    OperatorSampler s(1);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 m = s.matrix();
        const double angle = 2.0 * std::numbers::pi * s.unit();
        const double scale = spec.Lambda * size_of(m);
        ASSERT_NEAR(pucci(spec, m.rotated(angle)), pucci(spec, m), 1e-10 * scale) << "sample " << i;
    }
}

TEST(Pucci, EllipticitySandwich) {
    OperatorSampler s(2);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 A = s.matrix();
        const SymMat2 B = s.matrix();
        const double p = 2.0 * s.unit();
        const double q = 2.0 * s.unit();
        const double scale = spec.Lambda * (size_of(A) + size_of(B)) + spec.k * (p + q);
        const double diff = eval_operator(spec, A, p) - eval_operator(spec, B, q);
        const double grad = spec.k * std::abs(p - q);
        ASSERT_LE(diff, pucci_plus(A - B, spec.lambda, spec.Lambda) + grad + 1e-10 * scale) << "sample " << i;
        ASSERT_GE(diff, pucci_minus(A - B, spec.lambda, spec.Lambda) - grad - 1e-10 * scale) << "sample " << i;
    }
}

TEST(Pucci, Duality) {
    OperatorSampler s(3);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 m = s.matrix();
        ASSERT_EQ(pucci_plus(m, spec.lambda, spec.Lambda), -pucci_minus(-m, spec.lambda, spec.Lambda));
    }
}

TEST(Pucci, PositiveHomogeneity) {
    OperatorSampler s(4);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 m = s.matrix();
        const double t = std::pow(10.0, 4.0 * s.unit() - 2.0);
        const double p = 2.0 * s.unit();
        const double scale = t * (spec.Lambda * size_of(m) + spec.k * p);
        ASSERT_NEAR(eval_operator(spec, t * m, t * p), t * eval_operator(spec, m, p), 1e-10 * scale);
    }
}

TEST(Pucci, MinusBelowPlus) {
    OperatorSampler s(5);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 m = s.matrix();
        ASSERT_LE(pucci_minus(m, spec.lambda, spec.Lambda), pucci_plus(m, spec.lambda, spec.Lambda));
    }
}

TEST(EigenWeight, InverseRoundTrip) {
    OperatorSampler s(6);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const double t = std::pow(10.0, 4.0 * s.unit() - 2.0) * (s.unit() < 0.5 ? -1.0 : 1.0);
        ASSERT_NEAR(eigen_weight_inverse(spec, eigen_weight(spec, t)), t, 1e-14 * std::abs(t));
    }
}

TEST(EigenWeight, SumOverEigenvaluesIsPucci) {
    OperatorSampler s(7);
    for (int i = 0; i < kSamples; ++i) {
        const OperatorSpec spec = s.spec();
        const SymMat2 m = s.matrix();
        const EigenPair e = eig2(m);
        ASSERT_NEAR(eigen_weight(spec, e.mu1) + eigen_weight(spec, e.mu2), pucci(spec, m),
                    1e-12 * spec.Lambda * size_of(m));
    }
}

TEST(EvalOperator, FrozenExamples) {
    EXPECT_DOUBLE_EQ(eval_operator(OperatorSpec::minus(1, 2, 0.5, -1), SymMat2::diag(1, -1), 2), -2.0);
    EXPECT_DOUBLE_EQ(eval_operator(OperatorSpec::minus(1, 3, 2.0, +1), {}, 0), 0.0);
    EXPECT_DOUBLE_EQ(eval_operator(OperatorSpec::plus(1, 1, 0.0), SymMat2::diag(2, 3), 7), 5.0);
}

TEST(RescaleOperator, FrozenExamples) {
    const OperatorSpec spec = OperatorSpec::minus(1, 2, 3, -1);
    EXPECT_EQ(rescale_operator(spec, 5), spec);
    EXPECT_EQ(rescale_operator(spec, 1), spec);
    const double R = 2;
    const SymMat2 m = SymMat2::diag(1, -1);
    const double lhs = eval_operator(rescale_operator(spec, R), m, 1);
    const double rhs = eval_operator(spec, R * m, R * 1) / R;
    EXPECT_DOUBLE_EQ(lhs, rhs);
    // M-(diag(1, -1)) = 1 - 2 with lambda = 1, Lambda = 2.
    EXPECT_DOUBLE_EQ(lhs, -1.0 + spec.grad_sign * 3.0);
}

TEST(Validate, RejectsBadSpecs) {
    EXPECT_THROW(validate(OperatorSpec::minus(0, 1)), std::invalid_argument);
    EXPECT_THROW(validate(OperatorSpec::minus(2, 1)), std::invalid_argument);
    EXPECT_THROW(validate(OperatorSpec::minus(1, 1, -1)), std::invalid_argument);
    EXPECT_THROW(validate(OperatorSpec{PucciVariant::minus, 1, 1, 0, 0}), std::invalid_argument);
    EXPECT_THROW(rescale_operator(OperatorSpec::laplacian(), 0.0), std::invalid_argument);
    EXPECT_NO_THROW(validate(OperatorSpec::plus(0.5, 4, 1)));
}

}  // namespace
}  // namespace serrin
