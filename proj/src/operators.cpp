#include "serrin/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace serrin {

SymMat2 SymMat2::rotated(double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    // columns of Q are (c, s) and (-s, c)
    const double b11 = quad(c, s);
    const double b22 = quad(-s, c);
    const double b12 = a11 * c * (-s) + a12 * (c * c - s * s) + a22 * s * c;
    return {b11, b12, b22};
}

EigenPair eig2(const SymMat2& m) {
    const double mean = 0.5 * (m.a11 + m.a22);
    const double half_diff = 0.5 * (m.a11 - m.a22);
    // hypot never goes negative, so no clamp is needed on the discriminant
    const double radius = std::hypot(half_diff, m.a12);
    return {mean - radius, mean + radius};
}

namespace {

double weight_minus(double t, double lambda, double Lambda) {
    return t > 0.0 ? lambda * t : Lambda * t;
}

void check_ellipticity(double lambda, double Lambda) {
    if (!(lambda > 0.0) || !(Lambda >= lambda) || !std::isfinite(Lambda)) {
        throw std::invalid_argument("ellipticity constants must satisfy 0 < lambda <= Lambda (got lambda=" +
                                    std::to_string(lambda) + ", Lambda=" + std::to_string(Lambda) + ")");
    }
}

}  // namespace

double pucci_minus(const SymMat2& m, double lambda, double Lambda) {
    check_ellipticity(lambda, Lambda);
    const auto [mu1, mu2] = eig2(m);
    return weight_minus(mu1, lambda, Lambda) + weight_minus(mu2, lambda, Lambda);
}

double pucci_plus(const SymMat2& m, double lambda, double Lambda) {
    check_ellipticity(lambda, Lambda);
    const auto [mu1, mu2] = eig2(m);
    return weight_minus(mu1, Lambda, lambda) + weight_minus(mu2, Lambda, lambda);
}

void validate(const OperatorSpec& spec) {
    check_ellipticity(spec.lambda, spec.Lambda);
    if (!(spec.k >= 0.0) || !std::isfinite(spec.k)) {
        throw std::invalid_argument("gradient coefficient k must be finite and nonnegative");
    }
    if (spec.grad_sign != 1 && spec.grad_sign != -1) {
        throw std::invalid_argument("grad_sign must be +1 or -1");
    }
}

double eigen_weight(const OperatorSpec& spec, double t) {
    return spec.variant == PucciVariant::minus ? weight_minus(t, spec.lambda, spec.Lambda)
                                               : weight_minus(t, spec.Lambda, spec.lambda);
}

double eigen_weight_inverse(const OperatorSpec& spec, double value) {
    const double pos = spec.variant == PucciVariant::minus ? spec.lambda : spec.Lambda;
    const double neg = spec.variant == PucciVariant::minus ? spec.Lambda : spec.lambda;
    return value > 0.0 ? value / pos : value / neg;
}

double pucci(const OperatorSpec& spec, const SymMat2& m) {
    return spec.variant == PucciVariant::minus ? pucci_minus(m, spec.lambda, spec.Lambda)
                                               : pucci_plus(m, spec.lambda, spec.Lambda);
}

double eval_operator(const OperatorSpec& spec, const SymMat2& m, double p) {
    validate(spec);
    if (!(p >= 0.0)) {
        throw std::invalid_argument("gradient norm p must be nonnegative");
    }
    return pucci(spec, m) + spec.grad_sign * spec.k * p;
}

OperatorSpec rescale_operator(const OperatorSpec& spec, double R) {
    validate(spec);
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("rescaling factor R must be positive");
    }
    return spec;
}

}  // namespace serrin
