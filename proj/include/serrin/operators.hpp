#pragma once

#include <utility>

namespace serrin {

/// Symmetric 2x2 matrix with a single off-diagonal slot.
struct SymMat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static constexpr SymMat2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a12; }

    /// Quadratic form e^T M e.
    constexpr double quad(double ex, double ey) const {
        return a11 * ex * ex + 2.0 * a12 * ex * ey + a22 * ey * ey;
    }

    /// Q^T M Q for the rotation Q by angle `angle`.
    SymMat2 rotated(double angle) const;

    friend constexpr SymMat2 operator+(SymMat2 a, SymMat2 b) {
        return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
    }
    friend constexpr SymMat2 operator-(SymMat2 a, SymMat2 b) {
        return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
    }
    friend constexpr SymMat2 operator-(SymMat2 a) { return {-a.a11, -a.a12, -a.a22}; }
    friend constexpr SymMat2 operator*(double t, SymMat2 a) {
        return {t * a.a11, t * a.a12, t * a.a22};
    }
    friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;
};

struct EigenPair {
    double mu1;  // smaller
    double mu2;  // larger
};

/// Closed-form eigenvalues, sorted mu1 <= mu2.
EigenPair eig2(const SymMat2& m);

/// lambda * sum(mu_k > 0) + Lambda * sum(mu_k < 0)
double pucci_minus(const SymMat2& m, double lambda, double Lambda);

/// Lambda * sum(mu_k > 0) + lambda * sum(mu_k < 0)
double pucci_plus(const SymMat2& m, double lambda, double Lambda);

enum class PucciVariant { minus, plus };

/// F(M, p) = M^{+/-}_{lambda,Lambda}(M) + grad_sign * k * p.
struct OperatorSpec {
    PucciVariant variant = PucciVariant::minus;
    double lambda = 1.0;
    double Lambda = 1.0;
    double k = 0.0;
    int grad_sign = -1;

    static OperatorSpec minus(double lambda, double Lambda, double k = 0.0, int grad_sign = -1) {
        return {PucciVariant::minus, lambda, Lambda, k, grad_sign};
    }
    static OperatorSpec plus(double lambda, double Lambda, double k = 0.0, int grad_sign = +1) {
        return {PucciVariant::plus, lambda, Lambda, k, grad_sign};
    }
    static OperatorSpec laplacian() { return minus(1.0, 1.0); }

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// Throws std::invalid_argument unless 0 < lambda <= Lambda, k >= 0, grad_sign = +-1.
void validate(const OperatorSpec& spec);

/// Scalar response of the operator to a single Hessian eigenvalue (or a
/// directional second derivative): lambda*t or Lambda*t depending on sign
/// and variant. The operator is the sum of this over the eigenvalues.
double eigen_weight(const OperatorSpec& spec, double t);

/// Inverse of `eigen_weight` (it is strictly increasing, slopes in [lambda, Lambda]).
double eigen_weight_inverse(const OperatorSpec& spec, double value);

double pucci(const OperatorSpec& spec, const SymMat2& m);

double eval_operator(const OperatorSpec& spec, const SymMat2& m, double p);

/// Spec of F_R(M, p) = F(R M, R p) / R. The Pucci family is positively
/// 1-homogeneous, so the returned spec equals the input.
OperatorSpec rescale_operator(const OperatorSpec& spec, double R);

}  // namespace serrin
