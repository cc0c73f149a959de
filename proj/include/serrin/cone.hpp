#pragma once

#include "serrin/operators.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace serrin {

/// Planar sector {0 < arg x < theta} with a gradient-free operator.
struct SectorProblem {
    double theta = 0.0;
    OperatorSpec spec;
};

/// Homogeneous solution Psi = r^beta g(phi) of F(D^2 Psi) = 0 in a sector,
/// positive inside and zero on both sides.
struct BetaResult {
    double theta = 0.0;
    OperatorSpec spec;
    double beta = 0.0;
    std::vector<double> phi;  // uniform samples of [0, theta]
    std::vector<double> g;    // normalised by g'(0) = 1
    std::vector<double> dg;
    double first_zero = 0.0;  // first zero of g at the final beta
    std::vector<std::pair<double, double>> brackets;

    /// Cubic Hermite interpolation of g on [0, theta].
    double g_at(double angle) const;
};

/// Hessian of r^beta g(phi) in the orthonormal polar frame (e_r, e_phi).
SymMat2 polar_hessian(double beta, double g, double g1, double g2, double r);

/// The g'' that makes the operator vanish on polar_hessian(beta, g, g1, g2, 1).
/// Throws NumericalError if the bisection bracket does not straddle the root.
double resolve_g2(double beta, double g, double g1, const OperatorSpec& spec);

/// First zero in (0, phi_max] of the angular profile started from g(0) = 0,
/// g'(0) = slope; nullopt if g stays positive.
std::optional<double> shoot(double beta, const OperatorSpec& spec, double phi_max, double slope = 1.0);

/// Bisection on beta in [0.1, 20] until the first zero sits at theta.
BetaResult beta_of_sector(const SectorProblem& problem);

/// beta at Lambda = lambda (1 + 1/m) for each m; results in input order.
std::vector<double> beta_limit_sequence(double theta, double lambda, const std::vector<int>& m_list,
                                        int threads = 1);

struct DecayFitParams {
    double h = 1.0 / 128;
    int K = 8;
    double r_in = 0.05;
    double fit_lo = 0.4;
    double fit_hi = 0.95;
    int fit_samples = 24;
    int threads = 1;
};

struct DecayFit {
    double beta_fit = 0.0;
    double beta_shoot = 0.0;
    std::vector<double> r;
    std::vector<double> w;  // solved field along the bisector
};

/// Solves F(D^2 w) = 0 on the truncated sector r_in < |x| < 1 with g on the
/// outer arc and zero elsewhere, then fits the slope of log w against log r
/// along the bisector.
DecayFit decay_rate_fit(const OperatorSpec& spec, double theta, const DecayFitParams& params = {});

/// Dyadic samples q[s] = q(2^-s), s = 0, 1, ...; r1 = 2^-k1.
struct IterationCheck {
    bool pass = false;
    /// Level s at which q(2^-s) < q(2^{1-s}) (1 - C 2^-s), if any.
    std::optional<int> failing_level;
    double bound = 0.0;       // exp(-4 C r1)
    double min_ratio = 0.0;   // min over s > k1 of q(2^-s) / q(r1)
    double product = 0.0;     // prod_{s > k1} (1 - C 2^-s)
};

/// Checks the recursion q(r) >= q(2r)(1 - C r) below r1 and the resulting
/// lower bound q(2^-l) >= exp(-4 C r1) q(r1). Requires C r1 <= 1/2.
IterationCheck iteration_lower_bound(double C, int k1, const std::vector<double>& q);

/// q[s] for s = 0..levels from q(1) = q0 by the equality recursion.
std::vector<double> equality_recursion(double C, int levels, double q0 = 1.0);

void write_beta_csv_header(std::ostream& out);
/// theta, lambda and Lambda to 6 significant digits; beta fixed with 12 decimals.
void write_beta_row(std::ostream& out, double theta, const OperatorSpec& spec, double beta);
void write_profile_csv(std::ostream& out, const BetaResult& result);

}  // namespace serrin
