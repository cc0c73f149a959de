#pragma once

#include "serrin/grid.hpp"
#include "serrin/operators.hpp"
#include "serrin/radial.hpp"

#include <iosfwd>
#include <vector>

namespace serrin {

/// Three-point second difference along stencil line `line` with unequal
/// (cut-cell) arms. Exact on quadratics.
double directional_second_diff(const Field& field, std::size_t node, int line);

/// Centred gradient from the e1/e2 lines (unequal-arm, exact on quadratics).
Vec2 discrete_gradient(const Field& field, std::size_t node);

/// min (minus) or max (plus) over the stencil frames of
/// sum_lines eigen_weight(D_line u), plus grad_sign * k * |D_h u|.
double discrete_operator(const Field& field, std::size_t node, const OperatorSpec& spec);

/// max over nodes of |discrete_operator + f(u)|.
double residual(const Field& field, const OperatorSpec& spec, const SourceSpec& f);

enum class SolveMethod {
    policy_iteration,  // Howard iteration with a sparse direct solve per policy
    explicit_euler,    // u += dt_i (F_h[u] + f(u)), Jacobi sweeps
};

struct SolveParams {
    SolveMethod method = SolveMethod::policy_iteration;
    double tol = 1e-6;
    /// Pseudo-time step for explicit_euler; 0 selects the bound h^2/(4 Lambda K).
    double dt = 0.0;
    /// 0 selects a method-dependent default.
    int max_iter = 0;
    int threads = 1;
};

struct Solution {
    Field field;
    std::vector<double> residual_history;
    int iterations = 0;
    double final_residual = 0.0;
};

/// Solves F_h[u] + f(u) = 0 on the grid with u = boundary data (zero if
/// empty) at the cut points, starting from u = 0.
/// Throws NumericalError on the iteration cap or a NaN.
Solution solve(const OperatorSpec& spec, const SourceSpec& f, std::shared_ptr<const Grid> grid,
               const SolveParams& params = {}, const BoundaryData& boundary = {});

/// dt <= h^2 / (4 Lambda K)
double explicit_step_bound(const OperatorSpec& spec, const Grid& grid);

struct BoundaryGradientSample {
    double t = 0.0;
    Vec2 x;
    double grad_norm = 0.0;
    double u_nu = 0.0;
};

struct BoundaryGradientReport {
    std::vector<BoundaryGradientSample> samples;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// (max - min) / mean of |Du| over the samples.
    double neumann_defect = 0.0;
};

/// One-sided second-order normal derivative at equally spaced parameters.
BoundaryGradientReport boundary_gradient(const Field& field, const DomainCurve& curve, int samples);

void write_field_csv(std::ostream& out, const Field& field);
void write_boundary_csv(std::ostream& out, const BoundaryGradientReport& report);

}  // namespace serrin
