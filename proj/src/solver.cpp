#include "serrin/solver.hpp"

#include "serrin/errors.hpp"
#include "serrin/parallel.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace serrin {

namespace {

/// Unequal-arm coefficients of one stencil line at one node.
struct LineCoeffs {
    double plus;   // weight of u(+arm)
    double minus;  // weight of u(-arm)
};

LineCoeffs second_diff_coeffs(const Grid& g, std::size_t node, int line) {
    const double hp = g.arm(node, 2 * line).length;
    const double hm = g.arm(node, 2 * line + 1).length;
    return {2.0 / (hp * (hp + hm)), 2.0 / (hm * (hp + hm))};
}

/// First-derivative weights (plus, minus, centre) along a line.
struct GradCoeffs {
    double plus;
    double minus;
    double centre;
};

GradCoeffs first_diff_coeffs(const Grid& g, std::size_t node, int line) {
    const double hp = g.arm(node, 2 * line).length;
    const double hm = g.arm(node, 2 * line + 1).length;
    return {hm / (hp * (hp + hm)), -hp / (hm * (hp + hm)), (hp - hm) / (hp * hm)};
}

double diff_along(const Field& u, std::size_t node, int line) {
    const LineCoeffs c = second_diff_coeffs(u.grid(), node, line);
    const double u0 = u[node];
    return c.plus * (u.arm_value(node, 2 * line) - u0) + c.minus * (u.arm_value(node, 2 * line + 1) - u0);
}

/// Linearisation of the discrete operator at one node.
struct Policy {
    int frame = 0;
    double w0 = 0.0;  // weight of the first line of the frame
    double w1 = 0.0;
    Vec2 grad_dir;    // unit gradient direction (zero if |Du| = 0)
};

struct NodeEval {
    double value;
    Policy policy;
};

NodeEval evaluate_node(const Field& u, std::size_t node, const OperatorSpec& spec) {
    const Grid& g = u.grid();
    const int frames = g.stencil().frame_count();
    const bool minus = spec.variant == PucciVariant::minus;
    const double pos = minus ? spec.lambda : spec.Lambda;
    const double neg = minus ? spec.Lambda : spec.lambda;

    NodeEval best{minus ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), {}};
    for (int f = 0; f < frames; ++f) {
        const double d0 = diff_along(u, node, 2 * f);
        const double d1 = diff_along(u, node, 2 * f + 1);
        const double w0 = d0 > 0.0 ? pos : neg;
        const double w1 = d1 > 0.0 ? pos : neg;
        const double s = w0 * d0 + w1 * d1;
        if (minus ? s < best.value : s > best.value) {
            best.value = s;
            best.policy.frame = f;
            best.policy.w0 = w0;
            best.policy.w1 = w1;
        }
    }
    if (spec.k != 0.0) {
        const Vec2 grad = discrete_gradient(u, node);
        const double gn = norm(grad);
        best.value += spec.grad_sign * spec.k * gn;
        best.policy.grad_dir = gn > 0.0 ? grad / gn : Vec2{};
    }
    return best;
}

std::string format_sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

void check_finite(double r) {
    if (!std::isfinite(r)) throw NumericalError("non-finite value encountered in the grid solve");
}

}  // namespace

double directional_second_diff(const Field& field, std::size_t node, int line) {
    return diff_along(field, node, line);
}

Vec2 discrete_gradient(const Field& field, std::size_t node) {
    const Grid& g = field.grid();
    const double u0 = field[node];
    Vec2 out;
    for (int line = 0; line < 2; ++line) {
        const GradCoeffs c = first_diff_coeffs(g, node, line);
        const double d = c.plus * field.arm_value(node, 2 * line) + c.minus * field.arm_value(node, 2 * line + 1) +
                         c.centre * u0;
        (line == 0 ? out.x : out.y) = d;
    }
    return out;
}

double discrete_operator(const Field& field, std::size_t node, const OperatorSpec& spec) {
    return evaluate_node(field, node, spec).value;
}

double residual(const Field& field, const OperatorSpec& spec, const SourceSpec& f) {
    validate(spec);
    double r = 0.0;
    for (std::size_t n = 0; n < field.grid().size(); ++n) {
        r = std::max(r, std::abs(discrete_operator(field, n, spec) + f(field[n])));
    }
    return r;
}

double explicit_step_bound(const OperatorSpec& spec, const Grid& grid) {
    const double h = grid.h();
    return h * h / (4.0 * spec.Lambda * grid.stencil().directions());
}

namespace {

Field initial_field(std::shared_ptr<const Grid> grid, const BoundaryData& boundary) {
    return Field::sample(std::move(grid), [](Vec2) { return 0.0; }, boundary);
}

Solution solve_policy(const OperatorSpec& spec, const SourceSpec& f, Field u, const SolveParams& params) {
    const Grid& g = u.grid();
    const std::size_t n = g.size();
    const int K = g.stencil().directions();
    const int max_iter = params.max_iter > 0 ? params.max_iter : 100;

    // pattern: every stencil neighbour plus the diagonal, so the symbolic
    // factorisation is shared by all policies
    std::vector<Eigen::Triplet<double>> pattern;
    pattern.reserve(n * (K + 1));
    for (std::size_t i = 0; i < n; ++i) {
        pattern.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
        for (int d = 0; d < K; ++d) {
            const Arm& a = g.arm(i, d);
            if (a.neighbor >= 0) pattern.emplace_back(static_cast<int>(i), a.neighbor, 1.0);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(pattern.begin(), pattern.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);

    Solution sol{u, {}, 0, 0.0};
    std::vector<Policy> policy(n);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<double>> trips;

    for (int it = 0;; ++it) {
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const NodeEval e = evaluate_node(sol.field, i, spec);
            policy[i] = e.policy;
            r = std::max(r, std::abs(e.value + f(sol.field[i])));
        }
        check_finite(r);
        sol.residual_history.push_back(r);
        sol.final_residual = r;
        sol.iterations = it;
        if (r <= params.tol) return sol;
        if (it >= max_iter) {
            throw NumericalError("policy iteration reached the iteration cap (" + std::to_string(max_iter) +
                                 ") with residual " + format_sci(r));
        }

        trips.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Policy& p = policy[i];
            const int row = static_cast<int>(i);
            double diag = f.b;
            double b = -f.a;
            auto add = [&](int d, double w) {
                const Arm& a = g.arm(i, d);
                if (a.neighbor >= 0) trips.emplace_back(row, a.neighbor, w);
                else b -= w * sol.field.boundary_values()[a.boundary];
            };
            for (int side = 0; side < 2; ++side) {
                const int line = 2 * p.frame + side;
                const double w = side == 0 ? p.w0 : p.w1;
                const LineCoeffs c = second_diff_coeffs(g, i, line);
                add(2 * line, w * c.plus);
                add(2 * line + 1, w * c.minus);
                diag -= w * (c.plus + c.minus);
            }
            if (spec.k != 0.0 && (p.grad_dir.x != 0.0 || p.grad_dir.y != 0.0)) {
                const double sk = spec.grad_sign * spec.k;
                for (int line = 0; line < 2; ++line) {
                    const double comp = line == 0 ? p.grad_dir.x : p.grad_dir.y;
                    const GradCoeffs c = first_diff_coeffs(g, i, line);
                    add(2 * line, sk * comp * c.plus);
                    add(2 * line + 1, sk * comp * c.minus);
                    diag += sk * comp * c.centre;
                }
            }
            trips.emplace_back(row, row, diag);
            rhs(row) = b;
        }
        // zero-valued entries keep the shared pattern
        for (const auto& t : pattern) trips.emplace_back(t.row(), t.col(), 0.0);
        A.setFromTriplets(trips.begin(), trips.end());
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw NumericalError("sparse factorisation failed in policy iteration");
        const Eigen::VectorXd x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw NumericalError("sparse solve failed in policy iteration");
        for (std::size_t i = 0; i < n; ++i) sol.field[i] = x(static_cast<Eigen::Index>(i));
    }
}

Solution solve_explicit(const OperatorSpec& spec, const SourceSpec& f, Field u, const SolveParams& params) {
    const Grid& g = u.grid();
    const std::size_t n = g.size();
    const double bound = explicit_step_bound(spec, g);
    if (params.dt > bound * (1 + 1e-12)) {
        throw std::invalid_argument("pseudo-time step dt exceeds the stability bound h^2/(4 Lambda K)");
    }
    const double dt = params.dt > 0.0 ? params.dt : bound;
    const int max_iter = params.max_iter > 0 ? params.max_iter : 1'000'000;

    // per-node step keeps the update monotone on short cut-cell arms
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = std::abs(f.b);
        double worst = 0.0;
        for (int fr = 0; fr < g.stencil().frame_count(); ++fr) {
            double s = 0.0;
            for (int side = 0; side < 2; ++side) {
                const LineCoeffs c = second_diff_coeffs(g, i, 2 * fr + side);
                s += spec.Lambda * (c.plus + c.minus);
            }
            worst = std::max(worst, s);
        }
        diag += worst;
        if (spec.k != 0.0) {
            for (int line = 0; line < 2; ++line) diag += spec.k * std::abs(first_diff_coeffs(g, i, line).centre);
        }
        step[i] = std::min(dt, 1.0 / diag);
    }

    Solution sol{u, {}, 0, 0.0};
    Field next = u;
    const int threads = std::max(1, params.threads);
    std::vector<double> chunk_max(static_cast<std::size_t>(threads), 0.0);
    for (int it = 0;; ++it) {
        std::fill(chunk_max.begin(), chunk_max.end(), 0.0);
        parallel_chunks(n, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
            double local = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const double res = discrete_operator(sol.field, i, spec) + f(sol.field[i]);
                if (!(std::abs(res) <= local)) local = std::abs(res);  // keeps NaN
                next[i] = sol.field[i] + step[i] * res;
            }
            chunk_max[c] = local;
        });
        double r = 0.0;
        for (double m : chunk_max) {
            check_finite(m);
            r = std::max(r, m);
        }
        sol.iterations = it;
        sol.final_residual = r;
        if (it % 1000 == 0 || r <= params.tol) sol.residual_history.push_back(r);
        if (r <= params.tol) return sol;
        if (it >= max_iter) {
            throw NumericalError("explicit relaxation reached the iteration cap (" + std::to_string(max_iter) +
                                 ") with residual " + format_sci(r));
        }
        std::swap(sol.field, next);
    }
}

}  // namespace

Solution solve(const OperatorSpec& spec, const SourceSpec& f, std::shared_ptr<const Grid> grid,
               const SolveParams& params, const BoundaryData& boundary) {
    validate(spec);
    if (!(params.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    Field u = initial_field(std::move(grid), boundary);
    return params.method == SolveMethod::policy_iteration ? solve_policy(spec, f, std::move(u), params)
                                                          : solve_explicit(spec, f, std::move(u), params);
}

BoundaryGradientReport boundary_gradient(const Field& field, const DomainCurve& curve, int samples) {
    if (samples < 16) throw std::invalid_argument("boundary_gradient needs at least 16 samples");
    const double delta = field.grid().h();
    BoundaryGradientReport rep;
    for (int j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) / samples;
        const Vec2 xb = curve.point(t);
        const Vec2 nu = curve.normal(t);
        const Vec2 p1 = xb + delta * nu;
        const Vec2 p2 = xb + 2.0 * delta * nu;
        if (!field.grid().region().contains(p1) || !field.grid().region().contains(p2)) {
            throw GeometryError("normal ray at t=" + std::to_string(t) + " leaves the domain before two samples");
        }
        const double u1 = field.interpolate(p1);
        const double u2 = field.interpolate(p2);
        const double u_nu = (4.0 * u1 - u2) / (2.0 * delta);
        rep.samples.push_back({t, xb, std::abs(u_nu), u_nu});
    }
    rep.min = std::numeric_limits<double>::infinity();
    rep.max = -rep.min;
    double sum = 0.0;
    for (const auto& s : rep.samples) {
        rep.min = std::min(rep.min, s.grad_norm);
        rep.max = std::max(rep.max, s.grad_norm);
        sum += s.grad_norm;
    }
    rep.mean = sum / static_cast<double>(rep.samples.size());
    rep.neumann_defect = rep.mean > 0.0 ? (rep.max - rep.min) / rep.mean : 0.0;
    return rep;
}

void write_field_csv(std::ostream& out, const Field& field) {
    out << "x,y,u\n" << std::setprecision(12);
    for (std::size_t n = 0; n < field.grid().size(); ++n) {
        const Vec2 x = field.grid().node(n).x;
        out << x.x << ',' << x.y << ',' << field[n] << '\n';
    }
}

void write_boundary_csv(std::ostream& out, const BoundaryGradientReport& report) {
    out << "t,x,y,grad_norm,u_nu\n" << std::setprecision(12);
    for (const auto& s : report.samples) {
        out << s.t << ',' << s.x.x << ',' << s.x.y << ',' << s.grad_norm << ',' << s.u_nu << '\n';
    }
}

}  // namespace serrin
