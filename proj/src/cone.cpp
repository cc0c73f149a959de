#include "serrin/cone.hpp"

#include "serrin/errors.hpp"
#include "serrin/parallel.hpp"
#include "serrin/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace serrin {

namespace {

constexpr double kAngularStep = 2e-3;
constexpr double kBetaLo = 0.1;
constexpr double kBetaHi = 20.0;

struct State {
    double g;
    double g1;
};

double g2_root(double beta, double g, double g1, const OperatorSpec& spec) {
    const SymMat2 base{beta * (beta - 1.0) * g, (beta - 1.0) * g1, beta * g};
    // F is increasing in t with slope >= lambda, so |root| <= |F(0)| / lambda
    // <= (Lambda / lambda) * (|a11| + 2 |a12| + |a22|).
    const double entries = std::abs(base.a11) + 2.0 * std::abs(base.a12) + std::abs(base.a22);
    const double ratio = spec.Lambda / spec.lambda;
    const double B = std::max(10.0 * (1.0 + beta * beta * (std::abs(g) + std::abs(g1))) * ratio,
                              2.0 * ratio * entries + 1.0);
    auto F = [&](double t) { return pucci(spec, base + SymMat2{0.0, 0.0, t}); };
    double lo = -B;
    double hi = B;
    if (F(lo) > 0.0 || F(hi) < 0.0) {
        throw NumericalError("resolve_g2: bracket [-B, B] does not contain the root");
    }
    for (int it = 0; it < 200 && hi - lo > 4e-16 * B; ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

State rk4_step(double beta, const OperatorSpec& spec, State y, double dphi) {
    auto rhs = [&](State s) { return State{s.g1, g2_root(beta, s.g, s.g1, spec)}; };
    const State k1 = rhs(y);
    const State k2 = rhs({y.g + 0.5 * dphi * k1.g, y.g1 + 0.5 * dphi * k1.g1});
    const State k3 = rhs({y.g + 0.5 * dphi * k2.g, y.g1 + 0.5 * dphi * k2.g1});
    const State k4 = rhs({y.g + dphi * k3.g, y.g1 + dphi * k3.g1});
    return {y.g + dphi / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g),
            y.g1 + dphi / 6.0 * (k1.g1 + 2 * k2.g1 + 2 * k3.g1 + k4.g1)};
}

void check_gradient_free(const OperatorSpec& spec) {
    validate(spec);
    if (spec.k != 0.0) throw std::invalid_argument("cone problems require an operator without gradient term (k = 0)");
}

}  // namespace

double BetaResult::g_at(double angle) const {
    if (phi.size() < 2) throw std::logic_error("empty angular profile");
    const double a = std::clamp(angle, phi.front(), phi.back());
    const double step = phi[1] - phi[0];
    const std::size_t i = std::min(static_cast<std::size_t>((a - phi.front()) / step), phi.size() - 2);
    const double s = (a - phi[i]) / step;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * g[i] + h10 * step * dg[i] + h01 * g[i + 1] + h11 * step * dg[i + 1];
}

SymMat2 polar_hessian(double beta, double g, double g1, double g2, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("polar_hessian needs r > 0");
    const double scale = std::pow(r, beta - 2.0);
    return scale * SymMat2{beta * (beta - 1.0) * g, (beta - 1.0) * g1, beta * g + g2};
}

double resolve_g2(double beta, double g, double g1, const OperatorSpec& spec) {
    check_gradient_free(spec);
    return g2_root(beta, g, g1, spec);
}

std::optional<double> shoot(double beta, const OperatorSpec& spec, double phi_max, double slope) {
    if (!(beta > 0.0)) throw std::invalid_argument("shoot needs beta > 0");
    check_gradient_free(spec);
    const int steps = std::max(1, static_cast<int>(std::ceil(phi_max / kAngularStep)));
    const double dphi = phi_max / steps;
    State y{0.0, slope};
    for (int n = 0; n < steps; ++n) {
        const State next = rk4_step(beta, spec, y, dphi);
        if (next.g <= 0.0) {
            double lo = 0.0;
            double hi = dphi;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                (rk4_step(beta, spec, y, mid).g > 0.0 ? lo : hi) = mid;
            }
            return n * dphi + 0.5 * (lo + hi);
        }
        y = next;
    }
    return std::nullopt;
}

BetaResult beta_of_sector(const SectorProblem& problem) {
    const double theta = problem.theta;
    if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi)) {
        throw std::invalid_argument("sector opening must lie in (0, 2 pi)");
    }
    check_gradient_free(problem.spec);

    BetaResult res;
    res.theta = theta;
    res.spec = problem.spec;
    double lo = kBetaLo;
    double hi = kBetaHi;
    if (shoot(lo, problem.spec, theta).has_value() || !shoot(hi, problem.spec, theta).has_value()) {
        throw NumericalError("beta bracket [0.1, 20] exhausted for theta=" + std::to_string(theta));
    }
    res.brackets.emplace_back(lo, hi);
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid, problem.spec, theta).has_value() ? hi : lo) = mid;
        res.brackets.emplace_back(lo, hi);
    }
    res.beta = 0.5 * (lo + hi);

    const auto zero = shoot(res.beta, problem.spec, theta * (1.0 + 1e-6) + 1e-6);
    if (!zero || std::abs(*zero - theta) > 1e-8) {
        throw NumericalError("beta bisection did not place the first zero at theta");
    }
    res.first_zero = *zero;

    const int steps = std::max(8, static_cast<int>(std::ceil(theta / kAngularStep)));
    const double dphi = theta / steps;
    State y{0.0, 1.0};
    res.phi.reserve(steps + 1);
    for (int n = 0; n <= steps; ++n) {
        res.phi.push_back(n * dphi);
        res.g.push_back(y.g);
        res.dg.push_back(y.g1);
        if (n < steps) y = rk4_step(res.beta, problem.spec, y, dphi);
    }
    return res;
}

std::vector<double> beta_limit_sequence(double theta, double lambda, const std::vector<int>& m_list, int threads) {
    for (int m : m_list)
        if (m < 1) throw std::invalid_argument("beta_limit_sequence needs m >= 1");
    std::vector<double> out(m_list.size());
    const int t = std::min<int>(std::max(1, threads), static_cast<int>(std::max<std::size_t>(1, m_list.size())));
    // One chunk per worker; each entry is written by exactly one chunk.
    parallel_chunks(m_list.size(), t, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double Lambda = lambda * (1.0 + 1.0 / m_list[i]);
            out[i] = beta_of_sector({theta, OperatorSpec::minus(lambda, Lambda)}).beta;
        }
    });
    return out;
}

DecayFit decay_rate_fit(const OperatorSpec& spec, double theta, const DecayFitParams& params) {
    if (!(params.r_in > 0.0 && params.r_in < params.fit_lo && params.fit_lo < params.fit_hi && params.fit_hi < 1.0)) {
        throw std::invalid_argument("decay fit needs 0 < r_in < fit_lo < fit_hi < 1");
    }
    if (params.fit_samples < 2) throw std::invalid_argument("decay fit needs at least two samples");

    DecayFit out;
    const BetaResult shot = beta_of_sector({theta, spec});
    out.beta_shoot = shot.beta;

    auto sector = std::make_shared<const AnnularSector>(theta, params.r_in, 1.0);
    auto grid = build_grid(sector, params.h, params.K);
    const BoundaryData outer_arc = [&](Vec2 p) {
        if (norm(p) < 1.0 - 1e-9) return 0.0;
        double a = sector->angle(p);
        if (a > theta) a = a > 0.5 * (theta + 2.0 * std::numbers::pi) ? 0.0 : theta;
        return shot.g_at(a);
    };
    SolveParams sp;
    sp.tol = 1e-8;
    sp.threads = params.threads;
    const Solution sol = solve(spec, SourceSpec::constant(0.0), grid, sp, outer_arc);

    const Vec2 ray{std::cos(0.5 * theta), std::sin(0.5 * theta)};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = params.fit_samples;
    for (int i = 0; i < n; ++i) {
        const double r = params.fit_lo + (params.fit_hi - params.fit_lo) * i / (n - 1);
        const double w = sol.field.interpolate(r * ray);
        if (!(w > 0.0)) throw NumericalError("decay fit: solved field is not positive on the bisector");
        out.r.push_back(r);
        out.w.push_back(w);
        const double x = std::log(r);
        const double y = std::log(w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.beta_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

IterationCheck iteration_lower_bound(double C, int k1, const std::vector<double>& q) {
    if (C < 0.0) throw std::invalid_argument("iteration_lower_bound needs C >= 0");
    if (k1 < 0 || static_cast<std::size_t>(k1) + 1 >= q.size()) {
        throw std::invalid_argument("iteration_lower_bound needs samples beyond level k1");
    }
    const double r1 = std::ldexp(1.0, -k1);
    if (C * r1 > 0.5) throw std::invalid_argument("iteration_lower_bound needs C r1 <= 1/2");

    IterationCheck out;
    out.bound = std::exp(-4.0 * C * r1);
    out.product = 1.0;
    out.min_ratio = 1.0;
    for (std::size_t s = k1 + 1; s < q.size(); ++s) {
        const double factor = 1.0 - C * std::ldexp(1.0, -static_cast<int>(s));
        out.product *= factor;
        if (!out.failing_level && q[s] < q[s - 1] * factor) out.failing_level = static_cast<int>(s);
        out.min_ratio = std::min(out.min_ratio, q[s] / q[k1]);
    }
    out.pass = !out.failing_level && out.min_ratio >= out.bound;
    return out;
}

std::vector<double> equality_recursion(double C, int levels, double q0) {
    std::vector<double> q{q0};
    for (int s = 1; s <= levels; ++s) q.push_back(q.back() * (1.0 - C * std::ldexp(1.0, -s)));
    return q;
}

void write_beta_csv_header(std::ostream& out) { out << "theta,lambda,Lambda,beta\n"; }

void write_beta_row(std::ostream& out, double theta, const OperatorSpec& spec, double beta) {
    std::ostringstream row;
    row << std::setprecision(6) << theta << ',' << spec.lambda << ',' << spec.Lambda << ',' << std::fixed
        << std::setprecision(12) << beta << '\n';
    out << row.str();
}

void write_profile_csv(std::ostream& out, const BetaResult& result) {
    const auto old = out.precision(12);
    out << "phi,g\n";
    for (std::size_t i = 0; i < result.phi.size(); ++i) out << result.phi[i] << ',' << result.g[i] << '\n';
    out.precision(old);
}

}  // namespace serrin
