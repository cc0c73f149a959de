#include "serrin/radial.hpp"

#include "serrin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace serrin {

double SourceSpec::lipschitz() const { return std::abs(b); }

SourceSpec SourceSpec::rescaled(double R) const {
    if (!(R > 0.0)) {
        throw std::invalid_argument("rescaling factor R must be positive");
    }
    return {a / R, b};
}

namespace {

std::size_t locate(const std::vector<double>& r, double rr) {
    if (rr <= r.front()) return 0;
    if (rr >= r.back()) return r.size() - 2;
    auto it = std::upper_bound(r.begin(), r.end(), rr);
    return static_cast<std::size_t>(it - r.begin()) - 1;
}

}  // namespace

double RadialProfile::value_at(double rr) const {
    const std::size_t i = locate(r, rr);
    const double dr = r[i + 1] - r[i];
    const double s = (rr - r[i]) / dr;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * u[i] + h10 * dr * du[i] + h01 * u[i + 1] + h11 * dr * du[i + 1];
}

double RadialProfile::derivative_at(double rr) const {
    const std::size_t i = locate(r, rr);
    const double dr = r[i + 1] - r[i];
    const double s = (rr - r[i]) / dr;
    const double d00 = 6 * s * s - 6 * s;
    const double d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s;
    const double d11 = 3 * s * s - 2 * s;
    return (d00 * u[i] + d01 * u[i + 1]) / dr + d10 * du[i] + d11 * du[i + 1];
}

std::pair<double, double> radial_hessian_eigs(double u1, double u2, double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("radial_hessian_eigs needs r > 0; use u'' twice at the centre");
    }
    return {u2, u1 / r};
}

double radial_second_derivative(const OperatorSpec& spec, const SourceSpec& f, double r, double u, double du) {
    if (r == 0.0) {
        // both eigenvalues equal u''(0)
        return eigen_weight_inverse(spec, -0.5 * f(u));
    }
    const double tangential = eigen_weight(spec, du / r);
    const double rhs = -(tangential + spec.grad_sign * spec.k * std::abs(du) + f(u));
    return eigen_weight_inverse(spec, rhs);
}

namespace {

struct Trajectory {
    std::vector<double> u;
    std::vector<double> du;
    bool positive = true;  // u > 0 on [0, R)
};

Trajectory integrate(const OperatorSpec& spec, const SourceSpec& f, double u0, double step, std::size_t n) {
    Trajectory tr;
    tr.u.resize(n + 1);
    tr.du.resize(n + 1);
    double u = u0;
    double v = 0.0;
    tr.u[0] = u;
    tr.du[0] = v;
    auto acc = [&](double r, double uu, double vv) { return radial_second_derivative(spec, f, r, uu, vv); };
    for (std::size_t i = 0; i < n; ++i) {
        const double r = static_cast<double>(i) * step;
        const double k1u = v;
        const double k1v = acc(r, u, v);
        const double k2u = v + 0.5 * step * k1v;
        const double k2v = acc(r + 0.5 * step, u + 0.5 * step * k1u, k2u);
        const double k3u = v + 0.5 * step * k2v;
        const double k3v = acc(r + 0.5 * step, u + 0.5 * step * k2u, k3u);
        const double k4u = v + step * k3v;
        const double k4v = acc(r + step, u + step * k3u, k4u);
        u += step / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        tr.u[i + 1] = u;
        tr.du[i + 1] = v;
        if (i + 1 < n && !(u > 0.0)) tr.positive = false;
        if (!std::isfinite(u) || !std::isfinite(v)) {
            throw NumericalError("radial integration produced a non-finite value");
        }
    }
    return tr;
}

}  // namespace

RadialProfile solve_radial(const OperatorSpec& spec, const SourceSpec& f, double R, double h) {
    validate(spec);
    if (!(R > 0.0)) throw std::invalid_argument("disk radius must be positive");
    if (!(h > 0.0) || h > R / 100.0) throw std::invalid_argument("radial step must satisfy 0 < h <= R/100");

    const auto n = static_cast<std::size_t>(std::ceil(R / h - 1e-9));
    const double step = R / static_cast<double>(n);

    auto end_value = [&](double u0) { return integrate(spec, f, u0, step, n).u.back(); };

    double lo = 0.0;
    if (!(end_value(lo) < 0.0)) {
        throw NumericalError("shooting bracket not found: u(R) >= 0 for u(0) = 0 (no positive radial solution)");
    }
    // ABP-type scale for the central value; widened if the source grows with u
    double hi = 10.0 * R * R * std::max(std::abs(f(0.0)), 1e-300) / spec.lambda;
    int widen = 0;
    while (!(end_value(hi) > 0.0)) {
        if (++widen > 40) throw NumericalError("shooting bracket not found for the central value u(0)");
        lo = hi;
        hi *= 2.0;
    }

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double end = end_value(mid);
        if (std::abs(end) <= 1e-10 && hi - lo <= 1e-13 * std::max(1.0, hi)) break;
        if (end < 0.0) lo = mid; else hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }

    Trajectory tr = integrate(spec, f, mid, step, n);
    if (std::abs(tr.u.back()) > 1e-10) {
        throw NumericalError("radial shooting did not reach |u(R)| <= 1e-10");
    }
    if (!tr.positive) {
        throw NumericalError("radial solution is not positive inside the disk");
    }

    RadialProfile p;
    p.R = R;
    p.h = step;
    p.r.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) p.r[i] = static_cast<double>(i) * step;
    p.r.back() = R;
    p.u = std::move(tr.u);
    p.du = std::move(tr.du);
    p.c0 = std::abs(p.du.back());
    return p;
}

RadialProfile closed_form_disk_torsion(double lambda, double Lambda, double R, double h) {
    validate(OperatorSpec::minus(lambda, Lambda));
    if (h <= 0.0) h = R / 1000.0;
    const auto n = static_cast<std::size_t>(std::ceil(R / h - 1e-9));
    const double step = R / static_cast<double>(n);
    RadialProfile p;
    p.R = R;
    p.h = step;
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = i == n ? R : static_cast<double>(i) * step;
        p.r.push_back(r);
        p.u.push_back((R * R - r * r) / (4.0 * Lambda));
        p.du.push_back(-r / (2.0 * Lambda));
    }
    p.c0 = R / (2.0 * Lambda);
    return p;
}

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
    out << "r,u\n" << std::setprecision(12);
    for (std::size_t i = 0; i < profile.r.size(); ++i) {
        out << profile.r[i] << ',' << profile.u[i] << '\n';
    }
}

}  // namespace serrin
