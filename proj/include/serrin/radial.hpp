#pragma once

#include "serrin/operators.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace serrin {

/// Source term f(u) = a + b*u. A constant source has b = 0.
struct SourceSpec {
    double a = 1.0;
    double b = 0.0;

    static SourceSpec constant(double c) { return {c, 0.0}; }
    static SourceSpec affine(double a, double b) { return {a, b}; }

    double operator()(double u) const { return a + b * u; }
    double lipschitz() const;
    bool nonincreasing() const { return b <= 0.0; }

    /// f_R(s) = f(R s) / R.
    SourceSpec rescaled(double R) const;

    friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

/// Radial solution u(r) of F(D^2u, |Du|) + f(u) = 0 in the disk B_R, u(R) = 0.
struct RadialProfile {
    double R = 0.0;
    double h = 0.0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    double c0 = 0.0;  // |u'(R)|

    double center_value() const { return u.front(); }

    /// Cubic Hermite interpolation of u at radius rr in [0, R].
    double value_at(double rr) const;
    double derivative_at(double rr) const;
};

/// Hessian eigenvalues (u'', u'/r) of a radial function, unsorted.
std::pair<double, double> radial_hessian_eigs(double u1, double u2, double r);

/// Shooting on u(0) with RK4 in r; bisection until |u(R)| <= 1e-10.
/// Throws NumericalError when no positive radial solution is bracketed.
RadialProfile solve_radial(const OperatorSpec& spec, const SourceSpec& f, double R, double h);

/// u(r) = (R^2 - r^2) / (4 Lambda): the minus-variant torsion solution.
RadialProfile closed_form_disk_torsion(double lambda, double Lambda, double R, double h = 0.0);

/// u'' from the radial equation at (r, u, u'); r == 0 uses the centred limit.
double radial_second_derivative(const OperatorSpec& spec, const SourceSpec& f, double r, double u, double du);

void write_profile_csv(std::ostream& out, const RadialProfile& profile);

}  // namespace serrin
