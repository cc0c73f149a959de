#pragma once

#include "serrin/grid.hpp"
#include "serrin/radial.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace serrin {

/// Signed curvature of the boundary at parameter t (circle of radius R -> 1/R).
double curvature(const DomainCurve& curve, double t);

enum class PlaneCase {
    tangency,       // the reflected cap touches the boundary from inside
    orthogonality,  // the plane meets the boundary at a right angle
    both,
    unclassified,   // neither test fired at the resolved position
};

std::string to_string(PlaneCase c);

struct MovingPlaneReport {
    Vec2 e;
    double d0 = 0.0;
    double s_star = 0.0;
    PlaneCase kind = PlaneCase::unclassified;
    /// Touching point for tangency, otherwise the orthogonal crossing.
    Vec2 witness;
    double sup_w = 0.0;  // sup |w| over the cap at s_star
    double min_w = 0.0;
};

/// Scans the plane {x . e = s} down from d0 in steps of ds, then bisects the
/// first failure to 1e-9 * diameter. The reported s_star is the lowest
/// position at which the reflected cap is still inside and the interior
/// normal satisfies <nu, e> < 0 on the plane. Requires ds <= diameter / 1000.
/// Throws GeometryError if the first scan step already fails.
MovingPlaneReport critical_position(const DomainCurve& curve, Vec2 e, double ds);

/// True if the cap {x . e > s} reflects into the closed domain and the
/// normal condition holds where the plane meets the boundary.
bool cap_reflects_inside(const DomainCurve& curve, Vec2 e, double s);

struct ReflectionStats {
    double sup_abs = 0.0;
    double sup_w = 0.0;
    double min_w = 0.0;
    std::size_t nodes = 0;
};

/// w_s(x) = u(x^s) - u(x) over interior nodes of the cap {x . e > s}, with
/// u(x^s) interpolated. Throws GeometryError if some x^s leaves the domain.
ReflectionStats reflect_and_compare(const Field& field, Vec2 e, double s);

struct BoundaryExpansionSample {
    double t = 0.0;
    Vec2 x;
    double c0 = 0.0;       // |Du| from the local fit
    double mu_tau = 0.0;   // u_tau_tau
    double u_nunu = 0.0;
    double a_taunu = 0.0;
    double kappa = 0.0;
    double residual = 0.0;  // |mu_tau + c0 kappa|
};

struct BoundaryExpansionReport {
    std::vector<BoundaryExpansionSample> samples;
    double mean_c0 = 0.0;
    double max_curvature_residual = 0.0;  // max |mu_tau + c0 kappa|
    double max_mixed = 0.0;               // max |a_tau_nu|
    double max_u_nunu = 0.0;
    double tol_geom = 0.0;
    bool curvature_pass = false;
    bool mixed_pass = false;
};

/// Quadratic fit of u in the (tangent, interior normal) frame at equally
/// spaced boundary parameters, using nodes and cut points within 4h with
/// weights (1 - d/4h)^2 and u = 0 at the foot point. `tol_geom` <= 0
/// selects 0.05 * mean c0. Throws GeometryError when a fit is singular.
BoundaryExpansionReport boundary_expansion_check(const Field& field, const DomainCurve& curve, int samples,
                                                 double tol_geom = 0.0);

struct NormalSecondDerivative {
    double max_u_nunu = 0.0;
    double tol_geom = 0.0;
    bool pass = false;  // max u_nunu < -tol_geom
};

/// Sign of the normal second derivative on the boundary (nonincreasing f).
NormalSecondDerivative u_nn_check(const Field& field, const DomainCurve& curve, int samples, double tol_geom = 0.0);

/// Integral of |kappa| ds over {|kappa| <= eps}: the length of the normal
/// image of the flat part of the boundary.
double gauss_map_measure(const DomainCurve& curve, double eps);

struct VerdictParams {
    double h = 1.0 / 64;
    int K = 8;
    double tol = 1e-6;
    int directions = 16;
    /// Scan step as a fraction of the diameter.
    double ds_fraction = 1e-3;
    int threads = 1;
};

struct SymmetryVerdict {
    std::vector<MovingPlaneReport> rows;
    double threshold = 0.0;  // 2 * tol
    bool all_symmetric = false;
    bool sufficient_coverage = false;  // at least 4 directions
    /// "ball", "not-ball" or "insufficient-coverage".
    std::string verdict() const;
};

/// Solves once, then runs critical_position and reflect_and_compare for
/// directions e_k = (cos 2 pi k / n, sin 2 pi k / n); rows in direction order.
SymmetryVerdict symmetry_verdict(const DomainCurve& curve, const OperatorSpec& spec, const SourceSpec& f,
                                 const VerdictParams& params = {});

/// Direction sweep on an existing solution.
SymmetryVerdict symmetry_verdict(const Field& field, const DomainCurve& curve, double tol, int directions,
                                 double ds_fraction = 1e-3, int threads = 1);

void write_planes_csv(std::ostream& out, const SymmetryVerdict& verdict);
void write_verdict_json(std::ostream& out, const SymmetryVerdict& verdict);
void write_expansion_csv(std::ostream& out, const BoundaryExpansionReport& report);

}  // namespace serrin
