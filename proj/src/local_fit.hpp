#pragma once

#include "serrin/geometry.hpp"

#include <optional>
#include <vector>

namespace serrin::detail {

/// q(xi, eta) = c + g1 xi + g2 eta + h11 xi^2/2 + h12 xi eta + h22 eta^2/2
/// in the frame (origin, e1, e2 = perp(e1)).
struct QuadraticFit {
    double c = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double h11 = 0.0;
    double h12 = 0.0;
    double h22 = 0.0;
};

struct FitSample {
    Vec2 x;
    double value;
    double weight;
};

/// Weighted least squares; `fix_constant` pins c = 0. `scale` is a length
/// used to nondimensionalise the design matrix. Returns nullopt when the
/// samples do not determine the quadratic.
std::optional<QuadraticFit> fit_quadratic(const std::vector<FitSample>& samples, Vec2 origin, Vec2 e1,
                                          double scale, bool fix_constant);

}  // namespace serrin::detail
