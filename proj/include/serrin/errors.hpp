#pragma once

#include <stdexcept>
#include <string>

namespace serrin {

/// Raised when an iterative or shooting computation fails to deliver a
/// result (divergence, exhausted bracket, NaN, iteration cap).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a geometric query cannot be answered on the given data
/// (point outside the grid, too few nodes for a local fit, ...).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace serrin
