#pragma once

#include "serrin/geometry.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace serrin {

struct LatticeVec {
    int i = 0;
    int j = 0;
    friend constexpr bool operator==(const LatticeVec&, const LatticeVec&) = default;
};

/// Wide stencil with K neighbour directions: K/2 lines through the node,
/// grouped into K/4 orthogonal frames (lines 2f and 2f + 1 form frame f).
/// Line 0 is e1 and line 1 is e2.
/// Direction index d = 2*line (+v) or 2*line + 1 (-v).
class Stencil {
public:
    explicit Stencil(int K);

    int directions() const { return static_cast<int>(lines_.size()) * 2; }
    int line_count() const { return static_cast<int>(lines_.size()); }
    int frame_count() const { return static_cast<int>(lines_.size()) / 2; }
    LatticeVec line(int l) const { return lines_[l]; }
    /// Lattice vector of direction d (signed).
    LatticeVec direction(int d) const;
    /// Largest lattice coordinate of any line vector.
    int reach() const;

private:
    std::vector<LatticeVec> lines_;
};

/// One stencil arm of an interior node: either a full arm to an interior
/// neighbour or a cut arm ending on the boundary.
struct Arm {
    double length = 0.0;  // physical length
    int neighbor = -1;    // interior node index, or -1
    int boundary = -1;    // index into Grid::boundary_points when cut
};

struct GridNode {
    int i = 0;
    int j = 0;
    Vec2 x;
};

/// Uniform lattice {(i h, j h)} restricted to an open region. Lattice points
/// within 1e-10 h of the boundary count as boundary points, not nodes.
class Grid {
public:
    Grid(std::shared_ptr<const Region> region, double h, Stencil stencil);

    double h() const { return h_; }
    const Region& region() const { return *region_; }
    std::shared_ptr<const Region> region_ptr() const { return region_; }
    const Stencil& stencil() const { return stencil_; }

    std::size_t size() const { return nodes_.size(); }
    const GridNode& node(std::size_t n) const { return nodes_[n]; }
    std::span<const GridNode> nodes() const { return nodes_; }

    /// Interior node index at lattice (i, j), or -1.
    int index(int i, int j) const;
    int nearest_index(Vec2 p) const;

    const Arm& arm(std::size_t node, int direction) const { return arms_[node * stencil_.directions() + direction]; }
    std::span<const Vec2> boundary_points() const { return boundary_points_; }
    /// True if every arm of the node has full length.
    bool full_stencil(std::size_t node) const;

    /// Interior nodes within `radius` of p (by lattice scan).
    std::vector<int> nodes_within(Vec2 p, double radius) const;
    /// Boundary (cut) points within `radius` of p.
    std::vector<int> boundary_points_within(Vec2 p, double radius) const;

private:
    std::shared_ptr<const Region> region_;
    double h_;
    Stencil stencil_;
    int i_min_ = 0;
    int j_min_ = 0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<int> lookup_;
    std::vector<GridNode> nodes_;
    std::vector<Arm> arms_;
    std::vector<Vec2> boundary_points_;
    std::vector<std::vector<int>> boundary_cells_;  // boundary points per lattice cell
};

/// Throws GeometryError on an empty interior (including 2h wider than the
/// narrower side of the bounding box) or a non-simple curve.
std::shared_ptr<const Grid> build_grid(const DomainCurve& curve, double h, int K = 8);
std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Region> region, double h, int K = 8);

using BoundaryData = std::function<double(Vec2)>;

/// Values on interior nodes plus Dirichlet values at the cut points.
class Field {
public:
    explicit Field(std::shared_ptr<const Grid> grid);
    Field(std::shared_ptr<const Grid> grid, std::vector<double> values, std::vector<double> boundary_values);

    /// Samples `fn` at nodes; boundary values from `boundary` (zero if empty).
    static Field sample(std::shared_ptr<const Grid> grid, const std::function<double(Vec2)>& fn,
                        const BoundaryData& boundary = {});

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t n) const { return values_[n]; }
    double& operator[](std::size_t n) { return values_[n]; }
    std::span<const double> boundary_values() const { return boundary_values_; }

    /// Value at the far end of an arm.
    double arm_value(std::size_t node, int direction) const;

    /// Biquadratic Lagrange interpolation on a full 3x3 block; near the
    /// boundary a weighted local quadratic fit including cut points. Exact
    /// for quadratic fields. Throws GeometryError when p is outside the
    /// region or too few samples are available.
    double interpolate(Vec2 p) const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
    std::vector<double> boundary_values_;
};

}  // namespace serrin
