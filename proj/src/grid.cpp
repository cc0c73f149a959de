#include "serrin/grid.hpp"

#include "local_fit.hpp"
#include "serrin/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace serrin {

namespace {

// Frame generators (p, q); the frame is {(p, q), (-q, p)}.
constexpr std::array<LatticeVec, 8> kFrameGenerators{{
    {1, 0}, {1, 1}, {2, 1}, {1, 2}, {3, 1}, {1, 3}, {3, 2}, {2, 3},
}};

}  // namespace

Stencil::Stencil(int K) {
    if (K < 4 || K % 4 != 0 || K / 4 > static_cast<int>(kFrameGenerators.size()) || (K / 4 > 2 && K % 8 != 0)) {
        throw std::invalid_argument("stencil size K must be one of 4, 8, 16, 24, 32 (got " + std::to_string(K) + ")");
    }
    for (int f = 0; f < K / 4; ++f) {
        const LatticeVec v = kFrameGenerators[f];
        lines_.push_back(v);
        lines_.push_back({-v.j, v.i});
    }
}

LatticeVec Stencil::direction(int d) const {
    const LatticeVec v = lines_[d / 2];
    return d % 2 == 0 ? v : LatticeVec{-v.i, -v.j};
}

int Stencil::reach() const {
    int r = 0;
    for (const auto& v : lines_) r = std::max({r, std::abs(v.i), std::abs(v.j)});
    return r;
}

Grid::Grid(std::shared_ptr<const Region> region, double h, Stencil stencil)
    : region_(std::move(region)), h_(h), stencil_(std::move(stencil)) {
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    const Box box = region_->bounds();
    if (2.0 * h > std::min(box.hi.x - box.lo.x, box.hi.y - box.lo.y)) {
        throw GeometryError("empty interior: spacing h exceeds half the width of the domain");
    }
    i_min_ = static_cast<int>(std::floor(box.lo.x / h)) - 1;
    j_min_ = static_cast<int>(std::floor(box.lo.y / h)) - 1;
    nx_ = static_cast<int>(std::ceil(box.hi.x / h)) + 2 - i_min_;
    ny_ = static_cast<int>(std::ceil(box.hi.y / h)) + 2 - j_min_;
    lookup_.assign(static_cast<std::size_t>(nx_) * ny_, -1);

    for (int jj = 0; jj < ny_; ++jj) {
        for (int ii = 0; ii < nx_; ++ii) {
            const int i = ii + i_min_;
            const int j = jj + j_min_;
            const Vec2 x{i * h, j * h};
            // nodes within roundoff of the boundary belong to the boundary
            if (region_->signed_distance(x) > 1e-10 * h) {
                lookup_[static_cast<std::size_t>(jj) * nx_ + ii] = static_cast<int>(nodes_.size());
                nodes_.push_back({i, j, x});
            }
        }
    }
    if (nodes_.empty()) throw GeometryError("empty interior: no lattice node lies inside the domain");

    const int K = stencil_.directions();
    arms_.resize(nodes_.size() * K);
    boundary_cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const GridNode& nd = nodes_[n];
        for (int d = 0; d < K; ++d) {
            const LatticeVec v = stencil_.direction(d);
            Arm& arm = arms_[n * K + d];
            const int nb = index(nd.i + v.i, nd.j + v.j);
            const Vec2 end{(nd.i + v.i) * h, (nd.j + v.j) * h};
            if (nb >= 0) {
                arm.length = norm(end - nd.x);
                arm.neighbor = nb;
                continue;
            }
            const double full = norm(end - nd.x);
            double s = region_->crossing(nd.x, end);
            s = std::clamp(s, 1e-12 * h, full);
            const Vec2 foot = nd.x + (s / full) * (end - nd.x);
            arm.length = s;
            arm.boundary = static_cast<int>(boundary_points_.size());
            boundary_points_.push_back(foot);
            const int ci = std::clamp(static_cast<int>(std::floor(foot.x / h)) - i_min_, 0, nx_ - 1);
            const int cj = std::clamp(static_cast<int>(std::floor(foot.y / h)) - j_min_, 0, ny_ - 1);
            boundary_cells_[static_cast<std::size_t>(cj) * nx_ + ci].push_back(arm.boundary);
        }
    }
}

int Grid::index(int i, int j) const {
    const int ii = i - i_min_;
    const int jj = j - j_min_;
    if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) return -1;
    return lookup_[static_cast<std::size_t>(jj) * nx_ + ii];
}

int Grid::nearest_index(Vec2 p) const {
    return index(static_cast<int>(std::lround(p.x / h_)), static_cast<int>(std::lround(p.y / h_)));
}

bool Grid::full_stencil(std::size_t node) const {
    const int K = stencil_.directions();
    for (int d = 0; d < K; ++d)
        if (arms_[node * K + d].neighbor < 0) return false;
    return true;
}

std::vector<int> Grid::nodes_within(Vec2 p, double radius) const {
    std::vector<int> out;
    const int i0 = static_cast<int>(std::floor((p.x - radius) / h_));
    const int i1 = static_cast<int>(std::ceil((p.x + radius) / h_));
    const int j0 = static_cast<int>(std::floor((p.y - radius) / h_));
    const int j1 = static_cast<int>(std::ceil((p.y + radius) / h_));
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const int n = index(i, j);
            if (n >= 0 && norm(nodes_[n].x - p) <= radius) out.push_back(n);
        }
    }
    return out;
}

std::vector<int> Grid::boundary_points_within(Vec2 p, double radius) const {
    std::vector<int> out;
    const int i0 = std::max(static_cast<int>(std::floor((p.x - radius) / h_)) - i_min_, 0);
    const int i1 = std::min(static_cast<int>(std::floor((p.x + radius) / h_)) - i_min_, nx_ - 1);
    const int j0 = std::max(static_cast<int>(std::floor((p.y - radius) / h_)) - j_min_, 0);
    const int j1 = std::min(static_cast<int>(std::floor((p.y + radius) / h_)) - j_min_, ny_ - 1);
    for (int cj = j0; cj <= j1; ++cj)
        for (int ci = i0; ci <= i1; ++ci)
            for (int b : boundary_cells_[static_cast<std::size_t>(cj) * nx_ + ci])
                if (norm(boundary_points_[b] - p) <= radius) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Region> region, double h, int K) {
    return std::make_shared<const Grid>(std::move(region), h, Stencil(K));
}

std::shared_ptr<const Grid> build_grid(const DomainCurve& curve, double h, int K) {
    if (!curve.is_simple()) throw GeometryError("curve '" + curve.name() + "' is not simple");
    return build_grid(std::make_shared<const DomainCurve>(curve), h, K);
}

// --- Field -------------------------------------------------------------------

Field::Field(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0), boundary_values_(grid_->boundary_points().size(), 0.0) {}

Field::Field(std::shared_ptr<const Grid> grid, std::vector<double> values, std::vector<double> boundary_values)
    : grid_(std::move(grid)), values_(std::move(values)), boundary_values_(std::move(boundary_values)) {
    if (values_.size() != grid_->size() || boundary_values_.size() != grid_->boundary_points().size()) {
        throw std::invalid_argument("field sizes do not match the grid");
    }
}

Field Field::sample(std::shared_ptr<const Grid> grid, const std::function<double(Vec2)>& fn,
                    const BoundaryData& boundary) {
    Field f(std::move(grid));
    for (std::size_t n = 0; n < f.values_.size(); ++n) f.values_[n] = fn(f.grid_->node(n).x);
    if (boundary) {
        const auto pts = f.grid_->boundary_points();
        for (std::size_t b = 0; b < pts.size(); ++b) f.boundary_values_[b] = boundary(pts[b]);
    }
    return f;
}

double Field::arm_value(std::size_t node, int direction) const {
    const Arm& a = grid_->arm(node, direction);
    return a.neighbor >= 0 ? values_[a.neighbor] : boundary_values_[a.boundary];
}

double Field::interpolate(Vec2 p) const {
    const Grid& g = *grid_;
    const double h = g.h();
    if (g.region().signed_distance(p) < -1e-9 * h) {
        throw GeometryError("interpolation point lies outside the domain");
    }
    const int ic = static_cast<int>(std::lround(p.x / h));
    const int jc = static_cast<int>(std::lround(p.y / h));
    std::array<int, 9> block{};
    bool full = true;
    for (int b = -1; b <= 1 && full; ++b)
        for (int a = -1; a <= 1 && full; ++a) {
            const int n = g.index(ic + a, jc + b);
            if (n < 0) full = false;
            block[(b + 1) * 3 + (a + 1)] = n;
        }
    if (full) {
        const double xi = p.x / h - ic;
        const double eta = p.y / h - jc;
        const std::array<double, 3> lx{0.5 * xi * (xi - 1), 1 - xi * xi, 0.5 * xi * (xi + 1)};
        const std::array<double, 3> ly{0.5 * eta * (eta - 1), 1 - eta * eta, 0.5 * eta * (eta + 1)};
        double v = 0.0;
        for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) v += ly[b] * lx[a] * values_[block[b * 3 + a]];
        return v;
    }

    for (double radius : {2.5 * h, 3.5 * h, 5.0 * h}) {
        std::vector<detail::FitSample> samples;
        for (int n : g.nodes_within(p, radius)) {
            const double d = norm(g.node(n).x - p);
            samples.push_back({g.node(n).x, values_[n], std::pow(1.0 - d / radius, 2) + 1e-3});
        }
        for (int b : g.boundary_points_within(p, radius)) {
            const double d = norm(g.boundary_points()[b] - p);
            samples.push_back({g.boundary_points()[b], boundary_values_[b], std::pow(1.0 - d / radius, 2) + 1e-3});
        }
        if (samples.size() < 10) continue;
        if (auto fit = detail::fit_quadratic(samples, p, {1.0, 0.0}, h, false)) return fit->c;
    }
    throw GeometryError("too few samples for interpolation near the boundary");
}

}  // namespace serrin
