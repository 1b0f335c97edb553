#include "qam/grid.hpp"

#include <cassert>

namespace qam {

Grid::Grid(double s0, double s1, std::size_t n) : s0_(s0), s1_(s1), ds_(0.0) {
    if (n < 3) {
        throw ConfigError("grid needs at least 3 nodes, got " + std::to_string(n));
    }
    if (!(s1 > s0)) {
        throw ConfigError("grid upper bound must exceed lower bound");
    }
    ds_ = (s1 - s0) / static_cast<double>(n - 1);
    nodes_.resize(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        nodes_[k] = s0 + static_cast<double>(k) * ds_;
    }
    nodes_[n - 1] = s1;
}

Grid make_grid(double s0, double s1, std::size_t n) { return Grid(s0, s1, n); }

std::string to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::PeriodicWrap: return "periodic";
    case BoundaryKind::FixedValue: return "fixed";
    case BoundaryKind::ZeroFlux: return "zero-flux";
    }
    return "unknown";
}

void impose_boundary(Field& field, const BoundaryPolicy& policy) {
    if (policy.kind == BoundaryKind::FixedValue && !field.empty()) {
        field.front() = policy.left_value;
    }
}

void second_difference(std::span<const Complex> f, const Grid& grid,
                       const BoundaryPolicy& policy, std::span<Complex> out) {
    const std::size_t n = grid.size();
    assert(f.size() == n && out.size() == n);
    const double inv_ds2 = 1.0 / (grid.spacing() * grid.spacing());

    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * inv_ds2;
    }

    switch (policy.kind) {
    case BoundaryKind::PeriodicWrap:
        out[0] = (f[1] - 2.0 * f[0] + f[n - 1]) * inv_ds2;
        out[n - 1] = (f[0] - 2.0 * f[n - 1] + f[n - 2]) * inv_ds2;
        break;
    case BoundaryKind::FixedValue:
        out[0] = Complex{};
        out[n - 1] = Complex{};
        break;
    case BoundaryKind::ZeroFlux:
        out[0] = (f[1] - 2.0 * f[0] + f[1]) * inv_ds2;
        out[n - 1] = (f[n - 2] - 2.0 * f[n - 1] + f[n - 2]) * inv_ds2;
        break;
    }
}

Field second_difference(const Field& field, const Grid& grid, const BoundaryPolicy& policy) {
    if (field.size() != grid.size()) {
        throw std::invalid_argument("second_difference: field length does not match grid");
    }
    Field out(field.size());
    second_difference(field, grid, policy, out);
    return out;
}

}  // namespace qam
