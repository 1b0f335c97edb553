#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qam {

using Complex = std::complex<double>;

/// Complex amplitudes over the grid nodes, one entry per line.
using Field = std::vector<Complex>;

/// Raised for invalid configuration values (bad bounds, too few nodes, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform 1-D grid over [s0, s1] with n nodes.
///
/// nodes[0] == s0 and nodes[n-1] == s1 exactly; interior nodes are s0 + k*ds.
class Grid {
public:
    Grid(double s0, double s1, std::size_t n);

    double lower() const { return s0_; }
    double upper() const { return s1_; }
    std::size_t size() const { return nodes_.size(); }
    double spacing() const { return ds_; }
    double length() const { return s1_ - s0_; }

    double operator[](std::size_t k) const { return nodes_[k]; }
    std::span<const double> nodes() const { return nodes_; }

private:
    double s0_;
    double s1_;
    double ds_;
    std::vector<double> nodes_;
};

/// Validating factory; throws ConfigError for n < 3 or s1 <= s0.
Grid make_grid(double s0, double s1, std::size_t n);

enum class BoundaryKind { PeriodicWrap, FixedValue, ZeroFlux };

struct BoundaryPolicy {
    BoundaryKind kind = BoundaryKind::PeriodicWrap;
    Complex left_value{0.0, 0.0};  // only meaningful for FixedValue

    static BoundaryPolicy periodic() { return {BoundaryKind::PeriodicWrap, {}}; }
    static BoundaryPolicy fixed(Complex left) { return {BoundaryKind::FixedValue, left}; }
    static BoundaryPolicy zero_flux() { return {BoundaryKind::ZeroFlux, {}}; }
};

std::string to_string(BoundaryKind kind);

/// Overwrites boundary values required by the policy (the left end for FixedValue).
void impose_boundary(Field& field, const BoundaryPolicy& policy);

/// Central second difference (f[k+1] - 2 f[k] + f[k-1]) / ds^2.
///
/// Boundary rows:
///  - PeriodicWrap: neighbours wrap modulo n, so node 0 and node n-1 are adjacent.
///  - FixedValue:   both boundary entries are zero (values held).
///  - ZeroFlux:     ghost node mirrors the adjacent interior node.
///
/// `out` must have the same length as `field`; it may not alias it.
void second_difference(std::span<const Complex> field, const Grid& grid,
                       const BoundaryPolicy& policy, std::span<Complex> out);

Field second_difference(const Field& field, const Grid& grid, const BoundaryPolicy& policy);

}  // namespace qam
