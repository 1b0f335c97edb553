#pragma once

#include "qam/grid.hpp"
#include "qam/integrator.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qam {

/// Real potential over the grid: either one constant or a per-node table.
class Potential {
public:
    static Potential constant(double value);
    static Potential tabulated(std::vector<double> values);

    double at(std::size_t k) const { return table_.empty() ? value_ : table_[k]; }
    bool is_constant() const { return table_.empty(); }

    /// Throws ConfigError if a table's length differs from the grid or holds non-finite entries.
    void validate(const Grid& grid) const;

private:
    double value_ = 0.0;
    std::vector<double> table_;
};

// Method-of-lines right-hand sides. Each returns the explicit time derivative.

/// d psi/dt = (1/2) D2 psi
Field heat_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy);

/// d psi/dt = (1/2) D2 psi + V_k psi_k
Field heat_potential_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
                         const Potential& v);

/// i d psi/dt = -(1/2) D2 psi + V_k psi_k, solved for d psi/dt.
Field linear_schrodinger_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
                             const Potential& v);

/// i d psi/dt = -(1/2) D2 psi + V_k |psi_k|^2 psi_k, solved for d psi/dt.
/// V < 0 is the focusing case.
Field nls_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
              const Potential& v);

/// Discrete mass sum_k |psi_k|^2 ds.
double mass(const Field& field, const Grid& grid);

/// Discrete Hamiltonian sum_k [ (1/2)|D1 psi|_k^2 + (V_k/2)|psi_k|^4 ] ds, with
/// centred first differences (wrapped for periodic, one-sided at the ends otherwise).
double energy(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
              const Potential& v);

// Complex <-> real adapter: (Re psi_0, Im psi_0, Re psi_1, Im psi_1, ...).

std::vector<double> pack(const Field& field);
Field unpack(std::span<const double> values);
void unpack_into(std::span<const double> values, std::span<Complex> out);

using FieldRhs = std::function<Field(const Field&)>;

/// Wraps an autonomous field derivative as a real OdeSystem of dimension 2n.
OdeSystem as_ode_system(std::size_t n, FieldRhs rhs);

}  // namespace qam
