#include "qam/ladder.hpp"

#include <cmath>
#include <stdexcept>

namespace qam {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_length(const Field& field, const Grid& grid) {
    if (field.size() != grid.size()) {
        throw std::invalid_argument("field length does not match grid");
    }
}

}  // namespace

Potential Potential::constant(double value) {
    Potential p;
    p.value_ = value;
    return p;
}

Potential Potential::tabulated(std::vector<double> values) {
    Potential p;
    p.table_ = std::move(values);
    return p;
}

void Potential::validate(const Grid& grid) const {
    if (is_constant()) {
        if (!std::isfinite(value_)) throw ConfigError("potential value must be finite");
        return;
    }
    if (table_.size() != grid.size()) throw ConfigError("potential table length != grid size");
    for (double v : table_) {
        if (!std::isfinite(v)) throw ConfigError("potential table holds a non-finite entry");
    }
}

Field heat_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy) {
    Field out = second_difference(field, grid, policy);
    for (auto& z : out) z *= 0.5;
    return out;
}

Field heat_potential_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
                         const Potential& v) {
    Field out = heat_rhs(field, grid, policy);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += v.at(k) * field[k];
    if (policy.kind == BoundaryKind::FixedValue) {
        out.front() = Complex{};
        out.back() = Complex{};
    }
    return out;
}

Field linear_schrodinger_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
                             const Potential& v) {
    Field out = second_difference(field, grid, policy);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = kI * (0.5 * out[k] - v.at(k) * field[k]);
    }
    if (policy.kind == BoundaryKind::FixedValue) {
        out.front() = Complex{};
        out.back() = Complex{};
    }
    return out;
}

Field nls_rhs(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
              const Potential& v) {
    Field out = second_difference(field, grid, policy);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = kI * (0.5 * out[k] - v.at(k) * std::norm(field[k]) * field[k]);
    }
    if (policy.kind == BoundaryKind::FixedValue) {
        out.front() = Complex{};
        out.back() = Complex{};
    }
    return out;
}

double mass(const Field& field, const Grid& grid) {
    require_length(field, grid);
    double sum = 0.0;
    for (const auto& z : field) sum += std::norm(z);
    return sum * grid.spacing();
}

double energy(const Field& field, const Grid& grid, const BoundaryPolicy& policy,
              const Potential& v) {
    require_length(field, grid);
    const std::size_t n = field.size();
    const double ds = grid.spacing();
    const bool periodic = policy.kind == BoundaryKind::PeriodicWrap;

    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex dpsi;
        if (k == 0) {
            dpsi = periodic ? (field[1] - field[n - 1]) / (2.0 * ds) : (field[1] - field[0]) / ds;
        } else if (k == n - 1) {
            dpsi = periodic ? (field[0] - field[n - 2]) / (2.0 * ds)
                            : (field[n - 1] - field[n - 2]) / ds;
        } else {
            dpsi = (field[k + 1] - field[k - 1]) / (2.0 * ds);
        }
        const double rho = std::norm(field[k]);
        sum += 0.5 * std::norm(dpsi) + 0.5 * v.at(k) * rho * rho;
    }
    return sum * ds;
}

std::vector<double> pack(const Field& field) {
    std::vector<double> out(2 * field.size());
    for (std::size_t k = 0; k < field.size(); ++k) {
        out[2 * k] = field[k].real();
        out[2 * k + 1] = field[k].imag();
    }
    return out;
}

void unpack_into(std::span<const double> values, std::span<Complex> out) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = Complex{values[2 * k], values[2 * k + 1]};
    }
}

Field unpack(std::span<const double> values) {
    if (values.size() % 2 != 0) throw std::invalid_argument("unpack: odd number of reals");
    Field out(values.size() / 2);
    unpack_into(values, out);
    return out;
}

OdeSystem as_ode_system(std::size_t n, FieldRhs rhs) {
    OdeSystem sys;
    sys.dimension = 2 * n;
    sys.rhs = [n, rhs = std::move(rhs)](double, std::span<const double> y,
                                        std::span<double> dydt) {
        Field field(n);
        unpack_into(y, field);
        const Field d = rhs(field);
        for (std::size_t k = 0; k < n; ++k) {
            dydt[2 * k] = d[k].real();
            dydt[2 * k + 1] = d[k].imag();
        }
    };
    return sys;
}

}  // namespace qam
