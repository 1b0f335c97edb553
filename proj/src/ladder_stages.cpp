#include "qam/ladder_stages.hpp"

#include "qam/ladder.hpp"

#include <algorithm>
#include <cmath>

namespace qam {

namespace {

struct MaxDeviation {
    double value = 0.0;
    double where = 0.0;
};

MaxDeviation max_deviation(const Grid& grid, const Field& field, auto&& reference) {
    MaxDeviation worst;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dev = reference(k, field[k]);
        if (dev > worst.value) worst = {dev, grid[k]};
    }
    return worst;
}

StepControl control_for(double tol, double span) {
    StepControl ctl;
    ctl.abs_tol = tol;
    ctl.rel_tol = tol;
    ctl.h_max = span / 10.0;
    return ctl;
}

constexpr double kHeatPotentialValue = 1.0;
constexpr double kLinearPotentialValue = 1.0;
constexpr double kLinearWaveNumber = 2.0;
constexpr double kNlsPotentialValue = -1.0;

LadderRow run_once(LadderStage stage, const Grid& grid, double t_end, double tol) {
    const auto policy = BoundaryPolicy::periodic();
    const std::size_t n = grid.size();
    LadderRow row;
    row.tolerance = tol;

    Field psi0(n);
    FieldRhs rhs;
    Potential v = Potential::constant(0.0);
    switch (stage) {
    case LadderStage::Heat:
        for (std::size_t k = 0; k < n; ++k) psi0[k] = heat_kernel_solution(grid[k], 0.0);
        rhs = [&](const Field& f) { return heat_rhs(f, grid, policy); };
        break;
    case LadderStage::HeatPotential:
        v = Potential::constant(kHeatPotentialValue);
        for (std::size_t k = 0; k < n; ++k) psi0[k] = heat_kernel_solution(grid[k], 0.0);
        rhs = [&](const Field& f) { return heat_potential_rhs(f, grid, policy, v); };
        break;
    case LadderStage::Linear:
        v = Potential::constant(kLinearPotentialValue);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = grid[k];
            psi0[k] = std::exp(-0.5 * x * x) * std::polar(1.0, kLinearWaveNumber * x);
        }
        rhs = [&](const Field& f) { return linear_schrodinger_rhs(f, grid, policy, v); };
        break;
    case LadderStage::Nls:
        v = Potential::constant(kNlsPotentialValue);
        for (std::size_t k = 0; k < n; ++k) psi0[k] = 1.0 / std::cosh(grid[k]);
        rhs = [&](const Field& f) { return nls_rhs(f, grid, policy, v); };
        break;
    }

    const double mass0 = mass(psi0, grid);
    const double energy0 = energy(psi0, grid, policy, v);
    double worst_mass = 0.0, worst_mass_t = 0.0, worst_energy = 0.0;
    Observer observer = [&](double t, std::span<const double> y) {
        const Field f = unpack(y);
        if (stage == LadderStage::Linear) {
            const double drift = std::abs(mass(f, grid) - mass0);
            if (drift > worst_mass) {
                worst_mass = drift;
                worst_mass_t = t;
            }
        } else if (stage == LadderStage::Nls) {
            worst_energy =
                std::max(worst_energy, std::abs(energy(f, grid, policy, v) - energy0) /
                                           std::abs(energy0));
        }
    };

    const OdeSystem sys = as_ode_system(n, rhs);
    const bool observe = stage == LadderStage::Linear || stage == LadderStage::Nls;
    const auto result =
        integrate_adaptive(sys, 0.0, t_end, pack(psi0), control_for(tol, t_end),
                           observe ? observer : Observer{});
    row.stats = result.stats;
    const Field psi = unpack(result.y);

    MaxDeviation dev;
    switch (stage) {
    case LadderStage::Heat:
        dev = max_deviation(grid, psi, [&](std::size_t k, Complex z) {
            return std::abs(z - heat_kernel_solution(grid[k], t_end));
        });
        break;
    case LadderStage::HeatPotential:
        dev = max_deviation(grid, psi, [&](std::size_t k, Complex z) {
            return std::abs(z - std::exp(kHeatPotentialValue * t_end) *
                                    heat_kernel_solution(grid[k], t_end));
        });
        break;
    case LadderStage::Linear:
        dev = {worst_mass, worst_mass_t};
        break;
    case LadderStage::Nls:
        dev = max_deviation(grid, psi, [&](std::size_t k, Complex z) {
            return std::abs(std::abs(z) - 1.0 / std::cosh(grid[k]));
        });
        row.energy_drift = worst_energy;
        break;
    }
    row.error = dev.value;
    row.error_location = dev.where;
    return row;
}

}  // namespace

std::string to_string(LadderStage stage) {
    switch (stage) {
    case LadderStage::Heat: return "heat";
    case LadderStage::HeatPotential: return "heat-potential";
    case LadderStage::Linear: return "linear";
    case LadderStage::Nls: return "nls";
    }
    return "unknown";
}

std::optional<LadderStage> parse_ladder_stage(std::string_view name) {
    for (auto stage : {LadderStage::Heat, LadderStage::HeatPotential, LadderStage::Linear,
                       LadderStage::Nls}) {
        if (name == to_string(stage)) return stage;
    }
    return std::nullopt;
}

LadderSetup default_setup(LadderStage stage) {
    switch (stage) {
    case LadderStage::Heat: return {201, -10.0, 10.0, 1.0};
    case LadderStage::HeatPotential: return {201, -10.0, 10.0, 0.5};
    case LadderStage::Linear: return {201, -10.0, 10.0, 1.0};
    case LadderStage::Nls: return {401, -20.0, 20.0, 5.0};
    }
    return {};
}

double stage_threshold(LadderStage stage) {
    switch (stage) {
    case LadderStage::Heat:
    case LadderStage::HeatPotential: return 1e-4;
    case LadderStage::Linear: return 1e-6;
    case LadderStage::Nls: return 1e-3;
    }
    return 0.0;
}

std::string stage_metric_name(LadderStage stage) {
    switch (stage) {
    case LadderStage::Heat: return "max_abs_error_vs_heat_kernel";
    case LadderStage::HeatPotential: return "max_abs_error_vs_scaled_heat_kernel";
    case LadderStage::Linear: return "max_abs_mass_drift";
    case LadderStage::Nls: return "max_abs_modulus_error_vs_sech";
    }
    return "unknown";
}

double heat_kernel_solution(double x, double t) {
    return std::exp(-x * x / (2.0 * (1.0 + t))) / std::sqrt(1.0 + t);
}

LadderReport run_ladder_stage(LadderStage stage, const LadderSetup& setup,
                              const std::vector<double>& tolerances) {
    if (tolerances.empty()) throw ConfigError("at least one tolerance is required");
    if (!(setup.t_end > 0.0)) throw ConfigError("ladder horizon must be positive");
    const Grid grid = make_grid(setup.x0, setup.x1, setup.n);

    LadderReport report{stage, setup, stage_threshold(stage), {}, false};
    for (double tol : tolerances) {
        report.rows.push_back(run_once(stage, grid, setup.t_end, tol));
    }

    const auto tightest = std::min_element(
        report.rows.begin(), report.rows.end(),
        [](const LadderRow& a, const LadderRow& b) { return a.tolerance < b.tolerance; });
    report.passed = tightest->error < report.threshold;
    if (stage == LadderStage::Nls) {
        report.passed = report.passed && tightest->energy_drift < report.threshold;
    }
    return report;
}

}  // namespace qam
