#pragma once

#include "qam/integrator.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qam {

/// The four verification problems, each with a closed-form or conserved-quantity oracle.
enum class LadderStage { Heat, HeatPotential, Linear, Nls };

std::string to_string(LadderStage stage);
std::optional<LadderStage> parse_ladder_stage(std::string_view name);

struct LadderSetup {
    std::size_t n = 201;
    double x0 = -10.0;
    double x1 = 10.0;
    double t_end = 1.0;
};

/// Grid, horizon, and pass threshold used by each stage unless overridden.
LadderSetup default_setup(LadderStage stage);
double stage_threshold(LadderStage stage);

struct LadderRow {
    double tolerance = 0.0;
    double error = 0.0;           // stage metric (see stage_metric_name)
    double error_location = 0.0;  // x of the worst node (or time of worst drift)
    double energy_drift = 0.0;    // relative, NLS only
    StepStats stats;
};

struct LadderReport {
    LadderStage stage;
    LadderSetup setup;
    double threshold = 0.0;
    std::vector<LadderRow> rows;
    bool passed = false;  // judged on the tightest tolerance
};

std::string stage_metric_name(LadderStage stage);

/// Runs `stage` once per integrator tolerance (abs = rel) and compares each
/// result against the stage oracle.
LadderReport run_ladder_stage(LadderStage stage, const LadderSetup& setup,
                              const std::vector<double>& tolerances = {1e-4, 1e-6, 1e-8});

/// Analytic heat kernel for diffusivity 1/2 with initial profile exp(-x^2/2).
double heat_kernel_solution(double x, double t);

}  // namespace qam
