#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qam {

/// Right-hand side y' = f(t, y). Writes the derivative into `dydt`.
using RhsFunction =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeSystem {
    std::size_t dimension = 0;
    RhsFunction rhs;
};

struct StepControl {
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    double h_init = 1e-3;
    double h_min = 1e-10;
    // Non-positive means "(t1 - t0) / 10".
    double h_max = 0.0;
    double safety = 0.9;
    std::size_t max_steps = 10'000'000;

    /// Throws ConfigError when the bounds are inconsistent for an interval of `span`.
    void validate(double span) const;
    double resolved_h_max(double span) const { return h_max > 0.0 ? h_max : span / 10.0; }
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double min_h_used = std::numeric_limits<double>::infinity();
    double max_h_used = 0.0;
    std::size_t rhs_evaluations = 0;

    void merge(const StepStats& other);
};

enum class IntegrationFailure { StepBudget, Stiffness };

/// Thrown by integrate_adaptive; carries the statistics gathered so far.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(IntegrationFailure kind, double t, StepStats stats, const std::string& what)
        : std::runtime_error(what), kind_(kind), t_(t), stats_(stats) {}

    IntegrationFailure kind() const { return kind_; }
    double time() const { return t_; }
    const StepStats& stats() const { return stats_; }

private:
    IntegrationFailure kind_;
    double t_;
    StepStats stats_;
};

struct CashKarpResult {
    std::vector<double> y5;
    std::vector<double> err;
    bool finite = true;  // false if any stage derivative or y5 entry was non-finite
};

/// One Cash-Karp step of size h from (t, y): fifth-order solution plus the
/// embedded 5th-minus-4th error estimate.
CashKarpResult cash_karp_step(const OdeSystem& system, double t, std::span<const double> y,
                              double h);

/// Scaled max-norm: max_k |err_k| / (abs_tol + rel_tol * |y_k|).
double error_norm(std::span<const double> err, std::span<const double> y, double abs_tol,
                  double rel_tol);

using Observer = std::function<void(double t, std::span<const double> y)>;

struct IntegrationResult {
    std::vector<double> y;
    StepStats stats;
    double next_h = 0.0;  // step size the controller would try next
};

/// Adaptive Cash-Karp integration from t0 to t1 (t1 > t0). The last step is
/// truncated to land exactly on t1. `observer` (may be empty) sees every
/// accepted step.
IntegrationResult integrate_adaptive(const OdeSystem& system, double t0, double t1,
                                     std::span<const double> y0, const StepControl& ctl,
                                     const Observer& observer = {});

}  // namespace qam
