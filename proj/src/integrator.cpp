#include "qam/integrator.hpp"

#include "qam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qam {

namespace {

// Cash & Karp (1990) tableau.
constexpr double a2 = 1.0 / 5.0;
constexpr double a3 = 3.0 / 10.0;
constexpr double a4 = 3.0 / 5.0;
constexpr double a5 = 1.0;
constexpr double a6 = 7.0 / 8.0;

constexpr double b21 = 1.0 / 5.0;
constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                 b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;

// Fifth-order weights.
constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
// Fourth-order weights.
constexpr double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0, d4 = 13525.0 / 55296.0,
                 d5 = 277.0 / 14336.0, d6 = 1.0 / 4.0;
// Error weights (fifth minus fourth).
constexpr double e1 = c1 - d1, e3 = c3 - d3, e4 = c4 - d4, e5 = -d5, e6 = c6 - d6;

constexpr double kMaxGrowth = 5.0;
constexpr double kMaxShrink = 0.1;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Reusable stage storage so the adaptive loop does not allocate per step.
class CashKarpStepper {
public:
    explicit CashKarpStepper(std::size_t n)
        : k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), tmp_(n), y5_(n), err_(n) {}

    // Returns false if a non-finite value appeared.
    bool step(const OdeSystem& sys, double t, std::span<const double> y, double h) {
        const std::size_t n = y.size();
        bool finite = true;

        sys.rhs(t, y, k1_);
        finite = finite && all_finite(k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * b21 * k1_[i];
        sys.rhs(t + a2 * h, tmp_, k2_);
        finite = finite && all_finite(k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (b31 * k1_[i] + b32 * k2_[i]);
        sys.rhs(t + a3 * h, tmp_, k3_);
        finite = finite && all_finite(k3_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (b41 * k1_[i] + b42 * k2_[i] + b43 * k3_[i]);
        sys.rhs(t + a4 * h, tmp_, k4_);
        finite = finite && all_finite(k4_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (b51 * k1_[i] + b52 * k2_[i] + b53 * k3_[i] + b54 * k4_[i]);
        sys.rhs(t + a5 * h, tmp_, k5_);
        finite = finite && all_finite(k5_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (b61 * k1_[i] + b62 * k2_[i] + b63 * k3_[i] + b64 * k4_[i] +
                                  b65 * k5_[i]);
        sys.rhs(t + a6 * h, tmp_, k6_);
        finite = finite && all_finite(k6_);

        for (std::size_t i = 0; i < n; ++i) {
            y5_[i] = y[i] + h * (c1 * k1_[i] + c3 * k3_[i] + c4 * k4_[i] + c6 * k6_[i]);
            err_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i]);
        }
        return finite && all_finite(y5_) && all_finite(err_);
    }

    const std::vector<double>& y5() const { return y5_; }
    const std::vector<double>& err() const { return err_; }

private:
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, tmp_, y5_, err_;
};

void check_dimension(const OdeSystem& system, std::size_t n) {
    if (system.dimension != n) {
        throw std::invalid_argument("state length does not match system dimension");
    }
}

}  // namespace

void StepControl::validate(double span) const {
    const double hmax = resolved_h_max(span);
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("safety factor must lie in (0, 1)");
    if (!(h_min > 0.0)) throw ConfigError("h_min must be positive");
    if (!(h_min <= hmax)) throw ConfigError("h_min must not exceed h_max");
    if (!(h_init > 0.0)) throw ConfigError("h_init must be positive");
    if (max_steps == 0) throw ConfigError("max_steps must be positive");
}

void StepStats::merge(const StepStats& other) {
    accepted += other.accepted;
    rejected += other.rejected;
    rhs_evaluations += other.rhs_evaluations;
    min_h_used = std::min(min_h_used, other.min_h_used);
    max_h_used = std::max(max_h_used, other.max_h_used);
}

CashKarpResult cash_karp_step(const OdeSystem& system, double t, std::span<const double> y,
                              double h) {
    check_dimension(system, y.size());
    if (!(h > 0.0)) throw std::invalid_argument("cash_karp_step: h must be positive");
    CashKarpStepper stepper(y.size());
    CashKarpResult result;
    result.finite = stepper.step(system, t, y, h);
    result.y5 = stepper.y5();
    result.err = stepper.err();
    return result;
}

double error_norm(std::span<const double> err, std::span<const double> y, double abs_tol,
                  double rel_tol) {
    double norm = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scaled = std::abs(err[i]) / (abs_tol + rel_tol * std::abs(y[i]));
        if (!(scaled <= norm)) norm = scaled;  // also propagates NaN as "not <="
    }
    return std::isnan(norm) ? std::numeric_limits<double>::infinity() : norm;
}

IntegrationResult integrate_adaptive(const OdeSystem& system, double t0, double t1,
                                     std::span<const double> y0, const StepControl& ctl,
                                     const Observer& observer) {
    check_dimension(system, y0.size());
    if (!(t1 > t0)) throw std::invalid_argument("integrate_adaptive: t1 must exceed t0");
    const double span = t1 - t0;
    ctl.validate(span);
    const double h_max = ctl.resolved_h_max(span);

    IntegrationResult result;
    result.y.assign(y0.begin(), y0.end());
    StepStats& stats = result.stats;
    CashKarpStepper stepper(y0.size());

    double t = t0;
    double h = std::clamp(ctl.h_init, ctl.h_min, h_max);

    while (t < t1) {
        if (stats.accepted + stats.rejected >= ctl.max_steps) {
            std::ostringstream msg;
            msg << "step budget of " << ctl.max_steps << " exhausted at t = " << t;
            throw IntegrationError(IntegrationFailure::StepBudget, t, stats, msg.str());
        }

        const double remaining = t1 - t;
        const bool last = remaining <= h * (1.0 + 1e-12);
        const double h_try = last ? remaining : h;

        const bool finite = stepper.step(system, t, result.y, h_try);
        stats.rhs_evaluations += 6;
        const double errnorm =
            finite ? error_norm(stepper.err(), result.y, ctl.abs_tol, ctl.rel_tol)
                   : std::numeric_limits<double>::infinity();

        double factor = errnorm == 0.0 ? kMaxGrowth : ctl.safety * std::pow(errnorm, -0.2);
        factor = std::clamp(factor, kMaxShrink, kMaxGrowth);

        if (errnorm <= 1.0) {
            t = last ? t1 : t + h_try;
            std::copy(stepper.y5().begin(), stepper.y5().end(), result.y.begin());
            ++stats.accepted;
            stats.min_h_used = std::min(stats.min_h_used, h_try);
            stats.max_h_used = std::max(stats.max_h_used, h_try);
            if (observer) observer(t, result.y);
            // A truncated final step says nothing about the natural step size.
            const double proposed = std::clamp(h_try * factor, ctl.h_min, h_max);
            h = last && h_try < h ? std::max(h, proposed) : proposed;
        } else {
            ++stats.rejected;
            if (h_try <= ctl.h_min) {
                std::ostringstream msg;
                msg << "error tolerance not satisfiable at minimum step " << ctl.h_min
                    << " at t = " << t << " (scaled error " << errnorm << ")";
                throw IntegrationError(IntegrationFailure::Stiffness, t, stats, msg.str());
            }
            h = std::max(h_try * std::min(factor, 1.0), ctl.h_min);
        }
    }

    result.next_h = h;
    return result;
}

}  // namespace qam
