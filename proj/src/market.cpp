#include "qam/market.hpp"

#include "qam/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qam {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kSigmaInitial = 0.25;
constexpr double kPsiInitial = 1.0;

double uniform_open_pm1(std::mt19937_64& gen) {
    const double u = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

void check_finite(Complex z, std::size_t node, double t, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        std::ostringstream msg;
        msg << "non-finite " << what << " at node " << node << ", t = " << t;
        throw NonFiniteStateError(node, t, msg.str());
    }
}

Snapshot make_snapshot(const MarketState& state, const Grid& grid, const KernelParams& params) {
    Snapshot snap;
    snap.t = state.t;
    snap.sigma = state.sigma;
    snap.psi = state.psi;
    snap.w = state.w;
    snap.g = gaussian_kernels(state.t, state, grid, params);
    snap.potential = potential(snap.w, snap.g);
    snap.mass_sigma = mass(state.sigma, grid);
    snap.mass_psi = mass(state.psi, grid);
    return snap;
}

}  // namespace

void ModelConfig::validate() const {
    if (!(r >= 0.0)) throw ConfigError("r must be non-negative");
    if (!(c >= 0.0)) throw ConfigError("c must be non-negative");
    if (n < 3) throw ConfigError("n must be at least 3");
    if (!(s1 > s0)) throw ConfigError("s1 must exceed s0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (!(snapshot_stride > 0.0)) throw ConfigError("snapshot_stride must be positive");
}

double target_signal(double t) { return 2.0 * std::sin(60.0 * t); }

double target_output(const MarketState& state, const Grid& grid) {
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) sum += grid[k] * std::norm(state.sigma[k]);
    return sum * grid.spacing();
}

std::vector<double> gaussian_kernels(double t, const MarketState& state, const Grid& grid,
                                     const KernelParams& params) {
    const double d = target_output(state, grid) - target_signal(t);
    std::vector<double> g(params.m.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = d - params.m[i] * d;
        g[i] = std::exp(-a * a);
    }
    return g;
}

double potential(std::span<const double> w, std::span<const double> g) {
    if (w.size() != g.size()) throw std::invalid_argument("potential: length mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * g[i];
    return v;
}

std::vector<double> hebbian_rhs(const MarketState& state, std::span<const double> g, double c) {
    std::vector<double> dw(state.w.size());
    for (std::size_t i = 0; i < dw.size(); ++i) {
        dw[i] = -state.w[i] + c * std::abs(state.sigma[i]) * g[i] * std::abs(state.psi[i]);
    }
    return dw;
}

MarketDerivative coupled_rhs(double t, const MarketState& state, const Grid& grid,
                             const KernelParams& params, const ModelConfig& config) {
    const std::size_t n = grid.size();
    const auto policy = BoundaryPolicy::periodic();

    const auto g = gaussian_kernels(t, state, grid, params);
    const double v = potential(state.w, g);

    MarketDerivative d;
    d.dsigma = second_difference(state.sigma, grid, policy);
    d.dpsi = second_difference(state.psi, grid, policy);
    for (std::size_t k = 0; k < n; ++k) {
        const double s2 = grid[k] * grid[k];
        const Complex sig = state.sigma[k];
        const Complex psi = state.psi[k];
        d.dsigma[k] = kI * (0.5 * s2 * std::norm(psi) * d.dsigma[k] - v * std::norm(sig) * sig);
        d.dpsi[k] = kI * (0.5 * s2 * std::norm(sig) * d.dpsi[k] - std::norm(psi) * psi -
                          config.r * psi);
        check_finite(d.dsigma[k], k, t, "volatility derivative");
        check_finite(d.dpsi[k], k, t, "price derivative");
    }
    d.dw = hebbian_rhs(state, g, config.c);
    for (std::size_t i = 0; i < n; ++i) check_finite(d.dw[i], i, t, "weight derivative");
    return d;
}

std::string prng_specification() {
    return "mt19937_64(seed); value = 2*((x>>11)+0.5)*2^-53 - 1; order: w[0..n), m[0..n)";
}

std::pair<MarketState, KernelParams> init_state(const ModelConfig& config) {
    config.validate();
    MarketState state;
    state.sigma.assign(config.n, Complex{kSigmaInitial, 0.0});
    state.psi.assign(config.n, Complex{kPsiInitial, 0.0});
    state.t = 0.0;

    std::mt19937_64 gen(config.seed);
    state.w.resize(config.n);
    for (auto& w : state.w) w = uniform_open_pm1(gen);
    KernelParams params;
    params.m.resize(config.n);
    for (auto& m : params.m) m = uniform_open_pm1(gen);
    return {std::move(state), std::move(params)};
}

std::vector<double> pack_state(const MarketState& state) {
    const std::size_t n = state.w.size();
    std::vector<double> y(5 * n);
    for (std::size_t k = 0; k < n; ++k) {
        y[2 * k] = state.sigma[k].real();
        y[2 * k + 1] = state.sigma[k].imag();
        y[2 * n + 2 * k] = state.psi[k].real();
        y[2 * n + 2 * k + 1] = state.psi[k].imag();
        y[4 * n + k] = state.w[k];
    }
    return y;
}

MarketState unpack_state(std::span<const double> y, std::size_t n, double t) {
    MarketState state;
    state.sigma.resize(n);
    state.psi.resize(n);
    unpack_into(y.subspan(0, 2 * n), state.sigma);
    unpack_into(y.subspan(2 * n, 2 * n), state.psi);
    state.w.assign(y.begin() + 4 * n, y.begin() + 5 * n);
    state.t = t;
    return state;
}

std::string to_string(RunStatus status) {
    switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::StepBudgetExceeded: return "step-budget-exceeded";
    case RunStatus::Stiff: return "stiffness-failure";
    case RunStatus::NonFinite: return "non-finite";
    }
    return "unknown";
}

SimulationRecord run_simulation(const ModelConfig& config) {
    config.validate();
    const Grid grid = make_grid(config.s0, config.s1, config.n);
    auto [state, params] = init_state(config);

    SimulationRecord record;
    record.config = config;
    record.initial_weights = state.w;
    record.kernels = params;
    record.snapshots.push_back(make_snapshot(state, grid, params));

    const std::size_t n = config.n;
    OdeSystem sys;
    sys.dimension = 5 * n;
    sys.rhs = [&](double t, std::span<const double> y, std::span<double> dydt) {
        const MarketState s = unpack_state(y, n, t);
        const MarketDerivative d = coupled_rhs(t, s, grid, params, config);
        for (std::size_t k = 0; k < n; ++k) {
            dydt[2 * k] = d.dsigma[k].real();
            dydt[2 * k + 1] = d.dsigma[k].imag();
            dydt[2 * n + 2 * k] = d.dpsi[k].real();
            dydt[2 * n + 2 * k + 1] = d.dpsi[k].imag();
            dydt[4 * n + k] = d.dw[k];
        }
    };

    std::vector<double> y = pack_state(state);
    StepControl ctl = config.step;
    std::size_t budget = ctl.max_steps;
    // Interval-independent default for the largest step.
    if (!(ctl.h_max > 0.0)) ctl.h_max = std::min(config.snapshot_stride, config.t_end) / 10.0;

    double t = 0.0;
    for (std::size_t k = 1; t < config.t_end; ++k) {
        const double t_next = std::min(static_cast<double>(k) * config.snapshot_stride,
                                       config.t_end);
        if (budget == 0) {
            record.status = RunStatus::StepBudgetExceeded;
            record.failure_message = "step budget exhausted at t = " + std::to_string(t);
            record.failure_time = t;
            return record;
        }
        ctl.max_steps = budget;
        try {
            auto result = integrate_adaptive(sys, t, t_next, y, ctl);
            y = std::move(result.y);
            ctl.h_init = result.next_h;
            record.stats.merge(result.stats);
            budget -= result.stats.accepted + result.stats.rejected;
        } catch (const IntegrationError& e) {
            record.stats.merge(e.stats());
            record.status = e.kind() == IntegrationFailure::StepBudget
                                ? RunStatus::StepBudgetExceeded
                                : RunStatus::Stiff;
            record.failure_message = e.what();
            record.failure_time = e.time();
            return record;
        } catch (const NonFiniteStateError& e) {
            record.status = RunStatus::NonFinite;
            record.failure_message = e.what();
            record.failure_time = e.time();
            return record;
        }
        t = t_next;
        record.snapshots.push_back(make_snapshot(unpack_state(y, n, t), grid, params));
    }
    return record;
}

}  // namespace qam
