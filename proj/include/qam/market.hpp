#pragma once

#include "qam/grid.hpp"
#include "qam/integrator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qam {

/// Model and solver parameters for the coupled volatility / option-price system.
/// Time is measured in days.
struct ModelConfig {
    double r = 0.05 / 360.0;  // risk-free rate per day
    double c = 1.0;           // Hebbian learning rate
    std::size_t n = 30;       // lines per field, also the number of weights
    double s0 = 10.0;
    double s1 = 20.0;
    double t_end = 360.0;
    std::uint64_t seed = 42;
    StepControl step{1e-6, 1e-6, 1e-3, 1e-10, 0.0, 0.9, 10'000'000};
    double snapshot_stride = 1.0;

    /// Throws ConfigError on r < 0, c < 0, n < 3, t_end < 0, bad bounds or stride.
    void validate() const;
};

struct MarketState {
    Field sigma;            // volatility wave function
    Field psi;              // option-price wave function
    std::vector<double> w;  // Hebbian weights
    double t = 0.0;
};

struct MarketDerivative {
    Field dsigma;
    Field dpsi;
    std::vector<double> dw;
};

/// Mixing coefficients m_i of the Gaussian kernels, fixed after initialisation.
struct KernelParams {
    std::vector<double> m;
};

/// Thrown when the coupled right-hand side meets a non-finite value.
class NonFiniteStateError : public std::runtime_error {
public:
    NonFiniteStateError(std::size_t node, double t, const std::string& what)
        : std::runtime_error(what), node_(node), t_(t) {}
    std::size_t node() const { return node_; }
    double time() const { return t_; }

private:
    std::size_t node_;
    double t_;
};

/// Oscillating reference y(t) = 2 sin(60 t).
double target_signal(double t);

/// First moment of the volatility density: sum_k s_k |sigma_k|^2 ds.
double target_output(const MarketState& state, const Grid& grid);

/// g_i = exp(-(d - m_i d)^2) with d = target_output - target_signal(t).
std::vector<double> gaussian_kernels(double t, const MarketState& state, const Grid& grid,
                                     const KernelParams& params);

/// Market heat potential V(w) = sum_i w_i g_i.
double potential(std::span<const double> w, std::span<const double> g);

/// dw_i/dt = -w_i + c |sigma_i| g_i |psi_i|
std::vector<double> hebbian_rhs(const MarketState& state, std::span<const double> g, double c);

/// Full derivative of the coupled system. Second differences use periodic wrap.
MarketDerivative coupled_rhs(double t, const MarketState& state, const Grid& grid,
                             const KernelParams& params, const ModelConfig& config);

/// The seeded generator: mt19937_64, value = 2 * ((x >> 11) + 0.5) * 2^-53 - 1,
/// weights drawn first, then mixing coefficients.
std::string prng_specification();

/// sigma = 0.25, psi = 1, random weights and mixing coefficients in (-1, 1).
std::pair<MarketState, KernelParams> init_state(const ModelConfig& config);

// Real-vector layout used by the integrator: [sigma (Re, Im)..., psi (Re, Im)..., w...].
std::vector<double> pack_state(const MarketState& state);
MarketState unpack_state(std::span<const double> y, std::size_t n, double t);

struct Snapshot {
    double t = 0.0;
    Field sigma;
    Field psi;
    std::vector<double> w;
    std::vector<double> g;
    double potential = 0.0;
    double mass_sigma = 0.0;
    double mass_psi = 0.0;
};

enum class RunStatus { Completed, StepBudgetExceeded, Stiff, NonFinite };

std::string to_string(RunStatus status);

struct SimulationRecord {
    ModelConfig config;
    std::vector<double> initial_weights;
    KernelParams kernels;
    std::vector<Snapshot> snapshots;
    StepStats stats;
    RunStatus status = RunStatus::Completed;
    std::string failure_message;
    double failure_time = 0.0;

    bool ok() const { return status == RunStatus::Completed; }
};

/// Integrates the coupled system from 0 to config.t_end, recording a snapshot at
/// every multiple of snapshot_stride (and at t_end). Integration failures are
/// reported through `status`; the snapshots recorded up to that point are kept.
SimulationRecord run_simulation(const ModelConfig& config);

}  // namespace qam
