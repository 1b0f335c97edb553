#include "qam/cli.hpp"

#include "qam/io.hpp"
#include "qam/market.hpp"

#include <exception>
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace qam::cli {

namespace fs = std::filesystem;

namespace {

bool record_is_finite(const SimulationRecord& record) {
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    for (const auto& snap : record.snapshots) {
        if (!std::all_of(snap.sigma.begin(), snap.sigma.end(), finite)) return false;
        if (!std::all_of(snap.psi.begin(), snap.psi.end(), finite)) return false;
        if (!std::all_of(snap.w.begin(), snap.w.end(), [](double w) { return std::isfinite(w); }))
            return false;
    }
    return true;
}

}  // namespace

int run_market(const MarketOptions& opts, std::ostream& log) {
    ModelConfig config;
    try {
        if (opts.config) config = io::load_model_config(*opts.config);
        if (opts.seed) config.seed = *opts.seed;
        if (opts.tolerance) {
            config.step.abs_tol = *opts.tolerance;
            config.step.rel_tol = *opts.tolerance;
        }
        config.validate();
        config.step.validate(config.t_end > 0.0 ? config.t_end : 1.0);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsageError;
    }

    const auto start = std::chrono::steady_clock::now();
    const SimulationRecord record = run_simulation(config);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const auto files = io::write_market_outputs(record, opts.out);
    io::write_manifest(record, files, {elapsed.count()}, opts.out);

    log << "run-market: " << to_string(record.status) << ", " << record.snapshots.size()
        << " snapshots, " << record.stats.accepted << " accepted / " << record.stats.rejected
        << " rejected steps, " << std::fixed << std::setprecision(3) << elapsed.count()
        << " s -> " << opts.out.string() << '\n';
    if (!record.ok()) {
        log << "integration failure: " << record.failure_message << '\n';
        return kIntegrationFailure;
    }
    if (!record_is_finite(record)) {
        log << "integration produced non-finite values\n";
        return kIntegrationFailure;
    }
    return kSuccess;
}

int run_ladder(LadderStage stage, const std::optional<fs::path>& config, const fs::path& out,
               std::optional<double> tolerance, std::ostream& log) {
    LadderSetup setup = default_setup(stage);
    try {
        if (config) setup = io::load_ladder_setup(*config, stage);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsageError;
    }
    std::vector<double> tolerances{1e-4, 1e-6, 1e-8};
    if (tolerance) tolerances = {*tolerance};

    LadderReport report;
    try {
        report = run_ladder_stage(stage, setup, tolerances);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const IntegrationError& e) {
        log << "integration failure: " << e.what() << '\n';
        return kIntegrationFailure;
    }
    const std::string path = io::write_ladder_report(report, out);

    log << "run-ladder " << to_string(stage) << " (n = " << setup.n << ", t = " << setup.t_end
        << ")\n";
    log << std::scientific << std::setprecision(3);
    for (const auto& row : report.rows) {
        log << "  tol " << row.tolerance << "  " << stage_metric_name(stage) << " " << row.error
            << " at " << row.error_location;
        if (stage == LadderStage::Nls) log << "  energy drift " << row.energy_drift;
        log << "  steps " << row.stats.accepted << '\n';
    }
    log << "  threshold " << report.threshold << " -> " << (report.passed ? "PASS" : "FAIL")
        << "  (" << path << ")\n";
    log << std::defaultfloat;
    return report.passed ? kSuccess : kToleranceFailure;
}

int price_call(const VanillaCall& opt, std::ostream& out) {
    try {
        const double price = qam::call_price(opt);
        out << std::fixed << std::setprecision(6) << price << '\n';
        out << std::defaultfloat;
        return kSuccess;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    }
}

int sweep(const MarketOptions& base, const std::vector<std::uint64_t>& seeds, unsigned jobs,
          std::ostream& log) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(seeds.size())));
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kSuccess};
    std::mutex log_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            MarketOptions opts = base;
            opts.seed = seeds[i];
            opts.out = base.out / ("seed_" + std::to_string(seeds[i]));
            std::ostringstream local;
            const int code = run_market(opts, local);
            int prev = worst.load();
            while (code > prev && !worst.compare_exchange_weak(prev, code)) {
            }
            std::lock_guard lock(log_mutex);
            log << local.str();
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    pool.clear();
    return worst.load();
}

int main(int argc, char** argv) {
    CLI::App app{"Coupled nonlinear Schroedinger option-price model"};
    app.require_subcommand(1);

    MarketOptions market;
    std::string config_path;
    std::uint64_t seed = 0;
    double tolerance = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--out", market.out, "Output directory");
        sub->add_option("--tolerance", tolerance, "Integrator abs/rel tolerance")
            ->check(CLI::PositiveNumber);
    };

    auto* run_market_cmd = app.add_subcommand("run-market", "Run the coupled market simulation");
    add_common(run_market_cmd);
    run_market_cmd->add_option("--seed", seed, "PRNG seed (overrides config)");

    auto* ladder_cmd = app.add_subcommand("run-ladder", "Run one verification stage");
    add_common(ladder_cmd);
    std::string stage_name;
    ladder_cmd->add_option("--stage", stage_name, "heat | heat-potential | linear | nls")
        ->required();

    auto* price_cmd = app.add_subcommand("price-call", "Closed-form European call (years)");
    VanillaCall opt;
    price_cmd->add_option("-s,--spot", opt.spot, "Spot price")->required();
    price_cmd->add_option("-X,--strike", opt.strike, "Exercise price")->required();
    price_cmd->add_option("-r,--rate", opt.rate, "Risk-free rate per year")->required();
    price_cmd->add_option("--sigma", opt.sigma, "Volatility per sqrt(year)")->required();
    price_cmd->add_option("-T,--maturity", opt.maturity, "Time to maturity in years")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Independent market runs over several seeds");
    add_common(sweep_cmd);
    std::vector<std::uint64_t> seeds;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep_cmd->add_option("--seeds", seeds, "Seeds, one run each")->required()->delimiter(',');
    sweep_cmd->add_option("--jobs", jobs, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsageError;
    }

    if (!config_path.empty()) market.config = config_path;
    if (tolerance > 0.0) market.tolerance = tolerance;

    try {
        if (*run_market_cmd) {
            if (run_market_cmd->count("--seed") > 0) market.seed = seed;
            return run_market(market, std::cout);
        }
        if (*ladder_cmd) {
            const auto stage = parse_ladder_stage(stage_name);
            if (!stage) {
                std::cerr << "unknown stage '" << stage_name << "'\n";
                return kUsageError;
            }
            return run_ladder(*stage, market.config, market.out, market.tolerance, std::cout);
        }
        if (*price_cmd) return price_call(opt, std::cout);
        if (*sweep_cmd) return sweep(market, seeds, jobs, std::cout);
    } catch (const std::exception& e) {
        // Output directory or file errors.
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace qam::cli
