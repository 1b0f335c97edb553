#pragma once

#include "qam/ladder_stages.hpp"
#include "qam/reference.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace qam::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kIntegrationFailure = 2,
    kToleranceFailure = 3,
};

struct MarketOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
};

int run_market(const MarketOptions& opts, std::ostream& log);

int run_ladder(LadderStage stage, const std::optional<std::filesystem::path>& config,
               const std::filesystem::path& out, std::optional<double> tolerance,
               std::ostream& log);

/// Prints the price with six decimals.
int price_call(const VanillaCall& opt, std::ostream& out);

/// One run-market per seed, each in `<out>/seed_<seed>`, spread over `jobs` threads.
int sweep(const MarketOptions& base, const std::vector<std::uint64_t>& seeds, unsigned jobs,
          std::ostream& log);

int main(int argc, char** argv);

}  // namespace qam::cli
