#pragma once

#include "qam/ladder_stages.hpp"
#include "qam/market.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qam::io {

/// Version stamped into every output file header.
inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kSoftwareVersion = "1.0.0";

/// Parses flat `key = value` text ('#' starts a comment). Keys:
///   r c n s0 s1 t_end seed abs_tol rel_tol h_init h_min h_max safety max_steps snapshot_stride
/// Missing keys keep their defaults; unknown keys and malformed values throw ConfigError.
ModelConfig parse_model_config(std::string_view text);
ModelConfig load_model_config(const std::filesystem::path& path);

/// Same format; accepted keys are n s0 s1 t_end (grid and horizon of the stage).
LadderSetup parse_ladder_setup(std::string_view text, LadderStage stage);
LadderSetup load_ladder_setup(const std::filesystem::path& path, LadderStage stage);

/// Shortest round-trip decimal form; identical input gives identical bytes.
std::string format_double(double value);

struct OutputFile {
    std::string name;
    std::filesystem::path path;
};

/// Writes the six data files of a market run into `dir` (created if needed):
/// volatility_pdf.csv, price_pdf.csv, price_pdf_log10.csv, price_wave.csv,
/// price_phase_plane.csv, hebbian.csv.
std::vector<OutputFile> write_market_outputs(const SimulationRecord& record,
                                             const std::filesystem::path& dir);

/// Lines whose complex-plane trajectories go into price_phase_plane.csv.
std::vector<std::size_t> phase_plane_lines(std::size_t n);

std::string write_ladder_report(const LadderReport& report, const std::filesystem::path& dir);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestInfo {
    double wall_clock_seconds = 0.0;
};

/// Writes manifest.json (config echo, PRNG spec, stats, status, file digests).
std::filesystem::path write_manifest(const SimulationRecord& record,
                                     const std::vector<OutputFile>& files,
                                     const ManifestInfo& info, const std::filesystem::path& dir);

}  // namespace qam::io
