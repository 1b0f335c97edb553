#include "qam/cli.hpp"
#include "qam/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace qam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qam_test_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

const std::vector<std::string> kDataFiles{"volatility_pdf.csv", "price_pdf.csv",
                                          "price_pdf_log10.csv", "price_wave.csv",
                                          "price_phase_plane.csv", "hebbian.csv"};

}  // namespace

TEST(ConfigParse, DefaultsWhenEmpty) {
    const ModelConfig cfg = io::parse_model_config("# nothing here\n\n");
    EXPECT_EQ(cfg.n, 30u);
    EXPECT_EQ(cfg.s0, 10.0);
    EXPECT_EQ(cfg.s1, 20.0);
    EXPECT_EQ(cfg.t_end, 360.0);
    EXPECT_EQ(cfg.c, 1.0);
    EXPECT_DOUBLE_EQ(cfg.r, 0.05 / 360.0);
    EXPECT_EQ(cfg.snapshot_stride, 1.0);
}

TEST(ConfigParse, Overrides) {
    const ModelConfig cfg = io::parse_model_config(
        "n = 12\nseed=7  # comment\nt_end = 2.5\nabs_tol = 1e-9\nmax_steps = 1000\nr = 0\n");
    EXPECT_EQ(cfg.n, 12u);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.t_end, 2.5);
    EXPECT_EQ(cfg.step.abs_tol, 1e-9);
    EXPECT_EQ(cfg.step.max_steps, 1000u);
    EXPECT_EQ(cfg.r, 0.0);
}

TEST(ConfigParse, RejectsBadInput) {
    EXPECT_THROW(io::parse_model_config("tend = 3\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("n = ten\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("n = 3x\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("n 3\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("n = 3\nn = 4\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("n = 2\n"), ConfigError);
    EXPECT_THROW(io::parse_model_config("c = -1\n"), ConfigError);
}

TEST(ConfigParse, LadderSetup) {
    const auto setup = io::parse_ladder_setup("n = 51\nt_end = 0.25\n", LadderStage::Nls);
    EXPECT_EQ(setup.n, 51u);
    EXPECT_EQ(setup.t_end, 0.25);
    EXPECT_EQ(setup.x0, -20.0);
    EXPECT_THROW(io::parse_ladder_setup("r = 0.1\n", LadderStage::Heat), ConfigError);
}

TEST(FormatDouble, RoundTrips) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
        EXPECT_EQ(std::stod(io::format_double(v)), v);
    }
    EXPECT_EQ(io::format_double(0.0625), "0.0625");
}

TEST(MarketOutputs, ZeroHorizonSurfacesHoldInitialState) {
    const fs::path dir = scratch("zero");
    write_text(dir / "cfg.txt", "t_end = 0\n");
    std::ostringstream log;
    const int code = cli::run_market({dir / "cfg.txt", dir / "out", std::nullopt, std::nullopt}, log);
    ASSERT_EQ(code, cli::kSuccess) << log.str();

    auto vol = lines_of(dir / "out" / "volatility_pdf.csv");
    ASSERT_EQ(vol.size(), 3u);  // schema, header, one row
    EXPECT_EQ(vol[0].rfind("# schema=qam/volatility_pdf version=1", 0), 0u);
    std::stringstream row(vol[2]);
    std::string cell;
    std::getline(row, cell, ',');
    EXPECT_EQ(cell, "0");
    int count = 0;
    while (std::getline(row, cell, ',')) {
        EXPECT_EQ(std::stod(cell), 0.0625);
        ++count;
    }
    EXPECT_EQ(count, 30);

    auto price = lines_of(dir / "out" / "price_pdf.csv");
    ASSERT_EQ(price.size(), 3u);
    std::string ones = "0";
    for (int k = 0; k < 30; ++k) ones += ",1";
    EXPECT_EQ(price[2], ones);
}

TEST(MarketOutputs, SevenArtifactsWithSchemasAndDigests) {
    const fs::path dir = scratch("seven");
    write_text(dir / "cfg.txt", "t_end = 3\n");
    std::ostringstream log;
    ASSERT_EQ(cli::run_market({dir / "cfg.txt", dir / "out", std::nullopt, std::nullopt}, log),
              cli::kSuccess);

    for (const auto& name : kDataFiles) {
        const auto lines = lines_of(dir / "out" / name);
        ASSERT_GE(lines.size(), 3u) << name;
        EXPECT_EQ(lines[0].rfind("# schema=qam/", 0), 0u) << name;
        EXPECT_EQ(lines[0].find("nan"), std::string::npos);
        for (std::size_t i = 2; i < lines.size(); ++i) {
            EXPECT_EQ(lines[i].find("nan"), std::string::npos) << name;
            EXPECT_EQ(lines[i].find("inf"), std::string::npos) << name;
        }
    }
    EXPECT_EQ(lines_of(dir / "out" / "volatility_pdf.csv").size(), 2u + 4u);

    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["schema"]["version"], io::kSchemaVersion);
    EXPECT_EQ(manifest["status"], "completed");
    EXPECT_EQ(manifest["config"]["n"], 30);
    EXPECT_EQ(manifest["prng"], prng_specification());
    ASSERT_EQ(manifest["files"].size(), kDataFiles.size());
    for (const auto& f : manifest["files"]) {
        const fs::path path = dir / "out" / f["name"].get<std::string>();
        EXPECT_EQ(f["sha256"], io::sha256_file(path));
        EXPECT_EQ(f["bytes"], fs::file_size(path));
    }
}

TEST(MarketOutputs, SameSeedSameBytes) {
    const fs::path dir = scratch("determinism");
    write_text(dir / "cfg.txt", "t_end = 2\nseed = 5\n");
    std::ostringstream log;
    ASSERT_EQ(cli::run_market({dir / "cfg.txt", dir / "a", std::nullopt, std::nullopt}, log), 0);
    ASSERT_EQ(cli::run_market({dir / "cfg.txt", dir / "b", std::nullopt, std::nullopt}, log), 0);
    ASSERT_EQ(cli::run_market({dir / "cfg.txt", dir / "c", 6, std::nullopt}, log), 0);
    for (const auto& name : kDataFiles) {
        EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
    }
    EXPECT_NE(slurp(dir / "a" / "hebbian.csv"), slurp(dir / "c" / "hebbian.csv"));
}

TEST(MarketOutputs, IntegrationFailureKeepsPartialOutputs) {
    const fs::path dir = scratch("failure");
    write_text(dir / "cfg.txt", "t_end = 50\nmax_steps = 300\n");
    std::ostringstream log;
    EXPECT_EQ(cli::run_market({dir / "cfg.txt", dir / "out", std::nullopt, std::nullopt}, log),
              cli::kIntegrationFailure);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["status"], "step-budget-exceeded");
    EXPECT_TRUE(manifest.contains("failure"));
    EXPECT_GE(lines_of(dir / "out" / "price_pdf.csv").size(), 3u);
}

TEST(MarketOutputs, ConfigErrorIsUsageError) {
    const fs::path dir = scratch("badcfg");
    write_text(dir / "cfg.txt", "sigma0 = 1\n");
    std::ostringstream log;
    EXPECT_EQ(cli::run_market({dir / "cfg.txt", dir / "out", std::nullopt, std::nullopt}, log),
              cli::kUsageError);
}

TEST(Cli, PriceCallFormatting) {
    std::ostringstream out;
    EXPECT_EQ(cli::price_call({100.0, 100.0, 0.05, 0.2, 0.0, 1.0}, out), cli::kSuccess);
    EXPECT_EQ(out.str(), "10.450584\n");
    std::ostringstream bad;
    EXPECT_EQ(cli::price_call({100.0, 100.0, 0.05, -0.2, 0.0, 1.0}, bad), cli::kUsageError);
}

TEST(Cli, LadderToleranceFailureExitCode) {
    const fs::path dir = scratch("ladder");
    write_text(dir / "coarse.txt", "n = 21\n");
    std::ostringstream log;
    EXPECT_EQ(cli::run_ladder(LadderStage::Heat, dir / "coarse.txt", dir / "out", 1e-6, log),
              cli::kToleranceFailure);
    const auto lines = lines_of(dir / "out" / "ladder_heat.csv");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].rfind("# schema=qam/ladder_report", 0), 0u);
}

TEST(Cli, LadderLinearPasses) {
    const fs::path dir = scratch("ladder_ok");
    std::ostringstream log;
    EXPECT_EQ(cli::run_ladder(LadderStage::Linear, std::nullopt, dir, std::nullopt, log),
              cli::kSuccess)
        << log.str();
    EXPECT_EQ(lines_of(dir / "ladder_linear.csv").size(), 2u + 3u);
}

TEST(Cli, SweepWritesPerSeedDirectories) {
    const fs::path dir = scratch("sweep");
    write_text(dir / "cfg.txt", "t_end = 1\n");
    std::ostringstream log;
    cli::MarketOptions base{dir / "cfg.txt", dir / "out", std::nullopt, std::nullopt};
    EXPECT_EQ(cli::sweep(base, {1, 2, 3}, 2, log), cli::kSuccess);
    for (int s : {1, 2, 3}) {
        EXPECT_TRUE(fs::exists(dir / "out" / ("seed_" + std::to_string(s)) / "manifest.json"));
    }
    // Same seed in a sweep and a single run gives the same data.
    ASSERT_EQ(cli::run_market({dir / "cfg.txt", dir / "single", 2, std::nullopt}, log), 0);
    EXPECT_EQ(slurp(dir / "single" / "hebbian.csv"), slurp(dir / "out" / "seed_2" / "hebbian.csv"));
}

TEST(Cli, MainParsesSubcommands) {
    const fs::path dir = scratch("main");
    write_text(dir / "cfg.txt", "t_end = 0\n");
    const std::string cfg = (dir / "cfg.txt").string();
    const std::string out = (dir / "out").string();
    std::vector<std::string> args{"qam", "run-market", "--config", cfg, "--out", out, "--seed", "3"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    EXPECT_EQ(cli::main(static_cast<int>(argv.size()), argv.data()), cli::kSuccess);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["seed"], 3);

    std::vector<std::string> bad{"qam", "run-market", "--no-such-flag"};
    std::vector<char*> bad_argv;
    for (auto& a : bad) bad_argv.push_back(a.data());
    EXPECT_EQ(cli::main(static_cast<int>(bad_argv.size()), bad_argv.data()), cli::kUsageError);
}
