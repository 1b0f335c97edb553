#include "qam/io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qam::io {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!out.emplace(key, value).second) {
            throw ConfigError("config key '" + key + "' given twice");
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
    }
    return out;
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void apply_settings(const std::map<std::string, std::string>& kv,
           const std::map<std::string, Setter>& setters) {
    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(key, value);
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
Setter set(T& field) {
    return [&field](const std::string& key, const std::string& value) {
        field = parse_number<T>(key, value);
    };
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::string_view quantity) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << "# schema=qam/" << quantity << " version=" << kSchemaVersion << '\n';
    }

    CsvWriter& cell(std::string_view s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

void write_surface(const SimulationRecord& record, const fs::path& path,
                   std::string_view quantity, const std::function<double(Complex)>& value,
                   bool use_sigma) {
    const Grid grid = make_grid(record.config.s0, record.config.s1, record.config.n);
    CsvWriter csv(path, quantity);
    csv.cell("t");
    for (double s : grid.nodes()) csv.cell("s=" + format_double(s));
    csv.end_row();
    for (const auto& snap : record.snapshots) {
        csv.cell(snap.t);
        for (const auto& z : use_sigma ? snap.sigma : snap.psi) csv.cell(value(z));
        csv.end_row();
    }
}

}  // namespace

ModelConfig parse_model_config(std::string_view text) {
    ModelConfig cfg;
    std::map<std::string, Setter> setters{
        {"r", set(cfg.r)},
        {"c", set(cfg.c)},
        {"n", set(cfg.n)},
        {"s0", set(cfg.s0)},
        {"s1", set(cfg.s1)},
        {"t_end", set(cfg.t_end)},
        {"seed", set(cfg.seed)},
        {"abs_tol", set(cfg.step.abs_tol)},
        {"rel_tol", set(cfg.step.rel_tol)},
        {"h_init", set(cfg.step.h_init)},
        {"h_min", set(cfg.step.h_min)},
        {"h_max", set(cfg.step.h_max)},
        {"safety", set(cfg.step.safety)},
        {"max_steps", set(cfg.step.max_steps)},
        {"snapshot_stride", set(cfg.snapshot_stride)},
    };
    apply_settings(parse_key_values(text), setters);
    cfg.validate();
    return cfg;
}

ModelConfig load_model_config(const fs::path& path) { return parse_model_config(read_file(path)); }

LadderSetup parse_ladder_setup(std::string_view text, LadderStage stage) {
    LadderSetup setup = default_setup(stage);
    std::map<std::string, Setter> setters{
        {"n", set(setup.n)},
        {"s0", set(setup.x0)},
        {"s1", set(setup.x1)},
        {"t_end", set(setup.t_end)},
    };
    apply_settings(parse_key_values(text), setters);
    return setup;
}

LadderSetup load_ladder_setup(const fs::path& path, LadderStage stage) {
    return parse_ladder_setup(read_file(path), stage);
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

std::vector<std::size_t> phase_plane_lines(std::size_t n) { return {0, n / 2, n - 1}; }

std::vector<OutputFile> write_market_outputs(const SimulationRecord& record, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<OutputFile> files;
    auto add = [&](std::string name) {
        files.push_back({name, dir / name});
        return files.back().path;
    };

    const auto abs2 = [](Complex z) { return std::norm(z); };
    write_surface(record, add("volatility_pdf.csv"), "volatility_pdf", abs2, true);
    write_surface(record, add("price_pdf.csv"), "price_pdf", abs2, false);
    write_surface(record, add("price_pdf_log10.csv"), "price_pdf_log10",
                  [](Complex z) { return std::log10(std::norm(z)); }, false);

    const std::size_t n = record.config.n;
    {
        CsvWriter csv(add("price_wave.csv"), "price_wave");
        csv.cell("t");
        for (std::size_t k = 0; k < n; ++k) {
            csv.cell("re_" + std::to_string(k)).cell("im_" + std::to_string(k));
        }
        csv.end_row();
        for (const auto& snap : record.snapshots) {
            csv.cell(snap.t);
            for (const auto& z : snap.psi) csv.cell(z.real()).cell(z.imag());
            csv.end_row();
        }
    }
    {
        CsvWriter csv(add("price_phase_plane.csv"), "price_phase_plane");
        csv.cell("line").cell("t").cell("re").cell("im");
        csv.end_row();
        for (std::size_t line : phase_plane_lines(n)) {
            for (const auto& snap : record.snapshots) {
                csv.cell(std::to_string(line)).cell(snap.t);
                csv.cell(snap.psi[line].real()).cell(snap.psi[line].imag());
                csv.end_row();
            }
        }
    }
    {
        CsvWriter csv(add("hebbian.csv"), "hebbian");
        csv.cell("t").cell("V");
        for (std::size_t i = 0; i < n; ++i) csv.cell("w_" + std::to_string(i));
        for (std::size_t i = 0; i < n; ++i) csv.cell("g_" + std::to_string(i));
        csv.end_row();
        for (const auto& snap : record.snapshots) {
            csv.cell(snap.t).cell(snap.potential);
            for (double w : snap.w) csv.cell(w);
            for (double g : snap.g) csv.cell(g);
            csv.end_row();
        }
    }
    return files;
}

std::string write_ladder_report(const LadderReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path path = dir / ("ladder_" + to_string(report.stage) + ".csv");
    CsvWriter csv(path, "ladder_report");
    csv.cell("stage").cell("n").cell("x0").cell("x1").cell("t_end").cell("tolerance");
    csv.cell(stage_metric_name(report.stage)).cell("error_location").cell("energy_drift");
    csv.cell("threshold").cell("accepted").cell("rejected").cell("rhs_evaluations");
    csv.end_row();
    for (const auto& row : report.rows) {
        csv.cell(to_string(report.stage)).cell(std::to_string(report.setup.n));
        csv.cell(report.setup.x0).cell(report.setup.x1).cell(report.setup.t_end);
        csv.cell(row.tolerance).cell(row.error).cell(row.error_location).cell(row.energy_drift);
        csv.cell(report.threshold).cell(std::to_string(row.stats.accepted));
        csv.cell(std::to_string(row.stats.rejected)).cell(std::to_string(row.stats.rhs_evaluations));
        csv.end_row();
    }
    return path.string();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 init failed");
    }
    std::array<char, 1 << 15> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), in.gcount());
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

fs::path write_manifest(const SimulationRecord& record, const std::vector<OutputFile>& files,
                        const ManifestInfo& info, const fs::path& dir) {
    using nlohmann::json;
    const ModelConfig& c = record.config;
    json j;
    j["schema"] = {{"name", "qam/manifest"}, {"version", kSchemaVersion}};
    j["software_version"] = kSoftwareVersion;
    j["config"] = {
        {"r", c.r},
        {"c", c.c},
        {"n", c.n},
        {"s0", c.s0},
        {"s1", c.s1},
        {"t_end", c.t_end},
        {"seed", c.seed},
        {"snapshot_stride", c.snapshot_stride},
        {"step",
         {{"abs_tol", c.step.abs_tol},
          {"rel_tol", c.step.rel_tol},
          {"h_init", c.step.h_init},
          {"h_min", c.step.h_min},
          {"h_max", c.step.h_max},
          {"safety", c.step.safety},
          {"max_steps", c.step.max_steps}}},
    };
    j["seed"] = c.seed;
    j["prng"] = prng_specification();
    j["initial_weights"] = record.initial_weights;
    j["mixing_coefficients"] = record.kernels.m;
    const auto& s = record.stats;
    j["step_stats"] = {
        {"accepted", s.accepted},
        {"rejected", s.rejected},
        {"min_h_used", s.accepted > 0 ? s.min_h_used : 0.0},
        {"max_h_used", s.max_h_used},
        {"rhs_evaluations", s.rhs_evaluations},
    };
    j["status"] = to_string(record.status);
    if (!record.ok()) {
        j["failure"] = {{"message", record.failure_message}, {"t", record.failure_time}};
    }
    j["snapshots"] = record.snapshots.size();
    j["wall_clock_seconds"] = info.wall_clock_seconds;
    json inventory = json::array();
    for (const auto& f : files) {
        inventory.push_back({{"name", f.name},
                             {"bytes", fs::file_size(f.path)},
                             {"sha256", sha256_file(f.path)}});
    }
    j["files"] = inventory;

    const fs::path path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    return path;
}

}  // namespace qam::io
