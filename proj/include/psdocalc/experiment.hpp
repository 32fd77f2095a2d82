#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace psdocalc {

/// Config validation failure; `path` is a JSON path such as `$.space.kind`.
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string path, const std::string& detail);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Missing or corrupt artifact directory.
class ArtifactError : public Error {
public:
    using Error::Error;
};

struct SymbolSpec {
    std::string builtin;     // one of builtin_symbol_ids(), or empty
    std::string expression;  // used when builtin is empty
    ClassParams params;

    bool operator==(const SymbolSpec&) const = default;
};

struct ScalesConfig {
    std::vector<double> t;       // empty: recipe default
    std::vector<int> levels;     // empty: recipe default
    std::vector<double> deltas;  // empty: {0, 1/2}
    int q = 0;  // 0: recipe default
    int l_max = 32;
    double nu = 3.0;
    double p = 2.0;
    int M = 0;  // 0: ceil(n/4) + 1
    double s = 1.0;
    double shift = 0.0;
    int count = 20;

    bool operator==(const ScalesConfig&) const = default;
};

struct Tolerances {
    double spread = 1.5;
    double min_rate = 0.1;
    double min_r2 = 0.95;
    double decay_r2 = 0.9;
    double slope_tol = 0.2;
    double max_decay_slope = -4.0;
    double residual = 1e-3;
    double para_spread = 5.0;

    bool operator==(const Tolerances&) const = default;
};

struct ExperimentConfig {
    std::string recipe = "opnorm";
    std::uint64_t seed = 0;
    std::string output = "psdocalc-out";
    SpaceSpec space;
    std::string operator_kind = "graph_laplacian";
    std::string coefficient = "1";  // divergence_form edge coefficient in x0, x1, ...
    std::vector<SymbolSpec> symbols;
    ScalesConfig scales;
    Tolerances tolerances;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

std::vector<std::string> recipe_names();

/// Strict parse: unknown keys and wrong types raise ConfigError with the offending path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& file);

/// FNV-1a 64 of the canonical config dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    std::string relation;  // "<=", ">=" or "info"
    bool pass = true;
};

struct RunResult {
    std::filesystem::path dir;
    std::vector<std::string> files;
    std::vector<Check> checks;

    bool passed() const;
};

/// Runs the configured recipe into `dir` (config.output when empty).
RunResult run_experiment(const ExperimentConfig& config, std::filesystem::path dir = {});

struct ReportResult {
    std::vector<Check> checks;
    bool passed = true;
};

/// Reads manifest.json in `dir`, writes summary.txt and summary.csv there.
ReportResult report(const std::filesystem::path& dir);

/// Space, operator and spectral data for a config (size override for level sweeps).
struct Setup {
    MetricMeasureSpace space;
    SelfAdjointOperator op;
    SpectralData sd;
};

Setup make_setup(const SpaceSpec& spec, const std::string& operator_kind, const std::string& coefficient);

Symbol make_symbol(const SymbolSpec& spec, const MetricMeasureSpace& space, const SpectralData& sd);
/// CSV-safe label: builtin id or the expression text.
std::string symbol_label(const SymbolSpec& spec);

/// Reads `# s= rho= delta= m=` header lines followed by the expression.
SymbolSpec read_symbol_file(const std::filesystem::path& file);

}  // namespace psdocalc
