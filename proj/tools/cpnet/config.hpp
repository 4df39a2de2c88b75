#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpnet::cli {

/// Schema or syntax violation, carrying "source:line: section.key: message".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { Paths, Table1, Converge, Fpt, Hedge, RiskCurves, ValidateNet };

std::string to_string(Kind k);
std::optional<Kind> parse_kind(const std::string& name);

struct ShockEntry {
    double time = 0.0;
    std::string target = "core";  // core | periphery | all | agents:i;j;k
    std::vector<std::size_t> agents;
    double delta = 0.0;
};

struct NetworkParams {
    std::size_t n_core = 5;
    std::size_t n_periphery = 50;
    double epsilon = 0.58;
    std::string file;  // CSV network; overrides the tiered constructor when set
};

struct SimulationParams {
    double t_end = 1.0;
    double dt = 1e-3;
    std::size_t paths = 10000;
    double theta_core = 1.0;
    double theta_periphery = 1.0;
    double sigma_core = 0.2;
    double sigma_periphery = 0.2;
    double initial_core = 1.0;
    double initial_periphery = 1.0;
    std::vector<ShockEntry> shocks;
    std::size_t record_stride = 1;
    std::vector<std::size_t> record_agents;
};

struct DriverParams {
    std::string kind = "brownian";
    double jump_intensity = 0.0;
    double jump_size_scale = 0.0;
};

struct Table1Params {
    std::vector<double> theta_periphery{1, 3, 6, 10, 15, 20, 25};
    double shock_time = 0.9;
    double shock_delta = -0.3;
    std::string shock_target = "core";
};

struct ConvergeParams {
    std::vector<std::pair<std::size_t, std::size_t>> sizes{{5, 50}, {10, 100}, {20, 200}, {40, 400}};
};

struct FptPoint {
    double mu, sigma, theta;
};

struct FptParams {
    std::vector<FptPoint> points{{0.5, 0.5, 1.0}};
    double start = 1.0;
    double barrier = 0.0;
    std::string method = "quadrature";  // quadrature | monte-carlo | both
    std::size_t mc_paths = 10000;
    double mc_dt = 1e-4;
    double mc_t_max = 1e4;
};

struct HedgeParams {
    double mu = 0.5;
    double sigma_before = 0.2;
    double sigma_after = 0.5;
    double theta_before = 1.0;
    double theta_lo = 1.0;
    double theta_hi = 50.0;
};

struct RiskCurvesParams {
    std::vector<double> mus{0.1, 0.3, 0.5, 0.7};
    double sigma = 0.5;
    double theta_min = 1.0;
    double theta_max = 50.0;
    std::size_t theta_points = 50;
    double mu_reference = 0.5;
    double sigma_before = 0.2;
    double sigma_after = 0.5;
    double theta_before = 1.0;
    double mu_min = 0.05;
    double mu_max = 0.95;
    std::size_t mu_points = 91;
};

struct PathsParams {
    std::size_t plot_paths = 5;
};

struct ExperimentConfig {
    std::optional<Kind> kind;
    std::string out = "out";
    bool csv = true;
    bool svg = false;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    NetworkParams network;
    SimulationParams simulation;
    DriverParams driver;
    Table1Params table1;
    ConvergeParams converge;
    FptParams fpt;
    HedgeParams hedge;
    RiskCurvesParams risk_curves;
    PathsParams paths;

    bool paths_set = false;  // simulation.paths given explicitly
};

/// Defaults for an experiment kind (table1 uses sigma_periphery = 0.5).
ExperimentConfig defaults_for(Kind kind);

/// Parses an INI-style config over `defaults`. Unknown sections or keys, duplicate
/// keys and malformed values throw ConfigError before anything is computed.
ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig defaults);
ExperimentConfig load_config(const std::string& path, ExperimentConfig defaults);

/// Section -> accepted keys; documents the schema.
const std::map<std::string, std::vector<std::string>>& schema();

}  // namespace cpnet::cli
