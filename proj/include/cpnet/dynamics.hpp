#pragma once

#include "cpnet/driver.hpp"
#include "cpnet/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpnet {

enum class ShockTarget { Core, Periphery, All, Agents };

/// Additive displacement of selected agents' robustness at a grid time.
struct Shock {
    double time = 0.0;
    ShockTarget target = ShockTarget::Core;
    std::vector<std::size_t> agents;  // used when target == Agents
    double delta = 0.0;
};

struct SimConfig {
    double t_end = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    double theta_core = 1.0;
    double theta_periphery = 1.0;
    double sigma_core = 0.2;
    double sigma_periphery = 0.2;
    double initial_core = 1.0;
    double initial_periphery = 1.0;
    std::vector<Shock> shocks;

    // Recording: every record_stride-th grid point (plus the final one) for the listed
    // agents; an empty list records every agent.
    std::size_t record_stride = 1;
    std::vector<std::size_t> record_agents;

    unsigned threads = 0;  // 0 = hardware concurrency; output does not depend on it

    std::size_t n_steps() const;
    std::size_t step_of(double t) const;  // nearest grid index
    void validate() const;
};

/// Recorded robustness values indexed (path, agent slot, time slot).
class PathEnsemble {
public:
    PathEnsemble(std::vector<double> times, std::vector<std::size_t> agents, std::size_t n_paths);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const std::size_t> agents() const noexcept { return agents_; }
    std::size_t n_paths() const noexcept { return n_paths_; }

    double value(std::size_t path, std::size_t slot, std::size_t time_index) const {
        return values_[(path * agents_.size() + slot) * times_.size() + time_index];
    }
    double& value(std::size_t path, std::size_t slot, std::size_t time_index) {
        return values_[(path * agents_.size() + slot) * times_.size() + time_index];
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Index of recorded time t. Throws ErrorKind::OffGrid naming the nearest grid points.
    std::size_t time_index(double t) const;
    /// Slot of a recorded agent; throws if the agent was not recorded.
    std::size_t agent_slot(std::size_t agent) const;

    // Provenance.
    SimConfig config;
    DriverSpec driver;
    std::string source;  // network or limit-system identity
    std::vector<std::string> warnings;

private:
    std::vector<double> times_;
    std::vector<std::size_t> agents_;
    std::size_t n_paths_;
    std::vector<double> values_;
};

struct EnsembleStats {
    double mean = 0.0;
    double std = 0.0;                     // per-path sample standard deviation
    std::optional<double> stderr_mean;    // absent for a single path
    std::size_t n_paths = 0;
};

/// Statistics over paths of the agent-set average at recorded time t.
EnsembleStats ensemble_stats(const PathEnsemble& ens, double t, std::span<const std::size_t> agents);
EnsembleStats ensemble_stats(const PathEnsemble& ens, double t, std::size_t agent);

/// Row-compressed drift theta_i * sum_j w_ij (x_j - x_i), applied to a block of
/// paths stored agent-major (row i holds agent i for `width` consecutive paths).
/// The difference form keeps any constant state an exact fixed point.
class DriftOperator {
public:
    DriftOperator(const WeightedNetwork& net, double theta_core, double theta_periphery);
    void apply(const double* state, double* out, std::size_t width) const;
    std::size_t size() const noexcept { return row_start_.size() - 1; }

private:
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
    std::vector<double> theta_;
};

/// max |1 + dt*lambda| over eigenvalues of the drift matrix.
double euler_spectral_radius(const Matrix& drift, double dt);

/// Short identity string for provenance, including a weight fingerprint.
std::string network_identity(const WeightedNetwork& net);

/// Euler-Maruyama paths of d rho = Theta(A^w - I) rho dt + Sigma dL with shocks.
/// Bit-identical for equal inputs regardless of `config.threads`.
PathEnsemble simulate_paths(const WeightedNetwork& net, const SimConfig& config, const DriverSpec& driver);

/// Columns: path,agent,time,value
void write_paths_csv(std::ostream& out, const PathEnsemble& ens);
/// Columns: agent,time,mean,std,stderr
void write_summary_csv(std::ostream& out, const PathEnsemble& ens);

namespace detail {
constexpr std::size_t kPathBlock = 16;
// Shock deltas per step: (step, per-agent delta vector).
struct StepShock {
    std::size_t step;
    Vector delta;
};
std::vector<StepShock> resolve_shocks(const SimConfig& config, std::size_t n_core, std::size_t n_agents);
std::vector<std::size_t> recorded_steps(const SimConfig& config);
std::vector<std::size_t> recorded_agents(const SimConfig& config, std::size_t n_agents);
}  // namespace detail

}  // namespace cpnet
