#pragma once

#include "cpnet/analytic.hpp"
#include "cpnet/dynamics.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace cpnet {

/// Sizes and coupling share of the mean-field limit system. Agent layout matches the
/// finite network (core first) so noise streams line up agent by agent.
struct LimitSystem {
    std::size_t n_core = 0;
    std::size_t n_periphery = 0;
    double epsilon = 0.5;

    std::size_t size() const noexcept { return n_core + n_periphery; }
};

/// Deterministic tier mean functions t -> (E[rho_C], E[rho_P]), right-continuous.
using MeanFunctions = std::function<TierMeans(double)>;

/// Means of the limit system for the config's initial tier values, with tier-wide
/// shocks shifting the corresponding tier mean at the (grid-snapped) shock time.
/// Agent-specific shocks are rejected.
MeanFunctions limit_means_for(const SimConfig& config, double epsilon);

/// Explicit unit-sigma driver increments indexed (path, agent, step).
class IncrementTable {
public:
    IncrementTable(std::size_t n_paths, std::size_t n_agents, std::size_t n_steps);
    /// The increments simulate_paths would draw for these inputs.
    static IncrementTable generate(const SimConfig& config, const DriverSpec& driver, std::size_t n_agents);

    std::size_t n_paths() const noexcept { return n_paths_; }
    std::size_t n_agents() const noexcept { return n_agents_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double& at(std::size_t path, std::size_t agent, std::size_t step) {
        return values_[(path * n_agents_ + agent) * n_steps_ + step];
    }
    double at(std::size_t path, std::size_t agent, std::size_t step) const {
        return values_[(path * n_agents_ + agent) * n_steps_ + step];
    }

private:
    std::size_t n_paths_, n_agents_, n_steps_;
    std::vector<double> values_;
};

/// Paths of the limit system: each agent is an independent scalar OU around the
/// deterministic tier attractor. Discretized as m(t) + Y_t with Euler steps for the
/// deviation Y, so zero noise reproduces the mean functions exactly. Without explicit
/// increments, draws come from the same (seed, path, agent) streams as simulate_paths.
PathEnsemble simulate_limit_paths(const LimitSystem& system, const SimConfig& config, const MeanFunctions& means,
                                  const DriverSpec& driver, const IncrementTable* increments = nullptr);

/// Convenience overload using limit_means_for(config, system.epsilon).
PathEnsemble simulate_limit_paths(const LimitSystem& system, const SimConfig& config, const DriverSpec& driver,
                                  const IncrementTable* increments = nullptr);

struct Discrepancy {
    double core = 0.0;
    double core_stderr = 0.0;
    double periphery = 0.0;
    double periphery_stderr = 0.0;
    std::size_t n_paths = 0;
};

/// Monte Carlo estimate of E[sup_{t<=T} |rho^i - rhobar^i|] for the first core and the
/// first periphery agent, finite and limit systems driven by identical increments and
/// started from identical states. Needs a network built with an epsilon.
Discrepancy coupled_discrepancy(const WeightedNetwork& net, const SimConfig& config, const DriverSpec& driver);

struct CouplingPoint {
    std::size_t n_core = 0;
    std::size_t n_periphery = 0;
    Discrepancy discrepancy;
    double scaled_core = 0.0;       // sqrt(|C|) * discrepancy
    double scaled_periphery = 0.0;
};

struct CouplingReport {
    std::vector<CouplingPoint> points;
    std::size_t n_paths = 0;
    double t_end = 0.0;
    double dt = 0.0;
    bool core_violation = false;       // scaled sequence grew > 25% above its running minimum
    bool periphery_violation = false;
};

/// Coupled discrepancies over tiered networks of constant |C|/|P| ratio.
CouplingReport convergence_scan(const std::vector<std::pair<std::size_t, std::size_t>>& sizes, double epsilon,
                                 const SimConfig& config, const DriverSpec& driver);

/// Flags growth of more than 25% above the running minimum.
bool scaled_growth_violation(const std::vector<double>& scaled);

/// Columns: n_core,n_periphery,tier,discrepancy,stderr,scaled_discrepancy
void write_coupling_csv(std::ostream& out, const CouplingReport& report);

}  // namespace cpnet
