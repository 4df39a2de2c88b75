#include "cpnet/dynamics.hpp"

#include "cpnet/csv.hpp"
#include "cpnet/error.hpp"
#include "cpnet/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace cpnet {

std::size_t SimConfig::n_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

std::size_t SimConfig::step_of(double t) const { return static_cast<std::size_t>(std::llround(t / dt)); }

void SimConfig::validate() const {
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(std::isfinite(t_end) && t_end >= dt, "t_end must be at least dt");
    require(n_paths >= 1, "n_paths must be at least 1");
    require(theta_core > 0.0 && theta_periphery > 0.0, "friction rates must be positive");
    require(std::isfinite(theta_core) && std::isfinite(theta_periphery), "friction rates must be finite");
    require(sigma_core >= 0.0 && sigma_periphery >= 0.0, "volatilities must be nonnegative");
    require(std::isfinite(sigma_core) && std::isfinite(sigma_periphery), "volatilities must be finite");
    require(std::isfinite(initial_core) && std::isfinite(initial_periphery), "initial values must be finite");
    require(record_stride >= 1, "record_stride must be at least 1");
    require(n_paths <= (std::size_t{1} << 48), "n_paths too large for the stream layout");
    for (const auto& s : shocks) {
        require(std::isfinite(s.time) && s.time >= 0.0 && s.time <= t_end + 0.5 * dt,
                "shock time must lie in [0, t_end]");
        require(std::isfinite(s.delta), "shock delta must be finite");
        require(s.target != ShockTarget::Agents || !s.agents.empty(), "agent shock needs at least one agent");
    }
}

PathEnsemble::PathEnsemble(std::vector<double> times, std::vector<std::size_t> agents, std::size_t n_paths)
    : times_(std::move(times)), agents_(std::move(agents)), n_paths_(n_paths),
      values_(times_.size() * agents_.size() * n_paths_, 0.0) {}

std::size_t PathEnsemble::time_index(double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (it != times_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - times_.begin());
    if (it != times_.begin() && std::abs(*(it - 1) - t) <= tol)
        return static_cast<std::size_t>(it - times_.begin() - 1);
    std::string msg = "time " + csv::number(t) + " is not a recorded grid point; nearest:";
    if (it != times_.begin()) msg += " " + csv::number(*(it - 1));
    if (it != times_.end()) msg += " " + csv::number(*it);
    fail(ErrorKind::OffGrid, msg);
}

std::size_t PathEnsemble::agent_slot(std::size_t agent) const {
    const auto it = std::find(agents_.begin(), agents_.end(), agent);
    if (it == agents_.end()) fail(ErrorKind::InvalidArgument, "agent " + std::to_string(agent) + " was not recorded");
    return static_cast<std::size_t>(it - agents_.begin());
}

EnsembleStats ensemble_stats(const PathEnsemble& ens, double t, std::span<const std::size_t> agents) {
    require(!agents.empty(), "agent set must not be empty");
    const std::size_t ti = ens.time_index(t);
    std::vector<std::size_t> slots;
    for (auto a : agents) slots.push_back(ens.agent_slot(a));

    const std::size_t n = ens.n_paths();
    std::vector<double> per_path(n);
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (auto slot : slots) s += ens.value(p, slot, ti);
        per_path[p] = s / static_cast<double>(slots.size());
    }
    EnsembleStats st;
    st.n_paths = n;
    double sum = 0.0;
    for (double v : per_path) sum += v;
    st.mean = sum / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double v : per_path) ss += (v - st.mean) * (v - st.mean);
        st.std = std::sqrt(ss / static_cast<double>(n - 1));
        st.stderr_mean = st.std / std::sqrt(static_cast<double>(n));
    }
    return st;
}

EnsembleStats ensemble_stats(const PathEnsemble& ens, double t, std::size_t agent) {
    const std::size_t one[] = {agent};
    return ensemble_stats(ens, t, one);
}

DriftOperator::DriftOperator(const WeightedNetwork& net, double theta_core, double theta_periphery) {
    require(theta_core > 0.0 && theta_periphery > 0.0, "friction rates must be positive");
    const auto& w = net.weights();
    row_start_.reserve(net.size() + 1);
    row_start_.push_back(0);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (w(i, j) != 0.0) {
                cols_.push_back(static_cast<std::size_t>(j));
                vals_.push_back(w(i, j));
            }
        }
        row_start_.push_back(cols_.size());
        theta_.push_back(net.is_core(static_cast<std::size_t>(i)) ? theta_core : theta_periphery);
    }
}

void DriftOperator::apply(const double* state, double* out, std::size_t width) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double* acc = out + i * width;
        const double* self = state + i * width;
        std::fill(acc, acc + width, 0.0);
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            const double v = vals_[k];
            const double* row = state + cols_[k] * width;
            for (std::size_t c = 0; c < width; ++c) acc[c] += v * (row[c] - self[c]);
        }
        const double th = theta_[i];
        for (std::size_t c = 0; c < width; ++c) acc[c] *= th;
    }
}

double euler_spectral_radius(const Matrix& drift, double dt) {
    Eigen::EigenSolver<Matrix> es(drift, /*computeEigenvectors=*/false);
    double r = 0.0;
    for (const auto& lambda : es.eigenvalues()) r = std::max(r, std::abs(1.0 + dt * lambda));
    return r;
}

std::string network_identity(const WeightedNetwork& net) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto& w = net.weights();
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        std::uint64_t bits;
        const double v = w.data()[k];
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFF;
            h *= 0x100000001b3ull;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "network n_core=%zu n_periphery=%zu epsilon=%s fingerprint=%016llx",
                  net.n_core(), net.n_periphery(),
                  net.epsilon() ? csv::number(*net.epsilon()).c_str() : "none",
                  static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

std::vector<StepShock> resolve_shocks(const SimConfig& config, std::size_t n_core, std::size_t n_agents) {
    std::vector<StepShock> out;
    for (const auto& s : config.shocks) {
        const std::size_t step = config.step_of(s.time);
        Vector delta = Vector::Zero(static_cast<Eigen::Index>(n_agents));
        switch (s.target) {
        case ShockTarget::Core: delta.head(n_core).setConstant(s.delta); break;
        case ShockTarget::Periphery: delta.tail(n_agents - n_core).setConstant(s.delta); break;
        case ShockTarget::All: delta.setConstant(s.delta); break;
        case ShockTarget::Agents:
            for (auto a : s.agents) {
                require(a < n_agents, "shock agent " + std::to_string(a) + " out of range");
                delta[static_cast<Eigen::Index>(a)] += s.delta;
            }
            break;
        }
        auto it = std::find_if(out.begin(), out.end(), [&](const StepShock& x) { return x.step == step; });
        if (it == out.end())
            out.push_back({step, std::move(delta)});
        else
            it->delta += delta;
    }
    std::sort(out.begin(), out.end(), [](const StepShock& a, const StepShock& b) { return a.step < b.step; });
    return out;
}

std::vector<std::size_t> recorded_steps(const SimConfig& config) {
    const std::size_t n = config.n_steps();
    std::vector<std::size_t> steps;
    for (std::size_t k = 0; k <= n; k += config.record_stride) steps.push_back(k);
    if (steps.back() != n) steps.push_back(n);
    return steps;
}

std::vector<std::size_t> recorded_agents(const SimConfig& config, std::size_t n_agents) {
    if (config.record_agents.empty()) {
        std::vector<std::size_t> all(n_agents);
        for (std::size_t i = 0; i < n_agents; ++i) all[i] = i;
        return all;
    }
    for (auto a : config.record_agents)
        require(a < n_agents, "record agent " + std::to_string(a) + " out of range");
    return config.record_agents;
}

}  // namespace detail

PathEnsemble simulate_paths(const WeightedNetwork& net, const SimConfig& config, const DriverSpec& driver) {
    config.validate();
    driver.validate();

    const std::size_t n = net.size();
    const std::size_t n_core = net.n_core();
    const std::size_t n_steps = config.n_steps();
    const Matrix drift = drift_matrix(net, config.theta_core, config.theta_periphery);
    const DriftOperator op(net, config.theta_core, config.theta_periphery);
    const IncrementSampler sampler(driver, config.dt);
    const Vector sigma = tier_vector(net, config.sigma_core, config.sigma_periphery);
    const Vector x0 = tier_vector(net, config.initial_core, config.initial_periphery);
    const auto shocks = detail::resolve_shocks(config, n_core, n);
    const auto rec_steps = detail::recorded_steps(config);
    const auto rec_agents = detail::recorded_agents(config, n);

    std::vector<double> times;
    for (auto k : rec_steps) times.push_back(static_cast<double>(k) * config.dt);
    PathEnsemble ens(std::move(times), rec_agents, config.n_paths);
    ens.config = config;
    ens.driver = driver;
    ens.source = network_identity(net);

    const double radius = euler_spectral_radius(drift, config.dt);
    if (radius > 1.0 + 1e-9)
        ens.warnings.push_back("explicit Euler step is not a contraction: spectral radius of I + dt*drift is " +
                               csv::number(radius) + "; reduce dt");

    const std::size_t block = detail::kPathBlock;
    const std::size_t n_blocks = (config.n_paths + block - 1) / block;
    const double dt = config.dt;

    parallel_for(n_blocks, config.threads, [&](std::size_t b) {
        const std::size_t first = b * block;
        const std::size_t width = std::min(block, config.n_paths - first);
        std::vector<double> x(n * width), dx(n * width);
        std::vector<rng::Stream> streams;
        streams.reserve(n * width);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < width; ++c) {
                x[i * width + c] = x0[static_cast<Eigen::Index>(i)];
                streams.emplace_back(config.seed, first + c, static_cast<std::uint32_t>(i));
            }
        }
        auto shock_it = shocks.begin();
        auto rec_it = rec_steps.begin();
        std::size_t rec_slot = 0;
        for (std::size_t k = 0;; ++k) {
            if (shock_it != shocks.end() && shock_it->step == k) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = shock_it->delta[static_cast<Eigen::Index>(i)];
                    if (d != 0.0)
                        for (std::size_t c = 0; c < width; ++c) x[i * width + c] += d;
                }
                ++shock_it;
            }
            if (rec_it != rec_steps.end() && *rec_it == k) {
                for (std::size_t s = 0; s < rec_agents.size(); ++s)
                    for (std::size_t c = 0; c < width; ++c)
                        ens.value(first + c, s, rec_slot) = x[rec_agents[s] * width + c];
                ++rec_it;
                ++rec_slot;
            }
            if (k == n_steps) break;

            op.apply(x.data(), dx.data(), width);
            bool finite = true;
            for (std::size_t i = 0; i < n; ++i) {
                const double sig = sigma[static_cast<Eigen::Index>(i)];
                for (std::size_t c = 0; c < width; ++c) {
                    const std::size_t idx = i * width + c;
                    const double noise = sampler(streams[idx]);
                    x[idx] += dt * dx[idx] + sig * noise;
                    finite &= std::isfinite(x[idx]);
                }
            }
            if (!finite) {
                std::size_t bad_path = first;
                for (std::size_t idx = 0; idx < x.size(); ++idx)
                    if (!std::isfinite(x[idx])) {
                        bad_path = first + idx % width;
                        break;
                    }
                fail(ErrorKind::Numeric, "non-finite robustness at step " + std::to_string(k + 1) + " (t=" +
                                             csv::number(static_cast<double>(k + 1) * dt) + ") on path " +
                                             std::to_string(bad_path));
            }
        }
    });
    return ens;
}

void write_paths_csv(std::ostream& out, const PathEnsemble& ens) {
    out << "path,agent,time,value\n";
    const auto times = ens.times();
    const auto agents = ens.agents();
    for (std::size_t p = 0; p < ens.n_paths(); ++p)
        for (std::size_t s = 0; s < agents.size(); ++s)
            for (std::size_t t = 0; t < times.size(); ++t)
                out << p << ',' << agents[s] << ',' << csv::number(times[t]) << ','
                    << csv::number(ens.value(p, s, t)) << '\n';
}

void write_summary_csv(std::ostream& out, const PathEnsemble& ens) {
    out << "agent,time,mean,std,stderr\n";
    for (auto a : ens.agents())
        for (double t : ens.times()) {
            const auto st = ensemble_stats(ens, t, a);
            out << a << ',' << csv::number(t) << ',' << csv::number(st.mean) << ',' << csv::number(st.std) << ','
                << csv::number(st.stderr_mean) << '\n';
        }
}

}  // namespace cpnet
