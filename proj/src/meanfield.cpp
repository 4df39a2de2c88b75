#include "cpnet/meanfield.hpp"

#include "cpnet/csv.hpp"
#include "cpnet/error.hpp"
#include "cpnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cpnet {

namespace {

struct MeanSegment {
    double start;
    double m_core;
    double m_periphery;
};

void require_tier_shocks_only(const SimConfig& config) {
    for (const auto& s : config.shocks)
        if (s.target == ShockTarget::Agents)
            fail(ErrorKind::Unsupported, "the limit system supports tier-wide shocks only");
}

}  // namespace

MeanFunctions limit_means_for(const SimConfig& config, double epsilon) {
    config.validate();
    require_tier_shocks_only(config);
    const double tc = config.theta_core;
    const double tp = config.theta_periphery;

    auto shocks = config.shocks;
    std::stable_sort(shocks.begin(), shocks.end(), [](const Shock& a, const Shock& b) { return a.time < b.time; });

    std::vector<MeanSegment> segs{{0.0, config.initial_core, config.initial_periphery}};
    for (const auto& s : shocks) {
        const double t = static_cast<double>(config.step_of(s.time)) * config.dt;
        const auto& last = segs.back();
        const auto m = limit_mean_ode(tc, tp, epsilon, last.m_core, last.m_periphery, t - last.start);
        MeanSegment next{t, m.core, m.periphery};
        if (s.target == ShockTarget::Core || s.target == ShockTarget::All) next.m_core += s.delta;
        if (s.target == ShockTarget::Periphery || s.target == ShockTarget::All) next.m_periphery += s.delta;
        if (t == last.start)
            segs.back() = {t, last.m_core + (next.m_core - m.core), last.m_periphery + (next.m_periphery - m.periphery)};
        else
            segs.push_back(next);
    }
    return [segs = std::move(segs), tc, tp, epsilon](double t) {
        auto it = std::upper_bound(segs.begin(), segs.end(), t,
                                   [](double v, const MeanSegment& s) { return v < s.start; });
        const auto& seg = (it == segs.begin()) ? segs.front() : *(it - 1);
        return limit_mean_ode(tc, tp, epsilon, seg.m_core, seg.m_periphery, std::max(0.0, t - seg.start));
    };
}

IncrementTable::IncrementTable(std::size_t n_paths, std::size_t n_agents, std::size_t n_steps)
    : n_paths_(n_paths), n_agents_(n_agents), n_steps_(n_steps), values_(n_paths * n_agents * n_steps, 0.0) {}

IncrementTable IncrementTable::generate(const SimConfig& config, const DriverSpec& driver, std::size_t n_agents) {
    config.validate();
    IncrementTable table(config.n_paths, n_agents, config.n_steps());
    const IncrementSampler sampler(driver, config.dt);
    parallel_for(config.n_paths, config.threads, [&](std::size_t p) {
        for (std::size_t a = 0; a < n_agents; ++a) {
            rng::Stream stream(config.seed, p, static_cast<std::uint32_t>(a));
            for (std::size_t k = 0; k < table.n_steps_; ++k) table.at(p, a, k) = sampler(stream);
        }
    });
    return table;
}

PathEnsemble simulate_limit_paths(const LimitSystem& system, const SimConfig& config, const MeanFunctions& means,
                                  const DriverSpec& driver, const IncrementTable* increments) {
    config.validate();
    driver.validate();
    require(system.n_core >= 1 && system.n_periphery >= 1, "limit system needs both tiers");
    require(static_cast<bool>(means), "mean functions required");
    require_tier_shocks_only(config);

    const std::size_t n = system.size();
    const std::size_t n_steps = config.n_steps();
    if (increments &&
        (increments->n_paths() != config.n_paths || increments->n_agents() != n || increments->n_steps() != n_steps))
        fail(ErrorKind::ShapeMismatch,
             "increment table is " + std::to_string(increments->n_paths()) + " paths x " +
                 std::to_string(increments->n_agents()) + " agents x " + std::to_string(increments->n_steps()) +
                 " steps; config needs " + std::to_string(config.n_paths) + " x " + std::to_string(n) + " x " +
                 std::to_string(n_steps));

    const auto rec_steps = detail::recorded_steps(config);
    const auto rec_agents = detail::recorded_agents(config, n);
    std::vector<double> times;
    for (auto k : rec_steps) times.push_back(static_cast<double>(k) * config.dt);
    PathEnsemble ens(std::move(times), rec_agents, config.n_paths);
    ens.config = config;
    ens.driver = driver;
    ens.source = "limit-system n_core=" + std::to_string(system.n_core) +
                 " n_periphery=" + std::to_string(system.n_periphery) + " epsilon=" + csv::number(system.epsilon);

    // Mean functions on the grid.
    std::vector<double> m_core(n_steps + 1), m_periph(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const auto m = means(static_cast<double>(k) * config.dt);
        m_core[k] = m.core;
        m_periph[k] = m.periphery;
    }

    const IncrementSampler sampler(driver, config.dt);
    const double dt = config.dt;
    const double decay_c = 1.0 - dt * config.theta_core;
    const double decay_p = 1.0 - dt * config.theta_periphery;
    const double init_dev_c = config.initial_core - m_core[0];
    const double init_dev_p = config.initial_periphery - m_periph[0];

    parallel_for(config.n_paths, config.threads, [&](std::size_t p) {
        for (std::size_t slot = 0; slot < rec_agents.size(); ++slot) {
            const std::size_t a = rec_agents[slot];
            const bool core = a < system.n_core;
            const double decay = core ? decay_c : decay_p;
            const double sigma = core ? config.sigma_core : config.sigma_periphery;
            const auto& mean = core ? m_core : m_periph;
            rng::Stream stream(config.seed, p, static_cast<std::uint32_t>(a));
            double dev = core ? init_dev_c : init_dev_p;
            std::size_t rec = 0;
            for (std::size_t k = 0;; ++k) {
                if (rec < rec_steps.size() && rec_steps[rec] == k) {
                    const double v = mean[k] + dev;
                    if (!std::isfinite(v))
                        fail(ErrorKind::Numeric, "non-finite limit robustness at step " + std::to_string(k) +
                                                     " on path " + std::to_string(p));
                    ens.value(p, slot, rec++) = v;
                }
                if (k == n_steps) break;
                const double inc = increments ? increments->at(p, a, k) : sampler(stream);
                dev = decay * dev + sigma * inc;
            }
        }
    });
    return ens;
}

PathEnsemble simulate_limit_paths(const LimitSystem& system, const SimConfig& config, const DriverSpec& driver,
                                  const IncrementTable* increments) {
    return simulate_limit_paths(system, config, limit_means_for(config, system.epsilon), driver, increments);
}

Discrepancy coupled_discrepancy(const WeightedNetwork& net, const SimConfig& config, const DriverSpec& driver) {
    config.validate();
    driver.validate();
    require(net.epsilon().has_value(), "coupled discrepancy needs a tiered network with epsilon");
    require(net.n_core() >= 1 && net.n_periphery() >= 1, "coupled discrepancy needs both tiers");

    const std::size_t n = net.size();
    const std::size_t n_core = net.n_core();
    const std::size_t n_steps = config.n_steps();
    const double dt = config.dt;
    const DriftOperator op(net, config.theta_core, config.theta_periphery);
    const IncrementSampler sampler(driver, dt);
    const Vector sigma = tier_vector(net, config.sigma_core, config.sigma_periphery);
    const Vector x0 = tier_vector(net, config.initial_core, config.initial_periphery);
    const auto shocks = detail::resolve_shocks(config, n_core, n);
    const auto means = limit_means_for(config, *net.epsilon());

    std::vector<double> m_core(n_steps + 1), m_periph(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const auto m = means(static_cast<double>(k) * dt);
        m_core[k] = m.core;
        m_periph[k] = m.periphery;
    }
    const double decay_c = 1.0 - dt * config.theta_core;
    const double decay_p = 1.0 - dt * config.theta_periphery;

    std::vector<double> sup_core(config.n_paths), sup_periph(config.n_paths);
    const std::size_t block = detail::kPathBlock;
    const std::size_t n_blocks = (config.n_paths + block - 1) / block;
    parallel_for(n_blocks, config.threads, [&](std::size_t b) {
        const std::size_t first = b * block;
        const std::size_t width = std::min(block, config.n_paths - first);
        std::vector<double> x(n * width), dx(n * width);
        std::vector<double> dev_c(width, config.initial_core - m_core[0]);
        std::vector<double> dev_p(width, config.initial_periphery - m_periph[0]);
        std::vector<double> sc(width, 0.0), sp(width, 0.0);
        std::vector<rng::Stream> streams;
        streams.reserve(n * width);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < width; ++c) {
                x[i * width + c] = x0[static_cast<Eigen::Index>(i)];
                streams.emplace_back(config.seed, first + c, static_cast<std::uint32_t>(i));
            }
        const std::size_t pi = n_core;  // first periphery agent
        auto shock_it = shocks.begin();
        for (std::size_t k = 0;; ++k) {
            if (shock_it != shocks.end() && shock_it->step == k) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = shock_it->delta[static_cast<Eigen::Index>(i)];
                    if (d != 0.0)
                        for (std::size_t c = 0; c < width; ++c) x[i * width + c] += d;
                }
                ++shock_it;
            }
            for (std::size_t c = 0; c < width; ++c) {
                sc[c] = std::max(sc[c], std::abs(x[c] - (m_core[k] + dev_c[c])));
                sp[c] = std::max(sp[c], std::abs(x[pi * width + c] - (m_periph[k] + dev_p[c])));
            }
            if (k == n_steps) break;

            op.apply(x.data(), dx.data(), width);
            bool finite = true;
            for (std::size_t i = 0; i < n; ++i) {
                const double sig = sigma[static_cast<Eigen::Index>(i)];
                for (std::size_t c = 0; c < width; ++c) {
                    const std::size_t idx = i * width + c;
                    const double inc = sampler(streams[idx]);
                    x[idx] += dt * dx[idx] + sig * inc;
                    finite &= std::isfinite(x[idx]);
                    if (i == 0) dev_c[c] = decay_c * dev_c[c] + sig * inc;
                    if (i == pi) dev_p[c] = decay_p * dev_p[c] + sig * inc;
                }
            }
            if (!finite)
                fail(ErrorKind::Numeric, "non-finite robustness at step " + std::to_string(k + 1) +
                                             " in path block starting at " + std::to_string(first));
        }
        std::copy(sc.begin(), sc.end(), sup_core.begin() + static_cast<std::ptrdiff_t>(first));
        std::copy(sp.begin(), sp.end(), sup_periph.begin() + static_cast<std::ptrdiff_t>(first));
    });

    auto mean_se = [](const std::vector<double>& v) {
        const double nn = static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += x;
        const double m = s / nn;
        if (v.size() < 2) return std::pair{m, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::pair{m, std::sqrt(ss / (nn - 1.0) / nn)};
    };
    Discrepancy d;
    d.n_paths = config.n_paths;
    std::tie(d.core, d.core_stderr) = mean_se(sup_core);
    std::tie(d.periphery, d.periphery_stderr) = mean_se(sup_periph);
    return d;
}

bool scaled_growth_violation(const std::vector<double>& scaled) {
    double running_min = std::numeric_limits<double>::infinity();
    for (double v : scaled) {
        running_min = std::min(running_min, v);
        if (v > 1.25 * running_min) return true;
    }
    return false;
}

CouplingReport convergence_scan(const std::vector<std::pair<std::size_t, std::size_t>>& sizes, double epsilon,
                                const SimConfig& config, const DriverSpec& driver) {
    require(sizes.size() >= 3, "convergence scan needs at least 3 network sizes");
    const auto [c0, p0] = sizes.front();
    require(c0 >= 2 && p0 >= 1, "scan sizes need |C| >= 2 and |P| >= 1");
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const auto [c, p] = sizes[k];
        if (c * p0 != p * c0)
            fail(ErrorKind::InvalidArgument, "scan sizes must keep |C|/|P| constant: (" + std::to_string(c) + "," +
                                                 std::to_string(p) + ") differs from (" + std::to_string(c0) + "," +
                                                 std::to_string(p0) + ")");
        if (k > 0) require(c > sizes[k - 1].first, "scan sizes must have increasing |C|");
    }

    CouplingReport rep;
    rep.n_paths = config.n_paths;
    rep.t_end = config.t_end;
    rep.dt = config.dt;
    std::vector<double> sc, sp;
    for (const auto& [c, p] : sizes) {
        const auto net = build_core_periphery(c, p, epsilon);
        CouplingPoint pt;
        pt.n_core = c;
        pt.n_periphery = p;
        pt.discrepancy = coupled_discrepancy(net, config, driver);
        const double root = std::sqrt(static_cast<double>(c));
        pt.scaled_core = root * pt.discrepancy.core;
        pt.scaled_periphery = root * pt.discrepancy.periphery;
        sc.push_back(pt.scaled_core);
        sp.push_back(pt.scaled_periphery);
        rep.points.push_back(pt);
    }
    rep.core_violation = scaled_growth_violation(sc);
    rep.periphery_violation = scaled_growth_violation(sp);
    return rep;
}

void write_coupling_csv(std::ostream& out, const CouplingReport& report) {
    out << "n_core,n_periphery,tier,discrepancy,stderr,scaled_discrepancy\n";
    for (const auto& p : report.points) {
        out << p.n_core << ',' << p.n_periphery << ",core," << csv::number(p.discrepancy.core) << ','
            << csv::number(p.discrepancy.core_stderr) << ',' << csv::number(p.scaled_core) << '\n';
        out << p.n_core << ',' << p.n_periphery << ",periphery," << csv::number(p.discrepancy.periphery) << ','
            << csv::number(p.discrepancy.periphery_stderr) << ',' << csv::number(p.scaled_periphery) << '\n';
    }
}

}  // namespace cpnet
