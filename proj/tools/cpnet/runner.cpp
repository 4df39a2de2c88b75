#include "runner.hpp"

#include "svg.hpp"

#include <cpnet/cpnet.h>
#include <cpnet/csv.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpnet::cli {

namespace {

namespace fs = std::filesystem;

// A failing C API call, with the library's status and message.
struct ApiFailure : std::runtime_error {
    cpnet_status status;
    ApiFailure(cpnet_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(cpnet_status s, const char* call) {
    if (s != CPNET_OK)
        throw ApiFailure(s, std::string(call) + ": " + cpnet_status_name(s) + ": " + cpnet_last_error());
}

int exit_code_for(cpnet_status s) {
    switch (s) {
        case CPNET_ERR_INVALID_ARGUMENT:
        case CPNET_ERR_SHAPE_MISMATCH:
        case CPNET_ERR_UNSUPPORTED:
        case CPNET_ERR_IO: return kExitConfig;
        default: return kExitNumeric;
    }
}

struct NetworkFree {
    void operator()(cpnet_network* p) const { cpnet_network_free(p); }
};
struct EnsembleFree {
    void operator()(cpnet_ensemble* p) const { cpnet_ensemble_free(p); }
};
struct ReportFree {
    void operator()(cpnet_coupling_report* p) const { cpnet_coupling_report_free(p); }
};
struct ValidationFree {
    void operator()(cpnet_validation* p) const { cpnet_validation_free(p); }
};
using Network = std::unique_ptr<cpnet_network, NetworkFree>;
using Ensemble = std::unique_ptr<cpnet_ensemble, EnsembleFree>;
using Report = std::unique_ptr<cpnet_coupling_report, ReportFree>;
using Validation = std::unique_ptr<cpnet_validation, ValidationFree>;

cpnet_shock_target shock_target(const std::string& t) {
    if (t == "core") return CPNET_SHOCK_CORE;
    if (t == "periphery") return CPNET_SHOCK_PERIPHERY;
    if (t == "all") return CPNET_SHOCK_ALL;
    return CPNET_SHOCK_AGENTS;
}

// C views of the config; owns the arrays the C structs point into.
struct SimSetup {
    cpnet_sim_config config{};
    cpnet_driver driver{};
    std::vector<cpnet_shock> shocks;
    std::vector<std::size_t> record_agents;

    void set_shocks(const std::vector<ShockEntry>& entries) {
        shocks.clear();
        for (const auto& e : entries)
            shocks.push_back({e.time, shock_target(e.target), e.agents.data(), e.agents.size(), e.delta});
        config.shocks = shocks.data();
        config.n_shocks = shocks.size();
    }
    void set_record_agents(std::vector<std::size_t> agents) {
        record_agents = std::move(agents);
        config.record_agents = record_agents.data();
        config.n_record_agents = record_agents.size();
    }
};

SimSetup sim_setup(const ExperimentConfig& c) {
    SimSetup s;
    cpnet_sim_config_default(&s.config);
    const auto& p = c.simulation;
    s.config.t_end = p.t_end;
    s.config.dt = p.dt;
    s.config.n_paths = p.paths;
    s.config.seed = c.seed;
    s.config.theta_core = p.theta_core;
    s.config.theta_periphery = p.theta_periphery;
    s.config.sigma_core = p.sigma_core;
    s.config.sigma_periphery = p.sigma_periphery;
    s.config.initial_core = p.initial_core;
    s.config.initial_periphery = p.initial_periphery;
    s.config.record_stride = p.record_stride;
    s.config.threads = c.threads;
    s.set_shocks(p.shocks);
    s.set_record_agents(p.record_agents);

    cpnet_driver_default(&s.driver);
    if (c.driver.kind == "compound-poisson" || c.driver.kind == "compound-poisson-normalized")
        s.driver.kind = CPNET_DRIVER_COMPOUND_POISSON;
    else if (c.driver.kind == "brownian-plus-jumps")
        s.driver.kind = CPNET_DRIVER_BROWNIAN_PLUS_JUMPS;
    s.driver.jump_intensity = c.driver.jump_intensity;
    s.driver.jump_size_scale = c.driver.jump_size_scale;
    return s;
}

Network make_network(const ExperimentConfig& c) {
    cpnet_network* raw = nullptr;
    if (!c.network.file.empty())
        check(cpnet_network_load_csv(c.network.file.c_str(), &raw), "load network");
    else
        check(cpnet_network_core_periphery(c.network.n_core, c.network.n_periphery, c.network.epsilon, &raw),
              "build network");
    return Network(raw);
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ApiFailure(CPNET_ERR_IO, "cannot open " + path.string() + " for writing");
    return f;
}

void finish(std::ofstream& f, const fs::path& path, std::ostream& log) {
    f.close();
    if (!f) throw ApiFailure(CPNET_ERR_IO, "failed writing " + path.string());
    log << "wrote " << path.string() << '\n';
}

void plot(const ExperimentConfig& c, const fs::path& path, const std::vector<Series>& series, const PlotStyle& style,
          std::ostream& log) {
    if (!c.svg) return;
    emit_plot_file(path.string(), series, style);
    log << "wrote " << path.string() << '\n';
}

void report_warnings(const cpnet_ensemble* ens, std::ostream& err) {
    for (std::size_t i = 0; i < cpnet_ensemble_warning_count(ens); ++i)
        err << "warning: " << cpnet_ensemble_warning(ens, i) << '\n';
}

cpnet_stats stats(const cpnet_ensemble* ens, double t, std::size_t agent) {
    cpnet_stats s{};
    check(cpnet_ensemble_stats(ens, t, &agent, 1, &s), "ensemble stats");
    return s;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return out;
}

double ifpt(double mu, double sigma, double theta) {
    cpnet_fpt_query q;
    cpnet_fpt_query_default(&q);
    q.mu = mu;
    q.sigma = sigma;
    q.theta = theta;
    cpnet_risk_report r{};
    check(cpnet_expected_fpt(&q, &r), "expected first passage");
    return r.ifpt_risk;
}

// ---- experiments ----

void run_paths(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream& err) {
    auto net = make_network(c);
    auto setup = sim_setup(c);
    cpnet_ensemble* raw = nullptr;
    check(cpnet_simulate(net.get(), &setup.config, &setup.driver, &raw), "simulate");
    Ensemble ens(raw);
    report_warnings(ens.get(), err);

    check(cpnet_ensemble_write_paths_csv(ens.get(), (out / "paths.csv").c_str()), "write paths");
    log << "wrote " << (out / "paths.csv").string() << '\n';
    check(cpnet_ensemble_write_summary_csv(ens.get(), (out / "summary.csv").c_str()), "write summary");
    log << "wrote " << (out / "summary.csv").string() << '\n';

    if (!c.svg) return;
    const std::size_t n_times = cpnet_ensemble_n_times(ens.get());
    std::vector<double> times(n_times);
    check(cpnet_ensemble_times(ens.get(), times.data(), n_times), "times");
    std::vector<std::size_t> agents(cpnet_ensemble_n_agents(ens.get()));
    check(cpnet_ensemble_agents(ens.get(), agents.data(), agents.size()), "agents");
    const std::size_t n_core = cpnet_network_n_core(net.get());
    std::vector<std::size_t> shown;
    if (auto it = std::find_if(agents.begin(), agents.end(), [&](std::size_t a) { return a < n_core; });
        it != agents.end())
        shown.push_back(*it);
    if (auto it = std::find_if(agents.begin(), agents.end(), [&](std::size_t a) { return a >= n_core; });
        it != agents.end())
        shown.push_back(*it);
    std::vector<Series> series;
    const std::size_t n_show = std::min(c.paths.plot_paths, cpnet_ensemble_n_paths(ens.get()));
    for (std::size_t agent : shown) {
        for (std::size_t p = 0; p < n_show; ++p) {
            Series s{(agent < n_core ? "core " : "periphery ") + std::to_string(agent) + ", path " + std::to_string(p),
                     times, std::vector<double>(n_times)};
            for (std::size_t k = 0; k < n_times; ++k)
                check(cpnet_ensemble_value(ens.get(), p, agent, k, &s.y[k]), "ensemble value");
            series.push_back(std::move(s));
        }
    }
    plot(c, out / "paths.svg", series, {"Robustness paths", "t", "robustness"}, log);
}

void run_table1(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream& err) {
    auto net = make_network(c);
    const std::size_t core = 0;
    const std::size_t periphery = cpnet_network_n_core(net.get());
    auto setup = sim_setup(c);
    setup.set_record_agents({core, periphery});
    setup.config.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / c.simulation.dt)));

    const fs::path path = out / "table1.csv";
    auto f = open_csv(path);
    f << "theta_periphery,scenario,time,tier,agent,mean,std,stderr\n";
    struct Cell {
        std::string label;
        std::vector<double> x, y;
    };
    std::vector<Cell> cells;
    auto cell = [&](const std::string& label) -> Cell& {
        for (auto& k : cells)
            if (k.label == label) return k;
        cells.push_back({label, {}, {}});
        return cells.back();
    };

    for (double theta_p : c.table1.theta_periphery) {
        setup.config.theta_periphery = theta_p;
        struct Scenario {
            const char* name;
            double t_end;
            bool shocked;
            std::vector<double> times;
        };
        const std::vector<Scenario> scenarios = {{"no-shock", 1.0, false, {1.0}}, {"shock", 2.0, true, {1.0, 2.0}}};
        for (const auto& sc : scenarios) {
            setup.config.t_end = sc.t_end;
            if (sc.shocked)
                setup.set_shocks({ShockEntry{c.table1.shock_time, c.table1.shock_target, {}, c.table1.shock_delta}});
            else
                setup.set_shocks({});
            cpnet_ensemble* raw = nullptr;
            check(cpnet_simulate(net.get(), &setup.config, &setup.driver, &raw), "simulate");
            Ensemble ens(raw);
            report_warnings(ens.get(), err);
            for (double t : sc.times) {
                for (auto [tier, agent] : {std::pair{"core", core}, std::pair{"periphery", periphery}}) {
                    const auto s = stats(ens.get(), t, agent);
                    f << csv::number(theta_p) << ',' << sc.name << ',' << csv::number(t) << ',' << tier << ','
                      << agent << ',' << csv::number(s.mean) << ',' << csv::number(s.std) << ','
                      << (s.has_stderr ? csv::number(s.stderr_mean) : std::string()) << '\n';
                    auto& k = cell(std::string(tier) + ", " + sc.name + ", t=" + csv::number(t));
                    k.x.push_back(theta_p);
                    k.y.push_back(s.mean);
                }
            }
        }
        log << "table1: theta_periphery=" << csv::number(theta_p) << " done\n";
    }
    finish(f, path, log);

    std::vector<Series> series;
    for (auto& k : cells) series.push_back({k.label, k.x, k.y});
    plot(c, out / "table1.svg", series, {"Estimated robustness", "theta_P", "mean robustness"}, log);
}

void run_converge(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream&) {
    auto setup = sim_setup(c);
    std::vector<std::size_t> nc, np;
    for (auto [a, b] : c.converge.sizes) {
        nc.push_back(a);
        np.push_back(b);
    }
    cpnet_coupling_report* raw = nullptr;
    check(cpnet_convergence_scan(nc.data(), np.data(), nc.size(), c.network.epsilon, &setup.config, &setup.driver,
                                 &raw),
          "convergence scan");
    Report rep(raw);
    const fs::path path = out / "converge.csv";
    check(cpnet_coupling_report_write_csv(rep.get(), path.c_str()), "write coupling report");
    log << "wrote " << path.string() << '\n';
    log << "scaled growth violation: core=" << (cpnet_coupling_report_violation(rep.get(), 0) ? "yes" : "no")
        << " periphery=" << (cpnet_coupling_report_violation(rep.get(), 1) ? "yes" : "no") << '\n';

    Series core{"core", {}, {}}, peri{"periphery", {}, {}};
    for (std::size_t i = 0; i < cpnet_coupling_report_size(rep.get()); ++i) {
        std::size_t n_core = 0;
        double sc = 0, sp = 0;
        check(cpnet_coupling_report_point(rep.get(), i, &n_core, nullptr, nullptr, &sc, &sp), "coupling point");
        core.x.push_back(static_cast<double>(n_core));
        core.y.push_back(sc);
        peri.x.push_back(static_cast<double>(n_core));
        peri.y.push_back(sp);
    }
    plot(c, out / "converge.svg", {core, peri}, {"Scaled coupled discrepancy", "|C|", "sqrt(|C|) discrepancy"}, log);
}

void run_fpt(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream& err) {
    std::vector<cpnet_fpt_query> queries;
    std::vector<cpnet_risk_report> reports;
    const bool quad = c.fpt.method != "monte-carlo";
    const bool mc = c.fpt.method != "quadrature";
    const auto setup = sim_setup(c);
    for (const auto& p : c.fpt.points) {
        cpnet_fpt_query q{p.mu, p.sigma, p.theta, c.fpt.start, c.fpt.barrier};
        if (quad) {
            cpnet_risk_report r{};
            check(cpnet_expected_fpt(&q, &r), "expected first passage");
            if (r.diagnostics[0]) err << "note: " << r.diagnostics << '\n';
            queries.push_back(q);
            reports.push_back(r);
        }
        if (mc) {
            cpnet_mc_options o;
            cpnet_mc_options_default(&o);
            o.dt = c.fpt.mc_dt;
            o.n_paths = c.fpt.mc_paths;
            o.t_max = c.fpt.mc_t_max;
            o.seed = c.seed;
            o.threads = c.threads;
            o.driver = setup.driver;
            cpnet_risk_report r{};
            check(cpnet_mc_fpt(&q, &o, &r), "monte carlo first passage");
            if (r.diagnostics[0]) err << "warning: " << r.diagnostics << '\n';
            queries.push_back(q);
            reports.push_back(r);
        }
    }
    const fs::path path = out / "fpt.csv";
    check(cpnet_write_risk_csv(path.c_str(), queries.data(), reports.data(), queries.size()), "write risk csv");
    log << "wrote " << path.string() << '\n';
}

void run_hedge(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream&) {
    const auto& h = c.hedge;
    const fs::path path = out / "hedge.csv";
    auto f = open_csv(path);
    f << "measure,mu,sigma_before,sigma_after,theta_before,risk_before,risk_unhedged,theta_hedged,risk_hedged\n";

    double s_before = 0, s_after = 0, theta_s = 0, s_hedged = 0;
    check(cpnet_std_risk(h.sigma_before, h.theta_before, &s_before), "std risk");
    check(cpnet_std_risk(h.sigma_after, h.theta_before, &s_after), "std risk");
    check(cpnet_hedge_theta_for_std(h.sigma_after, s_before, &theta_s), "hedge std");
    check(cpnet_std_risk(h.sigma_after, theta_s, &s_hedged), "std risk");
    f << "std," << csv::number(h.mu) << ',' << csv::number(h.sigma_before) << ',' << csv::number(h.sigma_after) << ','
      << csv::number(h.theta_before) << ',' << csv::number(s_before) << ',' << csv::number(s_after) << ','
      << csv::number(theta_s) << ',' << csv::number(s_hedged) << '\n';

    const double t_before = ifpt(h.mu, h.sigma_before, h.theta_before);
    const double t_after = ifpt(h.mu, h.sigma_after, h.theta_before);
    double theta_t = 0;
    check(cpnet_hedge_theta_for_ifpt(h.mu, h.sigma_after, t_before, h.theta_lo, h.theta_hi, &theta_t), "hedge ifpt");
    const double t_hedged = ifpt(h.mu, h.sigma_after, theta_t);
    f << "ifpt," << csv::number(h.mu) << ',' << csv::number(h.sigma_before) << ',' << csv::number(h.sigma_after)
      << ',' << csv::number(h.theta_before) << ',' << csv::number(t_before) << ',' << csv::number(t_after) << ','
      << csv::number(theta_t) << ',' << csv::number(t_hedged) << '\n';
    finish(f, path, log);
}

void run_risk_curves(const ExperimentConfig& c, const fs::path& out, std::ostream& log, std::ostream&) {
    const auto& r = c.risk_curves;
    const auto thetas = linspace(r.theta_min, r.theta_max, r.theta_points);
    {
        const fs::path path = out / "ifpt_vs_theta.csv";
        auto f = open_csv(path);
        f << "mu,sigma,theta,ifpt_risk\n";
        std::vector<Series> series;
        for (double mu : r.mus) {
            Series s{"mu = " + csv::number(mu), {}, {}};
            for (double th : thetas) {
                const double tau = ifpt(mu, r.sigma, th);
                f << csv::number(mu) << ',' << csv::number(r.sigma) << ',' << csv::number(th) << ','
                  << csv::number(tau) << '\n';
                if (tau > 0.0 && std::isfinite(tau)) {
                    s.x.push_back(th);
                    s.y.push_back(tau);
                }
            }
            if (!s.x.empty()) series.push_back(std::move(s));
        }
        finish(f, path, log);
        plot(c, out / "ifpt_vs_theta.svg", series, {"IFPT risk against theta", "theta", "IFPT risk", true}, log);
    }

    const auto mus = linspace(r.mu_min, r.mu_max, r.mu_points);
    std::vector<double> keep(mus.size()), hedged(mus.size());
    double theta_hedged = 0;
    check(cpnet_compare_strategies(r.mu_reference, r.sigma_before, r.sigma_after, r.theta_before, mus.data(),
                                   mus.size(), c.hedge.theta_lo, c.hedge.theta_hi, keep.data(), hedged.data(),
                                   &theta_hedged),
          "compare strategies");
    const fs::path path = out / "strategies.csv";
    auto f = open_csv(path);
    f << "mu,sigma,theta_keep,tau_keep,theta_hedged,tau_hedged\n";
    for (std::size_t i = 0; i < mus.size(); ++i)
        f << csv::number(mus[i]) << ',' << csv::number(r.sigma_after) << ',' << csv::number(r.theta_before) << ','
          << csv::number(keep[i]) << ',' << csv::number(theta_hedged) << ',' << csv::number(hedged[i]) << '\n';
    finish(f, path, log);
    for (std::size_t i = 1; i < mus.size(); ++i) {
        const double d0 = keep[i - 1] - hedged[i - 1], d1 = keep[i] - hedged[i];
        if ((d0 < 0) != (d1 < 0))
            log << "strategies cross near mu = " << csv::number(mus[i - 1] + (mus[i] - mus[i - 1]) * d0 / (d0 - d1))
                << '\n';
    }
    auto positive = [](const std::vector<double>& x, const std::vector<double>& y, const std::string& name) {
        Series s{name, {}, {}};
        for (std::size_t i = 0; i < x.size(); ++i)
            if (y[i] > 0.0 && std::isfinite(y[i])) {
                s.x.push_back(x[i]);
                s.y.push_back(y[i]);
            }
        return s;
    };
    plot(c, out / "strategies.svg",
         {positive(mus, keep, "theta = " + csv::number(r.theta_before)),
          positive(mus, hedged, "theta = " + csv::number(theta_hedged))},
         {"IFPT risk of the two strategies", "mu", "IFPT risk", true}, log);
}

int run_validate(const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
    cpnet_validation* raw = nullptr;
    if (!c.network.file.empty()) {
        check(cpnet_validate_csv(c.network.file.c_str(), &raw), "validate network file");
    } else {
        auto net = make_network(c);
        std::vector<double> w(cpnet_network_size(net.get()) * cpnet_network_size(net.get()));
        check(cpnet_network_weights(net.get(), w.data(), w.size()), "weights");
        check(cpnet_validate_weights(c.network.n_core, c.network.n_periphery, w.data(), &raw), "validate network");
    }
    Validation v(raw);
    for (std::size_t i = 0; i < cpnet_validation_warning_count(v.get()); ++i)
        log << "warning: " << cpnet_validation_warning(v.get(), i) << '\n';
    for (std::size_t i = 0; i < cpnet_validation_error_count(v.get()); ++i)
        err << "error: " << cpnet_validation_error(v.get(), i) << '\n';
    const bool ok = cpnet_validation_ok(v.get());
    log << (ok ? "network valid" : "network invalid") << '\n';
    return ok ? kExitOk : kExitConfig;
}

}  // namespace

int run_config(Kind kind, const ExperimentConfig& config, std::ostream& log, std::ostream& err) {
    try {
        if (config.kind && *config.kind != kind) {
            err << "error: config declares experiment kind '" << to_string(*config.kind) << "' but the subcommand is '"
                << to_string(kind) << "'\n";
            return kExitConfig;
        }
        if (kind == Kind::ValidateNet) return run_validate(config, log, err);
        const fs::path out = config.out;
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) {
            err << "error: cannot create output directory " << out.string() << ": " << ec.message() << '\n';
            return kExitConfig;
        }
        switch (kind) {
            case Kind::Paths: run_paths(config, out, log, err); break;
            case Kind::Table1: run_table1(config, out, log, err); break;
            case Kind::Converge: run_converge(config, out, log, err); break;
            case Kind::Fpt: run_fpt(config, out, log, err); break;
            case Kind::Hedge: run_hedge(config, out, log, err); break;
            case Kind::RiskCurves: run_risk_curves(config, out, log, err); break;
            case Kind::ValidateNet: break;
        }
        return kExitOk;
    } catch (const ApiFailure& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.status);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

int run(Kind kind, const std::string& config_path, const Overrides& overrides, std::ostream& log, std::ostream& err) {
    ExperimentConfig config;
    try {
        config = config_path.empty() ? defaults_for(kind) : load_config(config_path, defaults_for(kind));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.out) config.out = *overrides.out;
    if (overrides.paths) {
        config.simulation.paths = *overrides.paths;
        config.fpt.mc_paths = *overrides.paths;
    }
    if (overrides.threads) config.threads = *overrides.threads;
    return run_config(kind, config, log, err);
}

}  // namespace cpnet::cli
