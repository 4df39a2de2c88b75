#include "cpnet/cpnet.h"

#include "cpnet/analytic.hpp"
#include "cpnet/dynamics.hpp"
#include "cpnet/error.hpp"
#include "cpnet/meanfield.hpp"
#include "cpnet/network.hpp"
#include "cpnet/risk.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

struct cpnet_network {
    cpnet::WeightedNetwork net;
};

struct cpnet_validation {
    cpnet::ValidationReport report;
};

struct cpnet_ensemble {
    cpnet::PathEnsemble ens;
};

struct cpnet_coupling_report {
    cpnet::CouplingReport report;
};

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string g_last_error;

cpnet_status status_of(cpnet::ErrorKind kind) {
    switch (kind) {
        case cpnet::ErrorKind::InvalidArgument: return CPNET_ERR_INVALID_ARGUMENT;
        case cpnet::ErrorKind::OffGrid: return CPNET_ERR_OFF_GRID;
        case cpnet::ErrorKind::ShapeMismatch: return CPNET_ERR_SHAPE_MISMATCH;
        case cpnet::ErrorKind::Numeric: return CPNET_ERR_NUMERIC;
        case cpnet::ErrorKind::NoBracket: return CPNET_ERR_NO_BRACKET;
        case cpnet::ErrorKind::Unsupported: return CPNET_ERR_UNSUPPORTED;
        case cpnet::ErrorKind::Io: return CPNET_ERR_IO;
    }
    return CPNET_ERR_INTERNAL;
}

template <class F>
cpnet_status guarded(F&& f) {
    try {
        f();
        return CPNET_OK;
    } catch (const cpnet::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CPNET_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CPNET_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return CPNET_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) cpnet::fail(cpnet::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

cpnet::Matrix from_row_major(const double* data, std::size_t rows, std::size_t cols) {
    cpnet::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (rows * cols > 0) {
        need(data, "matrix data");
        m = Eigen::Map<const RowMajor>(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    return m;
}

void to_row_major(const cpnet::Matrix& m, double* out, std::size_t len) {
    need(out, "output buffer");
    const auto n = static_cast<std::size_t>(m.size());
    if (len < n)
        cpnet::fail(cpnet::ErrorKind::ShapeMismatch,
                    "output buffer holds " + std::to_string(len) + " values, need " + std::to_string(n));
    Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

cpnet::DriverSpec to_driver(const cpnet_driver* d) {
    if (!d) return cpnet::DriverSpec::brownian();
    cpnet::DriverSpec spec;
    switch (d->kind) {
        case CPNET_DRIVER_BROWNIAN: spec.kind = cpnet::DriverKind::Brownian; break;
        case CPNET_DRIVER_COMPOUND_POISSON: spec.kind = cpnet::DriverKind::CompoundPoisson; break;
        case CPNET_DRIVER_BROWNIAN_PLUS_JUMPS: spec.kind = cpnet::DriverKind::BrownianPlusJumps; break;
        default: cpnet::fail(cpnet::ErrorKind::InvalidArgument, "unknown driver kind");
    }
    spec.jump_intensity = d->jump_intensity;
    spec.jump_size_scale = d->jump_size_scale;
    return spec;
}

cpnet::SimConfig to_config(const cpnet_sim_config* c) {
    need(c, "config");
    cpnet::SimConfig cfg;
    cfg.t_end = c->t_end;
    cfg.dt = c->dt;
    cfg.n_paths = c->n_paths;
    cfg.seed = c->seed;
    cfg.theta_core = c->theta_core;
    cfg.theta_periphery = c->theta_periphery;
    cfg.sigma_core = c->sigma_core;
    cfg.sigma_periphery = c->sigma_periphery;
    cfg.initial_core = c->initial_core;
    cfg.initial_periphery = c->initial_periphery;
    if (c->n_shocks > 0) need(c->shocks, "shocks");
    for (std::size_t i = 0; i < c->n_shocks; ++i) {
        const cpnet_shock& s = c->shocks[i];
        cpnet::Shock shock;
        shock.time = s.time;
        shock.delta = s.delta;
        switch (s.target) {
            case CPNET_SHOCK_CORE: shock.target = cpnet::ShockTarget::Core; break;
            case CPNET_SHOCK_PERIPHERY: shock.target = cpnet::ShockTarget::Periphery; break;
            case CPNET_SHOCK_ALL: shock.target = cpnet::ShockTarget::All; break;
            case CPNET_SHOCK_AGENTS:
                shock.target = cpnet::ShockTarget::Agents;
                if (s.n_agents > 0) need(s.agents, "shock agents");
                shock.agents.assign(s.agents, s.agents + s.n_agents);
                break;
            default: cpnet::fail(cpnet::ErrorKind::InvalidArgument, "unknown shock target");
        }
        cfg.shocks.push_back(std::move(shock));
    }
    cfg.record_stride = c->record_stride;
    if (c->n_record_agents > 0) {
        need(c->record_agents, "record_agents");
        cfg.record_agents.assign(c->record_agents, c->record_agents + c->n_record_agents);
    }
    cfg.threads = c->threads;
    return cfg;
}

cpnet::FptQuery to_query(const cpnet_fpt_query* q) {
    need(q, "query");
    cpnet::FptQuery out;
    out.mu = q->mu;
    out.sigma = q->sigma;
    out.theta = q->theta;
    out.start = q->start;
    out.barrier = q->barrier;
    return out;
}

void fill_report(const cpnet::RiskReport& r, double censored, cpnet_risk_report* out) {
    out->std_risk = r.std_risk;
    out->expected_fpt = r.expected_fpt;
    out->ifpt_risk = r.ifpt_risk;
    out->error_estimate = r.error_estimate;
    out->censored_fraction = censored;
    out->method = r.method == cpnet::RiskMethod::Quadrature ? CPNET_METHOD_QUADRATURE : CPNET_METHOD_MONTE_CARLO;
    std::string diag;
    for (const auto& d : r.diagnostics) {
        if (!diag.empty()) diag += "; ";
        diag += d;
    }
    std::memset(out->diagnostics, 0, sizeof out->diagnostics);
    std::strncpy(out->diagnostics, diag.c_str(), sizeof out->diagnostics - 1);
}

cpnet::RiskReport from_report(const cpnet_fpt_query& q, const cpnet_risk_report& r) {
    cpnet::RiskReport out;
    out.query = to_query(&q);
    out.std_risk = r.std_risk;
    out.expected_fpt = r.expected_fpt;
    out.ifpt_risk = r.ifpt_risk;
    out.error_estimate = r.error_estimate;
    out.method = r.method == CPNET_METHOD_QUADRATURE ? cpnet::RiskMethod::Quadrature : cpnet::RiskMethod::MonteCarlo;
    return out;
}

std::ofstream open_out(const char* path) {
    need(path, "path");
    std::ofstream f(path);
    if (!f) cpnet::fail(cpnet::ErrorKind::Io, std::string("cannot open ") + path + " for writing");
    return f;
}

void close_out(std::ofstream& f, const char* path) {
    f.close();
    if (!f) cpnet::fail(cpnet::ErrorKind::Io, std::string("failed writing ") + path);
}

template <class T>
const char* item(const std::vector<T>& v, std::size_t i) {
    return i < v.size() ? v[i].c_str() : nullptr;
}

}  // namespace

extern "C" {

const char* cpnet_last_error(void) { return g_last_error.c_str(); }

const char* cpnet_status_name(cpnet_status status) {
    switch (status) {
        case CPNET_OK: return "ok";
        case CPNET_ERR_INVALID_ARGUMENT: return "invalid argument";
        case CPNET_ERR_OFF_GRID: return "off grid";
        case CPNET_ERR_SHAPE_MISMATCH: return "shape mismatch";
        case CPNET_ERR_NUMERIC: return "numeric failure";
        case CPNET_ERR_NO_BRACKET: return "no bracket";
        case CPNET_ERR_UNSUPPORTED: return "unsupported";
        case CPNET_ERR_IO: return "i/o error";
        case CPNET_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* cpnet_version(void) { return "1.0.0"; }

// ---- network ----

cpnet_status cpnet_network_core_periphery(size_t n_core, size_t n_periphery, double epsilon, cpnet_network** out) {
    return guarded([&] {
        need(out, "out");
        *out = new cpnet_network{cpnet::build_core_periphery(n_core, n_periphery, epsilon)};
    });
}

cpnet_status cpnet_network_from_blocks(size_t n_core, size_t n_periphery, const double* cc, const double* cp,
                                       const double* pc, const double* pp, cpnet_network** out) {
    return guarded([&] {
        need(out, "out");
        cpnet::BlockPattern p{from_row_major(cc, n_core, n_core), from_row_major(cp, n_core, n_periphery),
                              from_row_major(pc, n_periphery, n_core),
                              from_row_major(pp, n_periphery, n_periphery)};
        *out = new cpnet_network{cpnet::build_from_blocks(p)};
    });
}

cpnet_status cpnet_network_from_weights(size_t n_core, size_t n_periphery, const double* weights,
                                        cpnet_network** out) {
    return guarded([&] {
        need(out, "out");
        const std::size_t n = n_core + n_periphery;
        *out = new cpnet_network{cpnet::WeightedNetwork(n_core, n_periphery, from_row_major(weights, n, n))};
    });
}

cpnet_status cpnet_network_load_csv(const char* path, cpnet_network** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new cpnet_network{cpnet::load_network_csv(path)};
    });
}

cpnet_status cpnet_network_save_csv(const cpnet_network* net, const char* path) {
    return guarded([&] {
        need(net, "network");
        need(path, "path");
        cpnet::save_network_csv(path, net->net);
    });
}

void cpnet_network_free(cpnet_network* net) { delete net; }

size_t cpnet_network_size(const cpnet_network* net) { return net ? net->net.size() : 0; }
size_t cpnet_network_n_core(const cpnet_network* net) { return net ? net->net.n_core() : 0; }
size_t cpnet_network_n_periphery(const cpnet_network* net) { return net ? net->net.n_periphery() : 0; }

int cpnet_network_epsilon(const cpnet_network* net, double* epsilon) {
    if (!net || !net->net.epsilon()) return 0;
    if (epsilon) *epsilon = *net->net.epsilon();
    return 1;
}

cpnet_status cpnet_network_weights(const cpnet_network* net, double* out, size_t len) {
    return guarded([&] {
        need(net, "network");
        to_row_major(net->net.weights(), out, len);
    });
}

cpnet_status cpnet_drift_matrix(const cpnet_network* net, double theta_core, double theta_periphery, double* out,
                                size_t len) {
    return guarded([&] {
        need(net, "network");
        to_row_major(cpnet::drift_matrix(net->net, theta_core, theta_periphery), out, len);
    });
}

cpnet_status cpnet_validate_csv(const char* path, cpnet_validation** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        const auto raw = cpnet::load_raw_network_csv(path);
        *out = new cpnet_validation{cpnet::validate_weights(raw.n_core, raw.n_periphery, raw.weights)};
    });
}

cpnet_status cpnet_validate_weights(size_t n_core, size_t n_periphery, const double* weights,
                                    cpnet_validation** out) {
    return guarded([&] {
        need(out, "out");
        const std::size_t n = n_core + n_periphery;
        *out = new cpnet_validation{cpnet::validate_weights(n_core, n_periphery, from_row_major(weights, n, n))};
    });
}

int cpnet_validation_ok(const cpnet_validation* v) { return v && v->report.valid ? 1 : 0; }
size_t cpnet_validation_error_count(const cpnet_validation* v) { return v ? v->report.errors.size() : 0; }
const char* cpnet_validation_error(const cpnet_validation* v, size_t i) {
    return v ? item(v->report.errors, i) : nullptr;
}
size_t cpnet_validation_warning_count(const cpnet_validation* v) { return v ? v->report.warnings.size() : 0; }
const char* cpnet_validation_warning(const cpnet_validation* v, size_t i) {
    return v ? item(v->report.warnings, i) : nullptr;
}
void cpnet_validation_free(cpnet_validation* v) { delete v; }

// ---- simulation ----

void cpnet_sim_config_default(cpnet_sim_config* config) {
    if (!config) return;
    const cpnet::SimConfig d;
    *config = cpnet_sim_config{};
    config->t_end = d.t_end;
    config->dt = d.dt;
    config->n_paths = d.n_paths;
    config->seed = d.seed;
    config->theta_core = d.theta_core;
    config->theta_periphery = d.theta_periphery;
    config->sigma_core = d.sigma_core;
    config->sigma_periphery = d.sigma_periphery;
    config->initial_core = d.initial_core;
    config->initial_periphery = d.initial_periphery;
    config->record_stride = d.record_stride;
    config->threads = d.threads;
}

void cpnet_driver_default(cpnet_driver* driver) {
    if (driver) *driver = cpnet_driver{CPNET_DRIVER_BROWNIAN, 0.0, 0.0};
}

cpnet_status cpnet_simulate(const cpnet_network* net, const cpnet_sim_config* config, const cpnet_driver* driver,
                            cpnet_ensemble** out) {
    return guarded([&] {
        need(net, "network");
        need(out, "out");
        *out = new cpnet_ensemble{cpnet::simulate_paths(net->net, to_config(config), to_driver(driver))};
    });
}

cpnet_status cpnet_simulate_limit(size_t n_core, size_t n_periphery, double epsilon, const cpnet_sim_config* config,
                                  const cpnet_driver* driver, cpnet_ensemble** out) {
    return guarded([&] {
        need(out, "out");
        const cpnet::LimitSystem sys{n_core, n_periphery, epsilon};
        *out = new cpnet_ensemble{cpnet::simulate_limit_paths(sys, to_config(config), to_driver(driver))};
    });
}

void cpnet_ensemble_free(cpnet_ensemble* ens) { delete ens; }
size_t cpnet_ensemble_n_paths(const cpnet_ensemble* ens) { return ens ? ens->ens.n_paths() : 0; }
size_t cpnet_ensemble_n_agents(const cpnet_ensemble* ens) { return ens ? ens->ens.agents().size() : 0; }
size_t cpnet_ensemble_n_times(const cpnet_ensemble* ens) { return ens ? ens->ens.times().size() : 0; }

cpnet_status cpnet_ensemble_times(const cpnet_ensemble* ens, double* out, size_t len) {
    return guarded([&] {
        need(ens, "ensemble");
        need(out, "out");
        const auto t = ens->ens.times();
        if (len < t.size()) cpnet::fail(cpnet::ErrorKind::ShapeMismatch, "time buffer too small");
        std::copy(t.begin(), t.end(), out);
    });
}

cpnet_status cpnet_ensemble_agents(const cpnet_ensemble* ens, size_t* out, size_t len) {
    return guarded([&] {
        need(ens, "ensemble");
        need(out, "out");
        const auto a = ens->ens.agents();
        if (len < a.size()) cpnet::fail(cpnet::ErrorKind::ShapeMismatch, "agent buffer too small");
        std::copy(a.begin(), a.end(), out);
    });
}

cpnet_status cpnet_ensemble_value(const cpnet_ensemble* ens, size_t path, size_t agent, size_t time_index,
                                  double* out) {
    return guarded([&] {
        need(ens, "ensemble");
        need(out, "out");
        if (path >= ens->ens.n_paths()) cpnet::fail(cpnet::ErrorKind::InvalidArgument, "path index out of range");
        if (time_index >= ens->ens.times().size())
            cpnet::fail(cpnet::ErrorKind::InvalidArgument, "time index out of range");
        *out = ens->ens.value(path, ens->ens.agent_slot(agent), time_index);
    });
}

cpnet_status cpnet_ensemble_stats(const cpnet_ensemble* ens, double t, const size_t* agents, size_t n_agents,
                                  cpnet_stats* out) {
    return guarded([&] {
        need(ens, "ensemble");
        need(out, "out");
        if (n_agents > 0) need(agents, "agents");
        const auto s = cpnet::ensemble_stats(ens->ens, t, std::span<const std::size_t>(agents, n_agents));
        out->mean = s.mean;
        out->std = s.std;
        out->has_stderr = s.stderr_mean ? 1 : 0;
        out->stderr_mean = s.stderr_mean.value_or(0.0);
        out->n_paths = s.n_paths;
    });
}

size_t cpnet_ensemble_warning_count(const cpnet_ensemble* ens) { return ens ? ens->ens.warnings.size() : 0; }
const char* cpnet_ensemble_warning(const cpnet_ensemble* ens, size_t i) {
    return ens ? item(ens->ens.warnings, i) : nullptr;
}

cpnet_status cpnet_ensemble_write_paths_csv(const cpnet_ensemble* ens, const char* path) {
    return guarded([&] {
        need(ens, "ensemble");
        auto f = open_out(path);
        cpnet::write_paths_csv(f, ens->ens);
        close_out(f, path);
    });
}

cpnet_status cpnet_ensemble_write_summary_csv(const cpnet_ensemble* ens, const char* path) {
    return guarded([&] {
        need(ens, "ensemble");
        auto f = open_out(path);
        cpnet::write_summary_csv(f, ens->ens);
        close_out(f, path);
    });
}

// ---- analytic ----

cpnet_status cpnet_matrix_exponential(const double* m, size_t n, double t, double* out) {
    return guarded([&] { to_row_major(cpnet::matrix_exponential(from_row_major(m, n, n), t), out, n * n); });
}

cpnet_status cpnet_exact_mean(const cpnet_network* net, double theta_core, double theta_periphery,
                              const double* rho0, double t, double* out) {
    return guarded([&] {
        need(net, "network");
        need(rho0, "rho0");
        need(out, "out");
        const auto n = static_cast<Eigen::Index>(net->net.size());
        const cpnet::Vector r0 = Eigen::Map<const cpnet::Vector>(rho0, n);
        Eigen::Map<cpnet::Vector>(out, n) = cpnet::exact_mean(net->net, theta_core, theta_periphery, r0, t);
    });
}

cpnet_status cpnet_exact_covariance(const cpnet_network* net, double theta_core, double theta_periphery,
                                    double sigma_core, double sigma_periphery, double t, double t_prime,
                                    double* out) {
    return guarded([&] {
        need(net, "network");
        const std::size_t n = net->net.size();
        to_row_major(cpnet::exact_covariance(net->net, theta_core, theta_periphery, sigma_core, sigma_periphery, t,
                                             t_prime),
                     out, n * n);
    });
}

cpnet_status cpnet_limit_mean(double theta_core, double theta_periphery, double epsilon, double m0_core,
                              double m0_periphery, double t, double* m_core, double* m_periphery) {
    return guarded([&] {
        need(m_core, "m_core");
        need(m_periphery, "m_periphery");
        const auto m = cpnet::limit_mean_ode(theta_core, theta_periphery, epsilon, m0_core, m0_periphery, t);
        *m_core = m.core;
        *m_periphery = m.periphery;
    });
}

cpnet_status cpnet_limit_moments(double theta, double sigma, double t, double s, double* variance,
                                 double* covariance) {
    return guarded([&] {
        const auto m = cpnet::limit_moments(theta, sigma, t, s);
        if (variance) *variance = m.variance;
        if (covariance) *covariance = m.covariance;
    });
}

cpnet_status cpnet_stationary_model(double mu, double theta_core, double theta_periphery, double sigma_core,
                                    double sigma_periphery, double* var_core, double* var_periphery) {
    return guarded([&] {
        const auto m = cpnet::stationary_model(mu, theta_core, theta_periphery, sigma_core, sigma_periphery);
        if (var_core) *var_core = m.var_core;
        if (var_periphery) *var_periphery = m.var_periphery;
    });
}

// ---- mean-field coupling ----

namespace {
void fill_discrepancy(const cpnet::Discrepancy& d, cpnet_discrepancy* out) {
    out->core = d.core;
    out->core_stderr = d.core_stderr;
    out->periphery = d.periphery;
    out->periphery_stderr = d.periphery_stderr;
    out->n_paths = d.n_paths;
}
}  // namespace

cpnet_status cpnet_coupled_discrepancy(const cpnet_network* net, const cpnet_sim_config* config,
                                       const cpnet_driver* driver, cpnet_discrepancy* out) {
    return guarded([&] {
        need(net, "network");
        need(out, "out");
        fill_discrepancy(cpnet::coupled_discrepancy(net->net, to_config(config), to_driver(driver)), out);
    });
}

cpnet_status cpnet_convergence_scan(const size_t* n_core, const size_t* n_periphery, size_t n_sizes, double epsilon,
                                    const cpnet_sim_config* config, const cpnet_driver* driver,
                                    cpnet_coupling_report** out) {
    return guarded([&] {
        need(out, "out");
        if (n_sizes > 0) {
            need(n_core, "n_core");
            need(n_periphery, "n_periphery");
        }
        std::vector<std::pair<std::size_t, std::size_t>> sizes;
        for (std::size_t i = 0; i < n_sizes; ++i) sizes.emplace_back(n_core[i], n_periphery[i]);
        *out = new cpnet_coupling_report{cpnet::convergence_scan(sizes, epsilon, to_config(config), to_driver(driver))};
    });
}

size_t cpnet_coupling_report_size(const cpnet_coupling_report* rep) { return rep ? rep->report.points.size() : 0; }

cpnet_status cpnet_coupling_report_point(const cpnet_coupling_report* rep, size_t i, size_t* n_core,
                                         size_t* n_periphery, cpnet_discrepancy* d, double* scaled_core,
                                         double* scaled_periphery) {
    return guarded([&] {
        need(rep, "report");
        if (i >= rep->report.points.size()) cpnet::fail(cpnet::ErrorKind::InvalidArgument, "point index out of range");
        const auto& p = rep->report.points[i];
        if (n_core) *n_core = p.n_core;
        if (n_periphery) *n_periphery = p.n_periphery;
        if (d) fill_discrepancy(p.discrepancy, d);
        if (scaled_core) *scaled_core = p.scaled_core;
        if (scaled_periphery) *scaled_periphery = p.scaled_periphery;
    });
}

int cpnet_coupling_report_violation(const cpnet_coupling_report* rep, int tier) {
    if (!rep) return 0;
    return (tier == 0 ? rep->report.core_violation : rep->report.periphery_violation) ? 1 : 0;
}

cpnet_status cpnet_coupling_report_write_csv(const cpnet_coupling_report* rep, const char* path) {
    return guarded([&] {
        need(rep, "report");
        auto f = open_out(path);
        cpnet::write_coupling_csv(f, rep->report);
        close_out(f, path);
    });
}

void cpnet_coupling_report_free(cpnet_coupling_report* rep) { delete rep; }

// ---- risk ----

void cpnet_fpt_query_default(cpnet_fpt_query* q) {
    if (!q) return;
    const cpnet::FptQuery d;
    *q = cpnet_fpt_query{d.mu, d.sigma, d.theta, d.start, d.barrier};
}

void cpnet_mc_options_default(cpnet_mc_options* opts) {
    if (!opts) return;
    const cpnet::McFptOptions d;
    *opts = cpnet_mc_options{};
    opts->dt = d.dt;
    opts->n_paths = d.n_paths;
    opts->t_max = d.t_max;
    opts->seed = d.seed;
    opts->threads = d.threads;
    opts->max_step = d.max_step;
    cpnet_driver_default(&opts->driver);
}

double cpnet_mills_ratio(double y) { return cpnet::mills_ratio(y); }

cpnet_status cpnet_std_risk(double sigma, double theta, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = cpnet::std_risk(sigma, theta);
    });
}

cpnet_status cpnet_hedge_theta_for_std(double sigma, double s_target, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = cpnet::hedge_theta_for_std(sigma, s_target);
    });
}

cpnet_status cpnet_expected_fpt(const cpnet_fpt_query* q, cpnet_risk_report* out) {
    return guarded([&] {
        need(out, "out");
        fill_report(cpnet::risk_report(to_query(q)), 0.0, out);
    });
}

cpnet_status cpnet_mc_fpt(const cpnet_fpt_query* q, const cpnet_mc_options* opts, cpnet_risk_report* out) {
    return guarded([&] {
        need(opts, "options");
        need(out, "out");
        const auto query = to_query(q);
        cpnet::McFptOptions o;
        o.dt = opts->dt;
        o.n_paths = opts->n_paths;
        o.t_max = opts->t_max;
        o.seed = opts->seed;
        o.threads = opts->threads;
        o.max_step = opts->max_step;
        o.driver = to_driver(&opts->driver);
        const auto mc = cpnet::mc_fpt_oracle(query, o);
        fill_report(cpnet::risk_report(query, mc), mc.censored_fraction, out);
    });
}

cpnet_status cpnet_hedge_theta_for_ifpt(double mu, double sigma, double tau_target, double theta_lo,
                                        double theta_hi, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = cpnet::hedge_theta_for_ifpt(mu, sigma, tau_target, theta_lo, theta_hi);
    });
}

cpnet_status cpnet_compare_strategies(double mu_reference, double sigma_before, double sigma_after,
                                      double theta_before, const double* mus, size_t n_mus, double theta_lo,
                                      double theta_hi, double* tau_keep, double* tau_hedged, double* theta_hedged) {
    return guarded([&] {
        if (n_mus > 0) {
            need(mus, "mus");
            need(tau_keep, "tau_keep");
            need(tau_hedged, "tau_hedged");
        }
        const auto c = cpnet::compare_strategies(mu_reference, sigma_before, sigma_after, theta_before,
                                                 std::vector<double>(mus, mus + n_mus), theta_lo, theta_hi);
        for (std::size_t i = 0; i < n_mus; ++i) {
            tau_keep[i] = c.points[i].tau_keep;
            tau_hedged[i] = c.points[i].tau_hedged;
        }
        if (theta_hedged) *theta_hedged = c.theta_hedged;
    });
}

cpnet_status cpnet_write_risk_csv(const char* path, const cpnet_fpt_query* queries, const cpnet_risk_report* reports,
                                  size_t n) {
    return guarded([&] {
        if (n > 0) {
            need(queries, "queries");
            need(reports, "reports");
        }
        auto f = open_out(path);
        cpnet::write_risk_csv_header(f);
        for (std::size_t i = 0; i < n; ++i) cpnet::write_risk_csv_row(f, from_report(queries[i], reports[i]));
        close_out(f, path);
    });
}

}  // extern "C"
