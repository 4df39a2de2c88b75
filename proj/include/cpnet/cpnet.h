/*
 * cpnet C API: core-periphery interbank robustness simulation and risk analytics.
 *
 * All objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a cpnet_status; on failure cpnet_last_error()
 * holds a message for the calling thread until its next failing call.
 * Matrices are dense, row-major, N x N with core agents first.
 */
#ifndef CPNET_H
#define CPNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CPNET_BUILDING)
#    define CPNET_API __declspec(dllexport)
#  else
#    define CPNET_API __declspec(dllimport)
#  endif
#else
#  define CPNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpnet_status {
    CPNET_OK = 0,
    CPNET_ERR_INVALID_ARGUMENT = 1,
    CPNET_ERR_OFF_GRID = 2,
    CPNET_ERR_SHAPE_MISMATCH = 3,
    CPNET_ERR_NUMERIC = 4,
    CPNET_ERR_NO_BRACKET = 5,
    CPNET_ERR_UNSUPPORTED = 6,
    CPNET_ERR_IO = 7,
    CPNET_ERR_INTERNAL = 8
} cpnet_status;

CPNET_API const char* cpnet_last_error(void);
CPNET_API const char* cpnet_status_name(cpnet_status status);
CPNET_API const char* cpnet_version(void);

/* ---- network ---------------------------------------------------------- */

typedef struct cpnet_network cpnet_network;
typedef struct cpnet_validation cpnet_validation;

CPNET_API cpnet_status cpnet_network_core_periphery(size_t n_core, size_t n_periphery, double epsilon,
                                                    cpnet_network** out);
/* Blocks are row-major: cc |C|x|C|, cp |C|x|P|, pc |P|x|C|, pp |P|x|P|. Rows are normalized. */
CPNET_API cpnet_status cpnet_network_from_blocks(size_t n_core, size_t n_periphery, const double* cc,
                                                 const double* cp, const double* pc, const double* pp,
                                                 cpnet_network** out);
CPNET_API cpnet_status cpnet_network_from_weights(size_t n_core, size_t n_periphery, const double* weights,
                                                  cpnet_network** out);
CPNET_API cpnet_status cpnet_network_load_csv(const char* path, cpnet_network** out);
CPNET_API cpnet_status cpnet_network_save_csv(const cpnet_network* net, const char* path);
CPNET_API void cpnet_network_free(cpnet_network* net);

CPNET_API size_t cpnet_network_size(const cpnet_network* net);
CPNET_API size_t cpnet_network_n_core(const cpnet_network* net);
CPNET_API size_t cpnet_network_n_periphery(const cpnet_network* net);
/* Returns 1 and writes epsilon when the network carries one, else 0. */
CPNET_API int cpnet_network_epsilon(const cpnet_network* net, double* epsilon);
CPNET_API cpnet_status cpnet_network_weights(const cpnet_network* net, double* out, size_t len);
CPNET_API cpnet_status cpnet_drift_matrix(const cpnet_network* net, double theta_core, double theta_periphery,
                                          double* out, size_t len);

/* Full invariant report for a network CSV file or a raw weight matrix. */
CPNET_API cpnet_status cpnet_validate_csv(const char* path, cpnet_validation** out);
CPNET_API cpnet_status cpnet_validate_weights(size_t n_core, size_t n_periphery, const double* weights,
                                              cpnet_validation** out);
CPNET_API int cpnet_validation_ok(const cpnet_validation* v);
CPNET_API size_t cpnet_validation_error_count(const cpnet_validation* v);
CPNET_API const char* cpnet_validation_error(const cpnet_validation* v, size_t i);
CPNET_API size_t cpnet_validation_warning_count(const cpnet_validation* v);
CPNET_API const char* cpnet_validation_warning(const cpnet_validation* v, size_t i);
CPNET_API void cpnet_validation_free(cpnet_validation* v);

/* ---- simulation ------------------------------------------------------- */

typedef enum cpnet_driver_kind {
    CPNET_DRIVER_BROWNIAN = 0,
    CPNET_DRIVER_COMPOUND_POISSON = 1,
    CPNET_DRIVER_BROWNIAN_PLUS_JUMPS = 2
} cpnet_driver_kind;

typedef struct cpnet_driver {
    cpnet_driver_kind kind;
    double jump_intensity;
    double jump_size_scale;
} cpnet_driver;

typedef enum cpnet_shock_target {
    CPNET_SHOCK_CORE = 0,
    CPNET_SHOCK_PERIPHERY = 1,
    CPNET_SHOCK_ALL = 2,
    CPNET_SHOCK_AGENTS = 3
} cpnet_shock_target;

typedef struct cpnet_shock {
    double time;
    cpnet_shock_target target;
    const size_t* agents; /* CPNET_SHOCK_AGENTS only */
    size_t n_agents;
    double delta;
} cpnet_shock;

typedef struct cpnet_sim_config {
    double t_end;
    double dt;
    size_t n_paths;
    uint64_t seed;
    double theta_core;
    double theta_periphery;
    double sigma_core;
    double sigma_periphery;
    double initial_core;
    double initial_periphery;
    const cpnet_shock* shocks;
    size_t n_shocks;
    size_t record_stride;
    const size_t* record_agents; /* NULL/0 records every agent */
    size_t n_record_agents;
    unsigned threads;            /* 0 = hardware concurrency */
} cpnet_sim_config;

CPNET_API void cpnet_sim_config_default(cpnet_sim_config* config);
CPNET_API void cpnet_driver_default(cpnet_driver* driver);

typedef struct cpnet_ensemble cpnet_ensemble;

typedef struct cpnet_stats {
    double mean;
    double std;
    double stderr_mean;
    int has_stderr;
    size_t n_paths;
} cpnet_stats;

CPNET_API cpnet_status cpnet_simulate(const cpnet_network* net, const cpnet_sim_config* config,
                                      const cpnet_driver* driver, cpnet_ensemble** out);
/* Mean-field limit system with the config's initial tier values as initial means. */
CPNET_API cpnet_status cpnet_simulate_limit(size_t n_core, size_t n_periphery, double epsilon,
                                            const cpnet_sim_config* config, const cpnet_driver* driver,
                                            cpnet_ensemble** out);
CPNET_API void cpnet_ensemble_free(cpnet_ensemble* ens);
CPNET_API size_t cpnet_ensemble_n_paths(const cpnet_ensemble* ens);
CPNET_API size_t cpnet_ensemble_n_agents(const cpnet_ensemble* ens);
CPNET_API size_t cpnet_ensemble_n_times(const cpnet_ensemble* ens);
CPNET_API cpnet_status cpnet_ensemble_times(const cpnet_ensemble* ens, double* out, size_t len);
CPNET_API cpnet_status cpnet_ensemble_agents(const cpnet_ensemble* ens, size_t* out, size_t len);
CPNET_API cpnet_status cpnet_ensemble_value(const cpnet_ensemble* ens, size_t path, size_t agent, size_t time_index,
                                            double* out);
CPNET_API cpnet_status cpnet_ensemble_stats(const cpnet_ensemble* ens, double t, const size_t* agents,
                                            size_t n_agents, cpnet_stats* out);
CPNET_API size_t cpnet_ensemble_warning_count(const cpnet_ensemble* ens);
CPNET_API const char* cpnet_ensemble_warning(const cpnet_ensemble* ens, size_t i);
/* Columns path,agent,time,value */
CPNET_API cpnet_status cpnet_ensemble_write_paths_csv(const cpnet_ensemble* ens, const char* path);
/* Columns agent,time,mean,std,stderr */
CPNET_API cpnet_status cpnet_ensemble_write_summary_csv(const cpnet_ensemble* ens, const char* path);

/* ---- analytic --------------------------------------------------------- */

CPNET_API cpnet_status cpnet_matrix_exponential(const double* m, size_t n, double t, double* out);
CPNET_API cpnet_status cpnet_exact_mean(const cpnet_network* net, double theta_core, double theta_periphery,
                                        const double* rho0, double t, double* out);
CPNET_API cpnet_status cpnet_exact_covariance(const cpnet_network* net, double theta_core, double theta_periphery,
                                              double sigma_core, double sigma_periphery, double t, double t_prime,
                                              double* out);
CPNET_API cpnet_status cpnet_limit_mean(double theta_core, double theta_periphery, double epsilon, double m0_core,
                                        double m0_periphery, double t, double* m_core, double* m_periphery);
CPNET_API cpnet_status cpnet_limit_moments(double theta, double sigma, double t, double s, double* variance,
                                           double* covariance);
CPNET_API cpnet_status cpnet_stationary_model(double mu, double theta_core, double theta_periphery,
                                              double sigma_core, double sigma_periphery, double* var_core,
                                              double* var_periphery);

/* ---- mean-field coupling ---------------------------------------------- */

typedef struct cpnet_discrepancy {
    double core;
    double core_stderr;
    double periphery;
    double periphery_stderr;
    size_t n_paths;
} cpnet_discrepancy;

typedef struct cpnet_coupling_report cpnet_coupling_report;

CPNET_API cpnet_status cpnet_coupled_discrepancy(const cpnet_network* net, const cpnet_sim_config* config,
                                                 const cpnet_driver* driver, cpnet_discrepancy* out);
CPNET_API cpnet_status cpnet_convergence_scan(const size_t* n_core, const size_t* n_periphery, size_t n_sizes,
                                              double epsilon, const cpnet_sim_config* config,
                                              const cpnet_driver* driver, cpnet_coupling_report** out);
CPNET_API size_t cpnet_coupling_report_size(const cpnet_coupling_report* rep);
CPNET_API cpnet_status cpnet_coupling_report_point(const cpnet_coupling_report* rep, size_t i, size_t* n_core,
                                                   size_t* n_periphery, cpnet_discrepancy* d, double* scaled_core,
                                                   double* scaled_periphery);
/* tier: 0 core, 1 periphery. Returns 1 when the scaled sequence grew >25% above its running minimum. */
CPNET_API int cpnet_coupling_report_violation(const cpnet_coupling_report* rep, int tier);
/* Columns n_core,n_periphery,tier,discrepancy,stderr,scaled_discrepancy */
CPNET_API cpnet_status cpnet_coupling_report_write_csv(const cpnet_coupling_report* rep, const char* path);
CPNET_API void cpnet_coupling_report_free(cpnet_coupling_report* rep);

/* ---- risk ------------------------------------------------------------- */

typedef struct cpnet_fpt_query {
    double mu;
    double sigma;
    double theta;
    double start;   /* default 1 */
    double barrier; /* default 0 */
} cpnet_fpt_query;

typedef enum cpnet_risk_method { CPNET_METHOD_QUADRATURE = 0, CPNET_METHOD_MONTE_CARLO = 1 } cpnet_risk_method;

typedef struct cpnet_risk_report {
    double std_risk;
    double expected_fpt;
    double ifpt_risk;
    double error_estimate;    /* quadrature error or Monte Carlo standard error */
    double censored_fraction; /* Monte Carlo only */
    cpnet_risk_method method;
    char diagnostics[512];
} cpnet_risk_report;

typedef struct cpnet_mc_options {
    double dt;
    size_t n_paths;
    double t_max;
    uint64_t seed;
    unsigned threads;
    double max_step; /* 0 = 0.5/theta */
    cpnet_driver driver;
} cpnet_mc_options;

CPNET_API void cpnet_fpt_query_default(cpnet_fpt_query* q);
CPNET_API void cpnet_mc_options_default(cpnet_mc_options* opts);
CPNET_API double cpnet_mills_ratio(double y);
CPNET_API cpnet_status cpnet_std_risk(double sigma, double theta, double* out);
CPNET_API cpnet_status cpnet_hedge_theta_for_std(double sigma, double s_target, double* out);
CPNET_API cpnet_status cpnet_expected_fpt(const cpnet_fpt_query* q, cpnet_risk_report* out);
CPNET_API cpnet_status cpnet_mc_fpt(const cpnet_fpt_query* q, const cpnet_mc_options* opts, cpnet_risk_report* out);
CPNET_API cpnet_status cpnet_hedge_theta_for_ifpt(double mu, double sigma, double tau_target, double theta_lo,
                                                  double theta_hi, double* out);
/* Writes tau_keep[i], tau_hedged[i] for each mus[i]; theta_hedged receives the raised rate. */
CPNET_API cpnet_status cpnet_compare_strategies(double mu_reference, double sigma_before, double sigma_after,
                                                double theta_before, const double* mus, size_t n_mus,
                                                double theta_lo, double theta_hi, double* tau_keep,
                                                double* tau_hedged, double* theta_hedged);
/* Columns mu,sigma,theta,start,barrier,std_risk,expected_fpt,ifpt_risk,error_estimate,method */
CPNET_API cpnet_status cpnet_write_risk_csv(const char* path, const cpnet_fpt_query* queries,
                                            const cpnet_risk_report* reports, size_t n);

#ifdef __cplusplus
}
#endif

#endif /* CPNET_H */
