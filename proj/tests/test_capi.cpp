#include <doctest.h>

#include <cpnet/cpnet.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cpnet_capi_" + name)).string();
}

cpnet_sim_config base_config() {
    cpnet_sim_config c;
    cpnet_sim_config_default(&c);
    return c;
}

}  // namespace

TEST_CASE("defaults mirror the library") {
    const auto c = base_config();
    CHECK(c.t_end == 1.0);
    CHECK(c.dt == 1e-3);
    CHECK(c.n_paths == 1);
    CHECK(c.record_stride == 1);
    CHECK(c.shocks == nullptr);
    cpnet_fpt_query q;
    cpnet_fpt_query_default(&q);
    CHECK(q.start == 1.0);
    CHECK(q.barrier == 0.0);
    cpnet_mc_options o;
    cpnet_mc_options_default(&o);
    CHECK(o.n_paths == 10000);
    CHECK(o.driver.kind == CPNET_DRIVER_BROWNIAN);
    CHECK(std::string(cpnet_version()) == "1.0.0");
}

TEST_CASE("network handles") {
    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_core_periphery(5, 50, 0.58, &net) == CPNET_OK);
    CHECK(cpnet_network_size(net) == 55);
    CHECK(cpnet_network_n_core(net) == 5);
    double eps = 0;
    CHECK(cpnet_network_epsilon(net, &eps) == 1);
    CHECK(eps == 0.58);

    std::vector<double> w(55 * 55);
    REQUIRE(cpnet_network_weights(net, w.data(), w.size()) == CPNET_OK);
    CHECK(w[1] == doctest::Approx(0.105));          // row 0, column 1
    CHECK(w[5 * 55 + 0] == doctest::Approx(0.2));   // row 5, column 0
    CHECK(w[0 * 55 + 5] == doctest::Approx(0.0116));
    CHECK(cpnet_network_weights(net, w.data(), 10) == CPNET_ERR_SHAPE_MISMATCH);

    std::vector<double> d(55 * 55);
    REQUIRE(cpnet_drift_matrix(net, 1.0, 10.0, d.data(), d.size()) == CPNET_OK);
    CHECK(d[5 * 55 + 5] == doctest::Approx(-10.0));

    const auto path = temp_path("net.csv");
    REQUIRE(cpnet_network_save_csv(net, path.c_str()) == CPNET_OK);
    cpnet_network* back = nullptr;
    REQUIRE(cpnet_network_load_csv(path.c_str(), &back) == CPNET_OK);
    std::vector<double> w2(55 * 55);
    cpnet_network_weights(back, w2.data(), w2.size());
    CHECK(w == w2);
    cpnet_network_free(back);
    cpnet_network_free(net);
    std::remove(path.c_str());
}

TEST_CASE("network errors carry status and message") {
    cpnet_network* net = nullptr;
    CHECK(cpnet_network_core_periphery(1, 5, 0.5, &net) == CPNET_ERR_INVALID_ARGUMENT);
    CHECK(net == nullptr);
    CHECK(std::string(cpnet_last_error()).find("core") != std::string::npos);
    CHECK(cpnet_network_core_periphery(3, 5, 0.5, nullptr) == CPNET_ERR_INVALID_ARGUMENT);
    CHECK(cpnet_network_load_csv("/nonexistent/x.csv", &net) == CPNET_ERR_IO);
    CHECK(std::string(cpnet_status_name(CPNET_ERR_NO_BRACKET)) == "no bracket");
    cpnet_network_free(nullptr);  // no-op
}

TEST_CASE("blocks and raw weights") {
    const double cc[] = {0, 1, 1, 0};
    const double cp[] = {1, 1, 1, 1};
    const double pc[] = {1, 0, 1, 1};
    const double pp[] = {0, 0, 0, 0};
    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_from_blocks(2, 2, cc, cp, pc, pp, &net) == CPNET_OK);
    std::vector<double> w(16);
    cpnet_network_weights(net, w.data(), w.size());
    CHECK(w[2 * 4 + 0] == 1.0);
    CHECK(w[3 * 4 + 1] == 0.5);
    cpnet_network* copy = nullptr;
    REQUIRE(cpnet_network_from_weights(2, 2, w.data(), &copy) == CPNET_OK);
    CHECK(cpnet_network_epsilon(copy, nullptr) == 0);
    cpnet_network_free(copy);
    cpnet_network_free(net);

    const double bad_pc[] = {0, 0, 1, 1};
    CHECK(cpnet_network_from_blocks(2, 2, cc, cp, bad_pc, pp, &net) == CPNET_ERR_INVALID_ARGUMENT);
}

TEST_CASE("validation handle lists errors and warnings") {
    std::vector<double> w = {0, 0.5, 0.5, 0,  //
                             0.5, 0, 0.5, 0,  //
                             1, 0, 0, 0,      //
                             1, 0, 0, 0};
    cpnet_validation* v = nullptr;
    REQUIRE(cpnet_validate_weights(2, 2, w.data(), &v) == CPNET_OK);
    CHECK(cpnet_validation_ok(v) == 1);
    CHECK(cpnet_validation_warning_count(v) >= 1);  // no periphery lends to core 1, core rows miss periphery 1
    cpnet_validation_free(v);

    w[0] = 0.3;
    w[3 * 4 + 0] = 0.0;
    REQUIRE(cpnet_validate_weights(2, 2, w.data(), &v) == CPNET_OK);
    CHECK(cpnet_validation_ok(v) == 0);
    CHECK(cpnet_validation_error_count(v) >= 2);
    CHECK(cpnet_validation_error(v, 0) != nullptr);
    CHECK(cpnet_validation_error(v, 99) == nullptr);
    cpnet_validation_free(v);

    const auto path = temp_path("bad.csv");
    {
        std::ofstream f(path);
        f << "n_core,n_periphery,epsilon\n2,1,\n0,0.5,0.5\n1,0,0\n0,0,0\n";
    }
    REQUIRE(cpnet_validate_csv(path.c_str(), &v) == CPNET_OK);
    CHECK(cpnet_validation_ok(v) == 0);
    CHECK(std::string(cpnet_validation_error(v, 0)).find("no debtors") != std::string::npos);
    cpnet_validation_free(v);
    std::remove(path.c_str());
}

TEST_CASE("simulation through the C API") {
    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_core_periphery(5, 50, 0.58, &net) == CPNET_OK);
    auto c = base_config();
    c.n_paths = 64;
    c.sigma_periphery = 0.5;
    c.record_stride = 100;
    const size_t rec[] = {0, 5};
    c.record_agents = rec;
    c.n_record_agents = 2;
    const cpnet_shock shock{0.9, CPNET_SHOCK_CORE, nullptr, 0, -0.3};
    c.shocks = &shock;
    c.n_shocks = 1;
    c.threads = 1;

    cpnet_ensemble* a = nullptr;
    REQUIRE(cpnet_simulate(net, &c, nullptr, &a) == CPNET_OK);
    CHECK(cpnet_ensemble_n_paths(a) == 64);
    CHECK(cpnet_ensemble_n_agents(a) == 2);
    REQUIRE(cpnet_ensemble_n_times(a) == 11);
    std::vector<double> t(11);
    cpnet_ensemble_times(a, t.data(), t.size());
    CHECK(t[10] == doctest::Approx(1.0));
    std::vector<size_t> agents(2);
    cpnet_ensemble_agents(a, agents.data(), agents.size());
    CHECK(agents[1] == 5);

    cpnet_stats st{};
    size_t core = 0;
    REQUIRE(cpnet_ensemble_stats(a, 1.0, &core, 1, &st) == CPNET_OK);
    CHECK(st.has_stderr == 1);
    CHECK(st.mean < 0.8);
    CHECK(cpnet_ensemble_stats(a, 0.95, &core, 1, &st) == CPNET_ERR_OFF_GRID);
    CHECK(std::string(cpnet_last_error()).find("0.9 1") != std::string::npos);
    size_t missing = 3;
    CHECK(cpnet_ensemble_stats(a, 1.0, &missing, 1, &st) == CPNET_ERR_INVALID_ARGUMENT);

    c.threads = 4;
    cpnet_driver drv;
    cpnet_driver_default(&drv);
    cpnet_ensemble* b = nullptr;
    REQUIRE(cpnet_simulate(net, &c, &drv, &b) == CPNET_OK);
    for (size_t p = 0; p < 64; ++p)
        for (size_t k = 0; k < 11; ++k) {
            double va = 0, vb = 0;
            cpnet_ensemble_value(a, p, 5, k, &va);
            cpnet_ensemble_value(b, p, 5, k, &vb);
            REQUIRE(va == vb);
        }
    double v = 0;
    CHECK(cpnet_ensemble_value(a, 64, 5, 0, &v) == CPNET_ERR_INVALID_ARGUMENT);

    const auto paths = temp_path("paths.csv"), summary = temp_path("summary.csv");
    CHECK(cpnet_ensemble_write_paths_csv(a, paths.c_str()) == CPNET_OK);
    CHECK(cpnet_ensemble_write_summary_csv(a, summary.c_str()) == CPNET_OK);
    CHECK(cpnet_ensemble_write_paths_csv(a, "/nonexistent/dir/p.csv") == CPNET_ERR_IO);
    std::ifstream f(summary);
    std::string header;
    std::getline(f, header);
    CHECK(header == "agent,time,mean,std,stderr");
    std::remove(paths.c_str());
    std::remove(summary.c_str());

    cpnet_ensemble_free(a);
    cpnet_ensemble_free(b);
    cpnet_network_free(net);
}

TEST_CASE("driver and shock validation through the C API") {
    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_core_periphery(3, 4, 0.5, &net) == CPNET_OK);
    auto c = base_config();
    cpnet_driver drv{CPNET_DRIVER_COMPOUND_POISSON, 0.0, 0.0};
    cpnet_ensemble* e = nullptr;
    CHECK(cpnet_simulate(net, &c, &drv, &e) == CPNET_ERR_INVALID_ARGUMENT);
    drv.kind = static_cast<cpnet_driver_kind>(42);
    CHECK(cpnet_simulate(net, &c, &drv, &e) == CPNET_ERR_INVALID_ARGUMENT);
    const size_t bad_agent[] = {100};
    const cpnet_shock s{0.5, CPNET_SHOCK_AGENTS, bad_agent, 1, -0.3};
    c.shocks = &s;
    c.n_shocks = 1;
    CHECK(cpnet_simulate(net, &c, nullptr, &e) == CPNET_ERR_INVALID_ARGUMENT);
    const size_t one_agent[] = {1};
    const cpnet_shock agent_shock{0.5, CPNET_SHOCK_AGENTS, one_agent, 1, -0.3};
    c.shocks = &agent_shock;
    CHECK(cpnet_simulate_limit(3, 4, 0.5, &c, nullptr, &e) == CPNET_ERR_UNSUPPORTED);
    cpnet_network_free(net);
}

TEST_CASE("limit simulation and coupling") {
    auto c = base_config();
    c.n_paths = 16;
    c.sigma_core = c.sigma_periphery = 0.0;
    c.initial_periphery = 0.0;
    cpnet_ensemble* e = nullptr;
    REQUIRE(cpnet_simulate_limit(3, 6, 0.58, &c, nullptr, &e) == CPNET_OK);
    double m_core = 0, m_per = 0, v = 0;
    REQUIRE(cpnet_limit_mean(1.0, 1.0, 0.58, 1.0, 0.0, 1.0, &m_core, &m_per) == CPNET_OK);
    cpnet_ensemble_value(e, 3, 4, cpnet_ensemble_n_times(e) - 1, &v);
    CHECK(v == doctest::Approx(m_per).epsilon(1e-14));
    cpnet_ensemble_free(e);

    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_core_periphery(3, 6, 0.58, &net) == CPNET_OK);
    cpnet_discrepancy d{};
    REQUIRE(cpnet_coupled_discrepancy(net, &c, nullptr, &d) == CPNET_OK);
    CHECK(d.n_paths == 16);
    cpnet_network_free(net);

    c.sigma_core = 0.2;
    c.sigma_periphery = 0.5;
    c.t_end = 0.1;
    const size_t nc[] = {2, 4, 6}, np[] = {4, 8, 12};
    cpnet_coupling_report* rep = nullptr;
    REQUIRE(cpnet_convergence_scan(nc, np, 3, 0.58, &c, nullptr, &rep) == CPNET_OK);
    CHECK(cpnet_coupling_report_size(rep) == 3);
    size_t got_c = 0;
    double sc = 0;
    REQUIRE(cpnet_coupling_report_point(rep, 2, &got_c, nullptr, &d, &sc, nullptr) == CPNET_OK);
    CHECK(got_c == 6);
    CHECK(sc == doctest::Approx(std::sqrt(6.0) * d.core));
    CHECK(cpnet_coupling_report_point(rep, 3, nullptr, nullptr, nullptr, nullptr, nullptr) ==
          CPNET_ERR_INVALID_ARGUMENT);
    const auto path = temp_path("coupling.csv");
    CHECK(cpnet_coupling_report_write_csv(rep, path.c_str()) == CPNET_OK);
    std::remove(path.c_str());
    cpnet_coupling_report_free(rep);
    CHECK(cpnet_convergence_scan(nc, np, 2, 0.58, &c, nullptr, &rep) == CPNET_ERR_INVALID_ARGUMENT);
}

TEST_CASE("analytic entry points") {
    const double m[] = {0, 1, -1, 0};  // rotation generator
    double out[4];
    REQUIRE(cpnet_matrix_exponential(m, 2, 0.5, out) == CPNET_OK);
    CHECK(out[0] == doctest::Approx(std::cos(0.5)));
    CHECK(out[1] == doctest::Approx(std::sin(0.5)));
    CHECK(out[2] == doctest::Approx(-std::sin(0.5)));

    cpnet_network* net = nullptr;
    REQUIRE(cpnet_network_core_periphery(2, 1, 0.5, &net) == CPNET_OK);
    const double rho0[] = {1, 1, 1};
    double mean[3];
    REQUIRE(cpnet_exact_mean(net, 1, 2, rho0, 1.0, mean) == CPNET_OK);
    CHECK(mean[2] == doctest::Approx(1.0));
    double cov[9];
    REQUIRE(cpnet_exact_covariance(net, 1, 2, 0.2, 0.5, 1.0, 1.0, cov) == CPNET_OK);
    CHECK(cov[1] == doctest::Approx(cov[3]));
    cpnet_network_free(net);

    double var = 0, cv = 0;
    REQUIRE(cpnet_limit_moments(2.0, 0.5, 1.0, 1.0, &var, &cv) == CPNET_OK);
    CHECK(var == doctest::Approx(cv));
    double vc = 0, vp = 0;
    REQUIRE(cpnet_stationary_model(0.5, 1.0, 6.25, 0.2, 0.5, &vc, &vp) == CPNET_OK);
    CHECK(vc == doctest::Approx(vp));
}

TEST_CASE("risk entry points") {
    double s = 0;
    REQUIRE(cpnet_std_risk(0.5, 6.25, &s) == CPNET_OK);
    CHECK(s == doctest::Approx(0.1414213562).epsilon(1e-9));
    double th = 0;
    REQUIRE(cpnet_hedge_theta_for_std(0.5, 0.14142135623730950, &th) == CPNET_OK);
    CHECK(th == doctest::Approx(6.25));
    CHECK(cpnet_mills_ratio(0.0) == doctest::Approx(1.2533141373155));

    cpnet_fpt_query q;
    cpnet_fpt_query_default(&q);
    cpnet_risk_report r{};
    REQUIRE(cpnet_expected_fpt(&q, &r) == CPNET_OK);
    CHECK(r.expected_fpt == doctest::Approx(5.184965439133721).epsilon(1e-9));
    CHECK(r.method == CPNET_METHOD_QUADRATURE);

    REQUIRE(cpnet_hedge_theta_for_ifpt(0.5, 0.5, 1.0 / 409.6503460089109, 1, 50, &th) == CPNET_OK);
    CHECK(th == doctest::Approx(8.599049874).epsilon(1e-6));
    CHECK(cpnet_hedge_theta_for_ifpt(0.05, 0.5, 0.002, 1, 50, &th) == CPNET_ERR_NO_BRACKET);

    cpnet_mc_options o;
    cpnet_mc_options_default(&o);
    o.n_paths = 500;
    cpnet_risk_report mc{};
    REQUIRE(cpnet_mc_fpt(&q, &o, &mc) == CPNET_OK);
    CHECK(mc.method == CPNET_METHOD_MONTE_CARLO);
    CHECK(std::abs(mc.expected_fpt - r.expected_fpt) < 4 * mc.error_estimate);

    const double mus[] = {0.1, 0.5, 0.9};
    double keep[3], hedged[3], theta_h = 0;
    REQUIRE(cpnet_compare_strategies(0.5, 0.2, 0.5, 1.0, mus, 3, 1, 50, keep, hedged, &theta_h) == CPNET_OK);
    CHECK(hedged[0] > keep[0]);
    CHECK(hedged[2] < keep[2]);

    const cpnet_fpt_query qs[] = {q, q};
    const cpnet_risk_report rs[] = {r, mc};
    const auto path = temp_path("risk.csv");
    REQUIRE(cpnet_write_risk_csv(path.c_str(), qs, rs, 2) == CPNET_OK);
    std::ifstream f(path);
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 3);
    std::remove(path.c_str());

    q.sigma = -1;
    CHECK(cpnet_expected_fpt(&q, &r) == CPNET_ERR_INVALID_ARGUMENT);
}
