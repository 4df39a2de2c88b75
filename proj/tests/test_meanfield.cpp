#include <doctest.h>

#include "cpnet/error.hpp"
#include "cpnet/meanfield.hpp"

#include <cmath>

using namespace cpnet;

namespace {

SimConfig quiet_config() {
    SimConfig c;
    c.sigma_core = c.sigma_periphery = 0.0;
    c.initial_core = 1.0;
    c.initial_periphery = 0.2;
    c.theta_periphery = 4.0;
    c.record_stride = 100;
    return c;
}

}  // namespace

TEST_CASE("zero-noise limit paths equal the tier mean functions") {
    const LimitSystem sys{3, 5, 0.58};
    const auto c = quiet_config();
    const auto ens = simulate_limit_paths(sys, c, DriverSpec::brownian());
    for (std::size_t k = 0; k < ens.times().size(); ++k) {
        const auto m = limit_mean_ode(1.0, 4.0, 0.58, 1.0, 0.2, ens.times()[k]);
        CHECK(ens.value(0, 0, k) == doctest::Approx(m.core).epsilon(1e-14));
        CHECK(ens.value(0, 7, k) == doctest::Approx(m.periphery).epsilon(1e-14));
    }
}

TEST_CASE("tier shocks shift the mean functions piecewise") {
    auto c = quiet_config();
    c.initial_periphery = 1.0;
    c.shocks.push_back({0.9, ShockTarget::Core, {}, -0.3});
    const auto means = limit_means_for(c, 0.58);
    CHECK(means(0.5).core == 1.0);
    CHECK(means(0.9).core == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(means(0.9).periphery == doctest::Approx(1.0).epsilon(1e-12));
    const auto after = limit_mean_ode(1.0, 4.0, 0.58, 0.7, 1.0, 0.1);
    CHECK(means(1.0).core == doctest::Approx(after.core).epsilon(1e-12));
    CHECK(means(1.0).periphery == doctest::Approx(after.periphery).epsilon(1e-12));
}

TEST_CASE("agent-specific shocks are rejected in the limit system") {
    auto c = quiet_config();
    c.shocks.push_back({0.5, ShockTarget::Agents, {1}, -0.3});
    CHECK_THROWS_AS(limit_means_for(c, 0.5), Error);
}

TEST_CASE("explicit increments reproduce the built-in streams") {
    const LimitSystem sys{2, 3, 0.5};
    SimConfig c;
    c.n_paths = 20;
    c.t_end = 0.3;
    c.dt = 0.01;
    c.sigma_periphery = 0.5;
    const auto table = IncrementTable::generate(c, DriverSpec::brownian(), sys.size());
    const auto a = simulate_limit_paths(sys, c, DriverSpec::brownian());
    const auto b = simulate_limit_paths(sys, c, DriverSpec::brownian(), &table);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

    const IncrementTable wrong(20, 4, 30);
    try {
        simulate_limit_paths(sys, c, DriverSpec::brownian(), &wrong);
        FAIL("expected a shape mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
}

TEST_CASE("limit agent variance follows the scalar OU formula") {
    const LimitSystem sys{2, 2, 0.58};
    SimConfig c;
    c.n_paths = 8000;
    c.sigma_core = 0.3;
    c.sigma_periphery = 0.5;
    c.theta_periphery = 2.0;
    c.record_stride = 1000;
    const auto ens = simulate_limit_paths(sys, c, DriverSpec::brownian());
    const auto st = ensemble_stats(ens, 1.0, 3);
    const double v = limit_moments(2.0, 0.5, 1.0, 1.0).variance;
    CHECK(std::abs(st.std * st.std / v - 1.0) < 4.0 * std::sqrt(2.0 / 8000));
}

TEST_CASE("coupled discrepancy vanishes without noise") {
    const auto net = build_core_periphery(3, 6, 0.58);
    SimConfig c;
    c.sigma_core = c.sigma_periphery = 0.0;
    c.n_paths = 4;
    const auto d = coupled_discrepancy(net, c, DriverSpec::brownian());
    CHECK(d.core < 1e-12);
    CHECK(d.periphery < 1e-12);
    CHECK(d.n_paths == 4);
}

TEST_CASE("coupled discrepancy needs a tiered network") {
    const auto net = build_from_blocks(BlockPattern::tiered(Matrix::Ones(2, 2), Matrix::Ones(2, 2)));
    CHECK_THROWS_AS(coupled_discrepancy(net, SimConfig{}, DriverSpec::brownian()), Error);
}

TEST_CASE("convergence scan input checks") {
    SimConfig c;
    c.n_paths = 2;
    c.t_end = 0.01;
    CHECK_THROWS_AS(convergence_scan({{5, 50}, {10, 100}}, 0.58, c, DriverSpec::brownian()), Error);
    CHECK_THROWS_AS(convergence_scan({{5, 50}, {10, 90}, {20, 200}}, 0.58, c, DriverSpec::brownian()), Error);
    CHECK_THROWS_AS(convergence_scan({{10, 100}, {5, 50}, {20, 200}}, 0.58, c, DriverSpec::brownian()), Error);
    const auto rep = convergence_scan({{2, 4}, {3, 6}, {4, 8}}, 0.58, c, DriverSpec::brownian());
    CHECK(rep.points.size() == 3);
    CHECK(rep.points[1].scaled_core == doctest::Approx(std::sqrt(3.0) * rep.points[1].discrepancy.core));
}

TEST_CASE("scaled growth rule") {
    CHECK_FALSE(scaled_growth_violation({1.0, 0.9, 1.1, 1.12}));
    CHECK(scaled_growth_violation({1.0, 0.8, 1.01}));
    CHECK_FALSE(scaled_growth_violation({0.5, 0.6, 0.62}));
    CHECK(scaled_growth_violation({0.5, 0.7}));
}
