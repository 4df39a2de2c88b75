// Acceptance suite: one PASS/FAIL line per criterion, details indented below it.
// Exit status counts failures that are not recorded as unattainable in the decisions ledger.

#include "cpnet/analytic.hpp"
#include "cpnet/dynamics.hpp"
#include "cpnet/meanfield.hpp"
#include "cpnet/risk.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cpnet;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances and budgets ----
constexpr double kC1Tol = 1e-6;
constexpr double kC1BudgetSec = 1e-3;
constexpr double kC2TauTol = 0.004;
constexpr double kC2LowTauRel = 0.10;
constexpr double kC2ThetaTol = 0.2;
constexpr double kC2BudgetSec = 1.0;
constexpr double kC3Sigmas = 3.0;
constexpr double kC3BudgetSec = 300.0;
constexpr double kC4Tol = 0.03;
constexpr double kC4BudgetSec = 600.0;
constexpr double kC5MeanTol = 1e-2;
constexpr double kC5Sigmas = 3.0;
constexpr double kC5BudgetSec = 300.0;
constexpr double kC6Sigmas = 2.0;
constexpr double kC6Growth = 1.25;
constexpr double kC6BudgetSec = 900.0;
constexpr double kC7Paths = 1e4;

struct Outcome {
    bool pass = true;
    bool known_unattainable = false;  // recorded in the decisions ledger; stays red
    std::vector<std::string> lines;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    }
    void note(const std::string& what) { lines.push_back("      " + what); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FptQuery query(double mu, double sigma, double theta) {
    FptQuery q;
    q.mu = mu;
    q.sigma = sigma;
    q.theta = theta;
    return q;
}

// ---- criteria ----

Outcome c1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double a = std_risk(0.2, 1.0);
    const double b = std_risk(0.5, 1.0);
    const double c = std_risk(0.5, 6.25);
    const double d = hedge_theta_for_std(0.5, a);
    const double dt = seconds_since(t0);
    // Quoted figures are 5-decimal roundings of sqrt(sigma^2 / (2 theta)); the tolerance
    // applies to the closed forms they round.
    auto row = [&](const char* name, double v, double exact, double quoted) {
        o.check(std::abs(v - exact) <= kC1Tol && std::abs(v - quoted) <= 0.5e-5,
                fmt("%s = %.10f (closed form %.10f, quoted %.5f)", name, v, exact, quoted));
    };
    row("std_risk(0.2, 1)", a, std::sqrt(0.02), 0.14142);
    row("std_risk(0.5, 1)", b, std::sqrt(0.125), 0.35355);
    row("std_risk(0.5, 6.25)", c, std::sqrt(0.02), 0.14142);
    o.check(std::abs(d - 6.25) <= kC1Tol, fmt("hedge_theta_for_std(0.5, std_risk(0.2, 1)) = %.10f (6.25)", d));
    o.check(dt < kC1BudgetSec, fmt("runtime %.3g ms < 1 ms", dt * 1e3));
    return o;
}

Outcome c2() {
    Outcome o;
    o.known_unattainable = true;
    const auto t0 = std::chrono::steady_clock::now();
    const double tau_a = 1.0 / expected_fpt(query(0.5, 0.5, 1.0));
    const double tau_b = 1.0 / expected_fpt(query(0.5, 0.2, 1.0));
    const double theta_lit = hedge_theta_for_ifpt(0.5, 0.5, 0.002, 1.0, 50.0);
    const double theta_base = hedge_theta_for_ifpt(0.5, 0.5, tau_b, 1.0, 50.0);
    const double dt = seconds_since(t0);

    o.check(std::abs(tau_a - 0.192) <= kC2TauTol, fmt("tau(0.5,0.5,1) = %.6f, target 0.192 +- 0.004", tau_a));
    o.check(std::abs(tau_b - 0.002) <= kC2LowTauRel * 0.002,
            fmt("tau(0.5,0.2,1) = %.7f, target 0.002 +- 10%% [unattainable: exact value is 0.0024411]", tau_b));
    o.check(std::abs(theta_lit - 8.6) <= kC2ThetaTol,
            fmt("hedge_theta_for_ifpt(0.5,0.5,0.002) = %.4f, target 8.6 +- 0.2 [unattainable: root is 8.8428]",
                theta_lit));
    o.check(dt < kC2BudgetSec, fmt("runtime %.3g s < 1 s", dt));
    o.note("consistent reading (reported, not substituted):");
    const bool trunc_ok = std::floor(tau_b * 1000.0) / 1000.0 == 0.002;
    o.note(fmt("%s tau(0.5,0.2,1) = %.7f truncates to 0.002 at three decimals", trunc_ok ? "ok  " : "FAIL", tau_b));
    const bool base_ok = std::abs(theta_base - 8.6) <= kC2ThetaTol;
    o.note(fmt("%s theta restoring tau(0.5,0.2,1) at sigma=0.5 is %.4f, within 8.6 +- 0.2", base_ok ? "ok  " : "FAIL",
               theta_base));
    return o;
}

Outcome c3() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double grid[6][3] = {{0.5, 0.5, 1}, {0.5, 0.2, 1}, {0.5, 0.5, 8.6},
                               {0.3, 0.5, 3}, {0.7, 0.3, 2}, {0.5, 0.4, 5}};
    for (const auto& g : grid) {
        const auto q = query(g[0], g[1], g[2]);
        const double quad = expected_fpt(q);
        McFptOptions opts;
        opts.dt = 1e-4;
        opts.n_paths = 10000;
        opts.t_max = 1e6;  // E[T] reaches 1.5e4 on this grid; keep censoring negligible
        opts.seed = 2024;
        const auto mc = mc_fpt_oracle(q, opts);
        const double z = (mc.estimate - quad) / mc.stderr_estimate;
        o.check(std::abs(z) <= kC3Sigmas && mc.censored_fraction == 0.0,
                fmt("(mu,sigma,theta)=(%.1f,%.1f,%.1f): quadrature %.6g, MC %.6g +- %.3g, z = %+.2f, censored %.3g",
                    g[0], g[1], g[2], quad, mc.estimate, mc.stderr_estimate, z, mc.censored_fraction));
    }
    const double dt = seconds_since(t0);
    o.check(dt < kC3BudgetSec, fmt("runtime %.1f s < 300 s", dt));
    return o;
}

Outcome c4() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto net = build_core_periphery(5, 50, 0.58);
    const double thetas[] = {1.0, 10.0, 25.0};
    const double periph_mean[] = {0.96, 0.81, 0.72};
    const double periph_std[] = {0.34, 0.14, 0.11};
    for (int k = 0; k < 3; ++k) {
        SimConfig c;
        c.n_paths = 20000;
        c.dt = 1e-3;
        c.theta_core = 1.0;
        c.theta_periphery = thetas[k];
        c.sigma_core = 0.2;
        c.sigma_periphery = 0.5;
        c.shocks.push_back({0.9, ShockTarget::Core, {}, -0.3});
        c.record_agents = {0, 5};
        c.record_stride = 1000;
        const auto ens = simulate_paths(net, c, DriverSpec::brownian());
        const auto core = ensemble_stats(ens, 1.0, 0);
        const auto per = ensemble_stats(ens, 1.0, 5);
        o.check(std::abs(per.mean - periph_mean[k]) <= kC4Tol,
                fmt("theta_P=%g periphery mean %.4f, target %.2f +- 0.03", thetas[k], per.mean, periph_mean[k]));
        o.check(core.mean >= 0.69 - kC4Tol && core.mean <= 0.70 + kC4Tol,
                fmt("theta_P=%g core mean %.4f, target 0.69-0.70 +- 0.03", thetas[k], core.mean));
        o.check(std::abs(per.std - periph_std[k]) <= kC4Tol,
                fmt("theta_P=%g periphery per-path std %.4f, target %.2f +- 0.03", thetas[k], per.std,
                    periph_std[k]));
    }
    const double dt = seconds_since(t0);
    o.check(dt < kC4BudgetSec, fmt("runtime %.1f s < 600 s", dt));
    return o;
}

Outcome c5() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto net = build_core_periphery(5, 50, 0.58);
    for (double theta_p : {1.0, 10.0}) {
        SimConfig c;
        c.sigma_core = c.sigma_periphery = 0.0;
        c.initial_core = 1.0;
        c.initial_periphery = 0.0;
        c.theta_periphery = theta_p;
        const auto ens = simulate_paths(net, c, DriverSpec::brownian());
        const Vector rho0 = tier_vector(net, 1.0, 0.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < ens.times().size(); ++k) {
            const Vector m = exact_mean(net, 1.0, theta_p, rho0, ens.times()[k]);
            for (std::size_t i = 0; i < net.size(); ++i)
                worst = std::max(worst, std::abs(ens.value(0, i, k) - m[static_cast<Eigen::Index>(i)]));
        }
        o.check(worst <= kC5MeanTol,
                fmt("sigma=0, rho0=(1 core, 0 periphery), theta_P=%g: sup |Euler - exact mean| over [0,1] = %.3g",
                    theta_p, worst));
    }

    // Stationary variance on the limit system, where agents are the scalar OU of the formula.
    SimConfig c;
    c.t_end = 20.0;
    c.dt = 1e-3;
    c.n_paths = 10000;
    c.sigma_core = 0.2;
    c.sigma_periphery = 0.5;
    c.theta_periphery = 1.0;
    c.seed = 5;
    c.record_stride = 20000;
    const auto ens = simulate_limit_paths(LimitSystem{1, 1, 0.58}, c, DriverSpec::brownian());
    const std::size_t ti = ens.time_index(20.0);
    const std::size_t slot = ens.agent_slot(1);
    double s1 = 0, s2 = 0;
    const double n = static_cast<double>(ens.n_paths());
    for (std::size_t p = 0; p < ens.n_paths(); ++p) s1 += ens.value(p, slot, ti);
    const double mean = s1 / n;
    double m4 = 0;
    for (std::size_t p = 0; p < ens.n_paths(); ++p) {
        const double d = ens.value(p, slot, ti) - mean;
        s2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = s2 / (n - 1);
    const double se = std::sqrt(std::max(0.0, m4 / n - (s2 / n) * (s2 / n)) / n);
    const double target = 0.5 * 0.5 / 2.0;
    o.check(std::abs(var - target) <= kC5Sigmas * se,
            fmt("limit-system periphery variance at t=20: %.5f, sigma_P^2/(2 theta_P) = %.5f, |diff| = %.2f se (se %.2g)",
                var, target, std::abs(var - target) / se, se));
    const double dt = seconds_since(t0);
    o.check(dt < kC5BudgetSec, fmt("runtime %.1f s < 300 s", dt));
    return o;
}

Outcome c6() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    SimConfig c;
    c.t_end = 1.0;
    c.dt = 1e-3;
    c.n_paths = 2000;
    c.sigma_core = 0.2;
    c.sigma_periphery = 0.5;
    c.seed = 0;
    const auto rep = convergence_scan({{5, 50}, {10, 100}, {20, 200}, {40, 400}}, 0.58, c, DriverSpec::brownian());
    for (const auto& p : rep.points)
        o.note(fmt("|C|=%zu |P|=%zu  core %.5f +- %.5f (scaled %.4f)  periphery %.5f +- %.5f (scaled %.4f)", p.n_core,
                   p.n_periphery, p.discrepancy.core, p.discrepancy.core_stderr, p.scaled_core,
                   p.discrepancy.periphery, p.discrepancy.periphery_stderr, p.scaled_periphery));
    for (std::size_t k = 1; k < rep.points.size(); ++k) {
        const auto& a = rep.points[k - 1].discrepancy;
        const auto& b = rep.points[k].discrepancy;
        const double sc = std::hypot(a.core_stderr, b.core_stderr);
        const double sp = std::hypot(a.periphery_stderr, b.periphery_stderr);
        o.check(b.core < a.core + kC6Sigmas * sc && b.periphery < a.periphery + kC6Sigmas * sp,
                fmt("unscaled discrepancy decreases from |C|=%zu to |C|=%zu (core %.5f -> %.5f, periphery %.5f -> %.5f)",
                    rep.points[k - 1].n_core, rep.points[k].n_core, a.core, b.core, a.periphery, b.periphery));
    }
    auto growth = [&](bool core) {
        double run_min = 1e300, worst = 0.0;
        for (const auto& p : rep.points) {
            const double v = core ? p.scaled_core : p.scaled_periphery;
            run_min = std::min(run_min, v);
            worst = std::max(worst, v / run_min);
        }
        return worst;
    };
    o.check(!rep.core_violation && growth(true) <= kC6Growth,
            fmt("sqrt(|C|)-scaled core discrepancy peak/running-min ratio %.3f <= 1.25", growth(true)));
    o.check(!rep.periphery_violation && growth(false) <= kC6Growth,
            fmt("sqrt(|C|)-scaled periphery discrepancy peak/running-min ratio %.3f <= 1.25", growth(false)));
    const double dt = seconds_since(t0);
    o.check(dt < kC6BudgetSec, fmt("runtime %.1f s < 900 s", dt));
    return o;
}

Outcome c7() {
    Outcome o;
    const LimitSystem sys{5, 50, 0.58};
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::size_t> pick(0, sys.size() - 1);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.push_back({0, 1});  // core-core
    pairs.push_back({0, 5});  // core-periphery
    pairs.push_back({5, 6});  // periphery-periphery
    while (pairs.size() < 10) {
        const std::size_t a = pick(gen), b = pick(gen);
        if (a != b) pairs.push_back({std::min(a, b), std::max(a, b)});
    }
    SimConfig c;
    c.n_paths = static_cast<std::size_t>(kC7Paths);
    c.sigma_core = 0.2;
    c.sigma_periphery = 0.5;
    c.seed = 11;
    c.record_stride = 1000;
    c.shocks.push_back({0.9, ShockTarget::Core, {}, -0.3});
    const auto ens = simulate_limit_paths(sys, c, DriverSpec::brownian());
    const std::size_t ti = ens.time_index(1.0);
    const double bound = 4.0 / std::sqrt(kC7Paths);
    for (auto [a, b] : pairs) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        const double n = static_cast<double>(ens.n_paths());
        for (std::size_t p = 0; p < ens.n_paths(); ++p) {
            const double x = ens.value(p, a, ti), y = ens.value(p, b, ti);
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
        const double cov = sab / n - (sa / n) * (sb / n);
        const double r = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) * (sbb / n - (sb / n) * (sb / n)));
        o.check(std::abs(r) < bound, fmt("agents (%zu,%zu): correlation %+.4f, |r| < %.2f", a, b, r, bound));
    }
    return o;
}

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(CPNET_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome c8() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "cpnet_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path table_ini = root / "table1.ini";
    const fs::path conv_ini = root / "converge.ini";
    std::ofstream(table_ini) << "[experiment]\nseed = 123\n[simulation]\npaths = 600\n[table1]\ntheta_periphery = 1, 10\n";
    std::ofstream(conv_ini) << "[experiment]\nseed = 123\n[simulation]\npaths = 300\n"
                               "[converge]\nsizes = 5:50, 10:100, 20:200\n";
    struct Run {
        const char* name;
        const char* threads;
    };
    const Run runs[] = {{"a1", "1"}, {"b1", "1"}, {"c4", "4"}};
    for (const auto& r : runs) {
        const fs::path out = root / r.name;
        o.check(run_cli("table1 " + table_ini.string() + " --threads " + r.threads + " --out " + out.string()) == 0 &&
                    run_cli("converge " + conv_ini.string() + " --threads " + r.threads + " --out " + out.string()) ==
                        0,
                fmt("run %s (%s thread(s)) completed", r.name, r.threads));
    }
    for (const char* file : {"table1.csv", "converge.csv"}) {
        const auto a = slurp(root / "a1" / file);
        const auto b = slurp(root / "b1" / file);
        const auto c = slurp(root / "c4" / file);
        o.check(!a.empty() && a == b, fmt("%s byte-identical across two 1-thread runs (%zu bytes)", file, a.size()));
        o.check(!a.empty() && a == c, fmt("%s byte-identical between 1 and 4 threads", file));
    }
    fs::remove_all(root);
    return o;
}

Outcome plot6() {
    Outcome o;
    std::vector<double> mus;
    for (int i = 1; i < 100; ++i) mus.push_back(i / 100.0);
    const auto cmp = compare_strategies(0.5, 0.2, 0.5, 1.0, mus);
    o.check(cmp.crossings.size() == 1,
            fmt("%zu crossing(s) in (0,1)%s", cmp.crossings.size(),
                cmp.crossings.empty() ? "" : fmt(", at mu = %.3f", cmp.crossings[0]).c_str()));
    bool lower_high = true, higher_low = true;
    for (const auto& p : cmp.points) {
        if (p.mu >= 0.5 - 1e-12) lower_high = lower_high && p.tau_hedged < p.tau_keep;
        if (p.mu <= 0.2 + 1e-12) higher_low = higher_low && p.tau_hedged > p.tau_keep;
    }
    o.check(lower_high, fmt("theta=%.4f strategy has lower IFPT risk for all mu >= 0.5", cmp.theta_hedged));
    o.check(higher_low, "theta-increased strategy has higher IFPT risk for all mu <= 0.2");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"C1", "standard-deviation risk identities", c1},
        {"C2", "first-passage quadrature against the quoted figures", c2},
        {"C3", "quadrature against the Monte Carlo first-passage oracle", c3},
        {"C4", "Table 1 regression at desk scale", c4},
        {"C5", "analytic moments against simulation", c5},
        {"C6", "propagation-of-chaos scaling", c6},
        {"C7", "limit-system independence", c7},
        {"C8", "determinism of table1 and converge outputs", c8},
        {"P6", "two-strategy IFPT curves cross once", plot6},
    };
    int unexpected = 0, failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double dt = seconds_since(t0);
        const char* tag = o.pass ? "PASS" : "FAIL";
        std::printf("%s %s %s (%.2f s)%s\n", tag, c.id, c.title, dt,
                    !o.pass && o.known_unattainable ? " [unattainable as stated, see decisions ledger]" : "");
        for (const auto& l : o.lines) std::printf("       %s\n", l.c_str());
        std::fflush(stdout);
        if (!o.pass) {
            ++failed;
            if (!o.known_unattainable) ++unexpected;
        }
    }
    std::printf("%d of %zu criteria failed; %d unexpected\n", failed, criteria.size(), unexpected);
    return unexpected == 0 ? 0 : 1;
}
