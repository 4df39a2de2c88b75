#include "cpnet/risk.hpp"

#include "cpnet/csv.hpp"
#include "cpnet/error.hpp"
#include "cpnet/parallel.hpp"
#include "cpnet/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace cpnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// erfcx(x) = exp(x^2) erfc(x) for x >= 0.
double erfcx_nonneg(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic series; at x >= 25 the sixth term is below 1e-12 relative.
    const double inv = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -(2.0 * k - 1.0) * inv;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

std::string fmt(double v) { return csv::number(v); }

}  // namespace

double FptQuery::alpha() const { return sigma / std::sqrt(2.0 * theta); }

void FptQuery::validate() const {
    require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    require(std::isfinite(mu) && std::isfinite(start) && std::isfinite(barrier), "mu, start, barrier must be finite");
    require(start >= barrier, "start must not lie below the barrier");
}

std::string to_string(RiskMethod m) { return m == RiskMethod::Quadrature ? "quadrature" : "monte-carlo"; }

double mills_ratio(double y) {
    constexpr double half_pi_root = 1.2533141373155002512;  // sqrt(pi/2)
    if (y >= 0.0) return half_pi_root * erfcx_nonneg(y / std::numbers::sqrt2);
    const double half_sq = 0.5 * y * y;
    if (half_sq > 709.0) return kInf;
    // (1 - Phi(y))/phi(y) = 1/phi(y) - (1 - Phi(-y))/phi(-y); the difference stays >= sqrt(pi/2).
    return std::sqrt(2.0 * std::numbers::pi) * std::exp(half_sq) - half_pi_root * erfcx_nonneg(-y / std::numbers::sqrt2);
}

double std_risk(double sigma, double theta) {
    require(sigma > 0.0 && theta > 0.0, "sigma and theta must be positive");
    return std::sqrt(sigma * sigma / (2.0 * theta));
}

double hedge_theta_for_std(double sigma, double s_target) {
    require(sigma > 0.0 && s_target > 0.0, "sigma and target must be positive");
    return sigma * sigma / (2.0 * s_target * s_target);
}

FptValue expected_fpt_detail(const FptQuery& q, const DriverSpec& driver) {
    q.validate();
    driver.validate();
    if (!driver.is_gaussian())
        fail(ErrorKind::Unsupported, "closed-form first-passage time needs a Brownian driver; use the Monte Carlo oracle");
    FptValue out;
    if (q.start == q.barrier) return out;

    const double alpha = q.alpha();
    const double lo = (q.barrier - q.mu) / alpha;
    const double hi = (q.start - q.mu) / alpha;

    // Integrand ~ sqrt(2 pi) exp(y^2/2) for y << 0; estimate the magnitude in log space first.
    const double y_min = std::min(lo, 0.0);
    if (y_min < -1.0) {
        const double log_mag = 0.5 * y_min * y_min + std::log(std::sqrt(2.0 * std::numbers::pi) / -y_min) -
                               std::log(q.theta);
        if (log_mag > 700.0) {
            out.value = kInf;
            out.error_estimate = kInf;
            out.diagnostics.push_back("expected first-passage time exceeds the double range (log E[T] ~ " +
                                      fmt(log_mag) + "); returning +inf");
            return out;
        }
    }

    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [](double y) { return mills_ratio(y); }, lo, hi, 30, 1e-12, &err);
    out.value = integral / q.theta;
    out.error_estimate = err / q.theta;
    if (!(err <= 1e-8 * std::abs(integral)))
        out.diagnostics.push_back("quadrature error estimate " + fmt(err) + " above relative 1e-8");
    return out;
}

double expected_fpt(const FptQuery& q) { return expected_fpt_detail(q).value; }

RiskReport risk_report(const FptQuery& q) {
    const auto v = expected_fpt_detail(q);
    RiskReport r;
    r.query = q;
    r.std_risk = std_risk(q.sigma, q.theta);
    r.expected_fpt = v.value;
    r.ifpt_risk = 1.0 / v.value;
    r.error_estimate = v.error_estimate;
    r.method = RiskMethod::Quadrature;
    r.diagnostics = v.diagnostics;
    return r;
}

RiskReport risk_report(const FptQuery& q, const McFptResult& mc) {
    RiskReport r;
    r.query = q;
    r.std_risk = std_risk(q.sigma, q.theta);
    r.expected_fpt = mc.estimate;
    r.ifpt_risk = 1.0 / mc.estimate;
    r.error_estimate = mc.stderr_estimate;
    r.method = RiskMethod::MonteCarlo;
    r.diagnostics = mc.warnings;
    return r;
}

McFptResult mc_fpt_oracle(const FptQuery& q, const McFptOptions& opts) {
    q.validate();
    opts.driver.validate();
    require(opts.dt > 0.0 && std::isfinite(opts.dt), "dt must be positive");
    require(opts.n_paths >= 1, "n_paths must be at least 1");
    require(opts.t_max > 0.0 && std::isfinite(opts.t_max), "t_max must be positive");

    McFptResult res;
    res.n_paths = opts.n_paths;
    if (q.start <= q.barrier) return res;

    const double theta = q.theta, sigma = q.sigma, mu = q.mu, barrier = q.barrier;
    const double max_step = opts.max_step > 0.0 ? opts.max_step : 0.5 / theta;
    const double var_rate = sigma * sigma;
    constexpr double kStepFactor = 1.0 / 20.0;  // h ~ d^2/(20 sigma^2): in-step crossing odds ~ e^-40 far out

    double brownian_share = 1.0;
    if (opts.driver.kind == DriverKind::CompoundPoisson) brownian_share = 0.0;
    if (opts.driver.kind == DriverKind::BrownianPlusJumps)
        brownian_share = 1.0 - opts.driver.jump_intensity * opts.driver.jump_size_scale * opts.driver.jump_size_scale;
    const bool exact = opts.driver.is_gaussian();
    const IncrementSampler sampler(opts.driver, opts.dt);

    std::vector<double> times(opts.n_paths);
    std::vector<char> censored(opts.n_paths, 0);

    parallel_for(opts.n_paths, opts.threads, [&](std::size_t p) {
        rng::Stream stream(opts.seed, p, 0, rng::Domain::FirstPassage);
        double x = q.start;
        double t = 0.0;
        for (;;) {
            const double d = x - barrier;
            double h = exact ? std::clamp(kStepFactor * d * d / var_rate, opts.dt, max_step) : opts.dt;
            bool last = false;
            if (t + h >= opts.t_max) {
                h = opts.t_max - t;
                last = true;
            }
            double x1;
            if (exact) {
                const double decay = std::exp(-theta * h);
                const double sd = sigma * std::sqrt(-std::expm1(-2.0 * theta * h) / (2.0 * theta));
                x1 = mu + (x - mu) * decay + sd * stream.normal();
            } else {
                x1 = x + theta * (mu - x) * h + sigma * sampler(stream);
            }
            bool crossed = x1 <= barrier;
            if (!crossed && brownian_share > 0.0) {
                const double expo = 2.0 * d * (x1 - barrier) / (var_rate * brownian_share * h);
                if (expo < 700.0 && stream.uniform() < std::exp(-expo)) crossed = true;
            }
            t += h;
            x = x1;
            if (crossed) break;
            if (last) {
                censored[p] = 1;
                t = opts.t_max;
                break;
            }
        }
        times[p] = t;
    });

    double sum = 0.0;
    std::size_t n_cens = 0;
    for (std::size_t p = 0; p < opts.n_paths; ++p) {
        sum += times[p];
        n_cens += static_cast<std::size_t>(censored[p]);
    }
    const double n = static_cast<double>(opts.n_paths);
    res.estimate = sum / n;
    if (opts.n_paths >= 2) {
        double ss = 0.0;
        for (double v : times) ss += (v - res.estimate) * (v - res.estimate);
        res.stderr_estimate = std::sqrt(ss / (n - 1.0) / n);
    }
    res.censored_fraction = static_cast<double>(n_cens) / n;
    if (res.censored_fraction > 0.10)
        res.warnings.push_back("censored fraction " + fmt(res.censored_fraction) +
                               " exceeds 10%; estimate is biased low, raise t_max");
    else if (res.censored_fraction > 0.01)
        res.warnings.push_back("censored fraction " + fmt(res.censored_fraction) + " exceeds 1%; estimate is biased low");
    if (!exact) res.warnings.push_back("jump driver: Euler scheme with fixed dt");
    return res;
}

double hedge_theta_for_ifpt(double mu, double sigma, double tau_target, double theta_lo, double theta_hi,
                            double start, double barrier) {
    require(tau_target > 0.0 && std::isfinite(tau_target), "target IFPT risk must be positive");
    require(theta_lo > 0.0 && theta_hi > theta_lo, "bracket must satisfy 0 < theta_lo < theta_hi");
    auto f = [&](double theta) {
        FptQuery q{mu, sigma, theta, start, barrier};
        return 1.0 / expected_fpt(q) - tau_target;
    };
    const double f_lo = f(theta_lo);
    const double f_hi = f(theta_hi);
    if (f_lo == 0.0) return theta_lo;
    if (f_hi == 0.0) return theta_hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        fail(ErrorKind::NoBracket,
             "IFPT risk minus target has no sign change on [" + fmt(theta_lo) + ", " + fmt(theta_hi) +
                 "] (values " + fmt(f_lo + tau_target) + " and " + fmt(f_hi + tau_target) +
                 "); tau(theta) need not be monotone, and for mu near the barrier it increases with theta");
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, theta_lo, theta_hi, f_lo, f_hi,
                                                          boost::math::tools::eps_tolerance<double>(40), max_iter);
    return 0.5 * (a + b);
}

std::vector<ThetaCurvePoint> ifpt_vs_theta(const std::vector<double>& mus, double sigma,
                                           const std::vector<double>& thetas) {
    std::vector<ThetaCurvePoint> out;
    for (double mu : mus)
        for (double th : thetas) out.push_back({mu, th, 1.0 / expected_fpt({mu, sigma, th})});
    return out;
}

StrategyComparison compare_strategies(double mu_reference, double sigma_before, double sigma_after,
                                      double theta_before, const std::vector<double>& mus, double theta_lo,
                                      double theta_hi) {
    StrategyComparison c;
    c.theta_keep = theta_before;
    c.tau_reference = 1.0 / expected_fpt({mu_reference, sigma_before, theta_before});
    c.theta_hedged = hedge_theta_for_ifpt(mu_reference, sigma_after, c.tau_reference, theta_lo, theta_hi);
    for (double mu : mus) {
        c.points.push_back({mu, 1.0 / expected_fpt({mu, sigma_after, c.theta_keep}),
                            1.0 / expected_fpt({mu, sigma_after, c.theta_hedged})});
    }
    for (std::size_t k = 1; k < c.points.size(); ++k) {
        const auto& a = c.points[k - 1];
        const auto& b = c.points[k];
        const double da = a.tau_hedged - a.tau_keep;
        const double db = b.tau_hedged - b.tau_keep;
        if (da == 0.0) c.crossings.push_back(a.mu);
        else if ((da > 0.0) != (db > 0.0) && db != 0.0) c.crossings.push_back(a.mu + (b.mu - a.mu) * da / (da - db));
    }
    if (!c.points.empty() && c.points.back().tau_hedged == c.points.back().tau_keep)
        c.crossings.push_back(c.points.back().mu);
    return c;
}

void write_risk_csv_header(std::ostream& out) {
    out << "mu,sigma,theta,start,barrier,std_risk,expected_fpt,ifpt_risk,error_estimate,method\n";
}

void write_risk_csv_row(std::ostream& out, const RiskReport& r) {
    const auto& q = r.query;
    out << csv::number(q.mu) << ',' << csv::number(q.sigma) << ',' << csv::number(q.theta) << ','
        << csv::number(q.start) << ',' << csv::number(q.barrier) << ',' << csv::number(r.std_risk) << ','
        << csv::number(r.expected_fpt) << ',' << csv::number(r.ifpt_risk) << ',' << csv::number(r.error_estimate)
        << ',' << csv::field(to_string(r.method)) << '\n';
}

}  // namespace cpnet
