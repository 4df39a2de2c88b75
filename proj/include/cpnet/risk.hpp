#pragma once

#include "cpnet/driver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cpnet {

/// First passage of the stationary scalar OU dX = theta (mu - X) dt + sigma dL from
/// `start` down to `barrier`.
struct FptQuery {
    double mu = 0.5;
    double sigma = 0.5;
    double theta = 1.0;
    double start = 1.0;
    double barrier = 0.0;

    double alpha() const;  // sigma / sqrt(2 theta)
    void validate() const;
};

enum class RiskMethod { Quadrature, MonteCarlo };
std::string to_string(RiskMethod m);

struct RiskReport {
    FptQuery query;
    double std_risk = 0.0;
    double expected_fpt = 0.0;
    double ifpt_risk = 0.0;         // exactly 1 / expected_fpt
    double error_estimate = 0.0;    // quadrature error or Monte Carlo standard error
    RiskMethod method = RiskMethod::Quadrature;
    std::vector<std::string> diagnostics;
};

/// Mills ratio (1 - Phi(y)) / phi(y), evaluated without overflow or cancellation
/// for moderate |y|; +inf once 1/phi(y) exceeds the double range.
double mills_ratio(double y);

/// Standard deviation risk sqrt(sigma^2 / (2 theta)).
double std_risk(double sigma, double theta);

/// Inverse: theta such that std_risk(sigma, theta) == s_target.
double hedge_theta_for_std(double sigma, double s_target);

struct FptValue {
    double value = 0.0;
    double error_estimate = 0.0;
    std::vector<std::string> diagnostics;
};

/// E[T] = (1/theta) * integral of the Mills ratio between (barrier-mu)/alpha and
/// (start-mu)/alpha, relative tolerance 1e-8. Returns +inf with a diagnostic when
/// the value exceeds the double range. Only Gaussian drivers are accepted.
FptValue expected_fpt_detail(const FptQuery& q, const DriverSpec& driver = DriverSpec::brownian());
double expected_fpt(const FptQuery& q);

RiskReport risk_report(const FptQuery& q);

struct McFptOptions {
    double dt = 1e-4;           // finest step, used near the barrier
    std::size_t n_paths = 10000;
    double t_max = 1e4;         // censoring horizon
    std::uint64_t seed = 0;
    unsigned threads = 0;
    double max_step = 0.0;      // 0 selects 0.5 / theta
    DriverSpec driver = DriverSpec::brownian();
};

struct McFptResult {
    double estimate = 0.0;
    double stderr_estimate = 0.0;
    double censored_fraction = 0.0;
    std::size_t n_paths = 0;
    std::vector<std::string> warnings;
};

/// Monte Carlo first-passage oracle. Brownian driver: exact Gaussian OU transitions
/// with an adaptive step (never below dt near the barrier) and a Brownian-bridge
/// crossing test inside each step. Other drivers: Euler steps of size dt with the
/// bridge test applied to the Brownian share of the variance.
McFptResult mc_fpt_oracle(const FptQuery& q, const McFptOptions& opts);

RiskReport risk_report(const FptQuery& q, const McFptResult& mc);

/// Root of theta -> 1/E[T](mu, sigma, theta) - tau_target inside [theta_lo, theta_hi],
/// relative accuracy 1e-6 or better. Throws ErrorKind::NoBracket when the bracket
/// shows no sign change.
double hedge_theta_for_ifpt(double mu, double sigma, double tau_target, double theta_lo, double theta_hi,
                            double start = 1.0, double barrier = 0.0);

struct ThetaCurvePoint {
    double mu;
    double theta;
    double tau;
};

/// IFPT risk as a function of theta for each mu.
std::vector<ThetaCurvePoint> ifpt_vs_theta(const std::vector<double>& mus, double sigma,
                                           const std::vector<double>& thetas);

struct StrategyCurvePoint {
    double mu;
    double tau_keep;    // theta unchanged
    double tau_hedged;  // theta raised to restore the reference IFPT risk
};

struct StrategyComparison {
    double theta_keep;
    double theta_hedged;
    double tau_reference;
    std::vector<StrategyCurvePoint> points;
    std::vector<double> crossings;  // mu values where the two curves cross (linear interpolation)
};

/// Two strategies after volatility moves sigma_before -> sigma_after: keep theta_before,
/// or raise theta so the IFPT risk at mu_reference equals its pre-move value.
StrategyComparison compare_strategies(double mu_reference, double sigma_before, double sigma_after,
                                      double theta_before, const std::vector<double>& mus, double theta_lo = 1.0,
                                      double theta_hi = 50.0);

/// Columns: mu,sigma,theta,start,barrier,std_risk,expected_fpt,ifpt_risk,error_estimate,method
void write_risk_csv_header(std::ostream& out);
void write_risk_csv_row(std::ostream& out, const RiskReport& r);

}  // namespace cpnet
