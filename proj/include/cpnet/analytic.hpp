#pragma once

#include "cpnet/network.hpp"

#include <functional>

namespace cpnet {

/// exp(t*M) by scaling and squaring with a degree-13 Pade approximant.
Matrix matrix_exponential(const Matrix& m, double t = 1.0);

/// E[rho_t | rho_0] = exp(t Theta(A^w - I)) rho_0.
Vector exact_mean(const WeightedNetwork& net, double theta_core, double theta_periphery, const Vector& rho0,
                  double t);

/// Cov[rho_t, rho_t'] = int_0^min(t,t') exp((t-s)M) D exp((t'-s)M)^T ds with
/// M = Theta(A^w - I) and D = diag(sigma_i^2), by adaptive quadrature
/// (absolute tolerance 1e-8 per entry).
Matrix exact_covariance(const WeightedNetwork& net, double theta_core, double theta_periphery, double sigma_core,
                        double sigma_periphery, double t, double t_prime);

/// Second-order structure of the finite system from a fixed initial state.
struct OUMoments {
    Vector mean;
    Vector variance;
    std::function<Matrix(double, double)> covariance;
};

OUMoments ou_moments(const WeightedNetwork& net, double theta_core, double theta_periphery, double sigma_core,
                     double sigma_periphery, const Vector& rho0, double t);

/// Tier means of the limit system:
///   m_C' = theta_C eps (m_P - m_C),  m_P' = theta_P (m_C - m_P).
/// See docs/limit_mean_ode.md for the reduction of the integral equations.
struct TierMeans {
    double core;
    double periphery;
};
TierMeans limit_mean_ode(double theta_core, double theta_periphery, double epsilon, double m0_core,
                         double m0_periphery, double t);

/// Long-run common mean (theta_P m_C + theta_C eps m_P) / (theta_C eps + theta_P).
double limit_common_mean(double theta_core, double theta_periphery, double epsilon, double m0_core,
                         double m0_periphery);

struct LimitMoments {
    double variance;    // Var at t
    double covariance;  // Cov at (s, t)
};

/// Scalar OU moments of one limit-system agent of a tier with rate theta and volatility sigma.
LimitMoments limit_moments(double theta, double sigma, double t, double s);

struct StationaryModel {
    double mu;
    double var_core;
    double var_periphery;
};

StationaryModel stationary_model(double mu, double theta_core, double theta_periphery, double sigma_core,
                                 double sigma_periphery);

}  // namespace cpnet
