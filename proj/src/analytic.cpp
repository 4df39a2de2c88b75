#include "cpnet/analytic.hpp"

#include "cpnet/error.hpp"
#include "cpnet/quadrature.hpp"

#include <Eigen/LU>

#include <cmath>

namespace cpnet {

Matrix matrix_exponential(const Matrix& m, double t) {
    require(m.rows() == m.cols(), "matrix exponential needs a square matrix");
    require(m.allFinite() && std::isfinite(t), "matrix exponential needs finite entries");
    const auto n = m.rows();
    const Matrix ident = Matrix::Identity(n, n);
    if (n == 0 || t == 0.0) return ident;

    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    Matrix a = t * m;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
        a /= std::ldexp(1.0, squarings);
    }
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
    const Matrix u = a * u_inner;
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

Vector exact_mean(const WeightedNetwork& net, double theta_core, double theta_periphery, const Vector& rho0,
                  double t) {
    require(t >= 0.0, "time must be nonnegative");
    require(static_cast<std::size_t>(rho0.size()) == net.size(), "initial vector has wrong length");
    return matrix_exponential(drift_matrix(net, theta_core, theta_periphery), t) * rho0;
}

Matrix exact_covariance(const WeightedNetwork& net, double theta_core, double theta_periphery, double sigma_core,
                        double sigma_periphery, double t, double t_prime) {
    require(t >= 0.0 && t_prime >= 0.0, "times must be nonnegative");
    require(sigma_core >= 0.0 && sigma_periphery >= 0.0, "volatilities must be nonnegative");
    const auto n = static_cast<Eigen::Index>(net.size());
    const double upper = std::min(t, t_prime);
    if (upper == 0.0) return Matrix::Zero(n, n);

    const Matrix drift = drift_matrix(net, theta_core, theta_periphery);
    const Vector var = tier_vector(net, sigma_core * sigma_core, sigma_periphery * sigma_periphery);
    auto integrand = [&](double s) -> Matrix {
        const Matrix left = matrix_exponential(drift, t - s);
        const Matrix right = (t == t_prime) ? left : matrix_exponential(drift, t_prime - s);
        return left * var.asDiagonal() * right.transpose();
    };
    auto res = quadrature::integrate_matrix(integrand, 0.0, upper, 1e-8);
    if (res.error > 1e-8)
        fail(ErrorKind::Numeric, "covariance quadrature did not reach 1e-8 (estimate " + std::to_string(res.error) + ")");
    return res.value;
}

OUMoments ou_moments(const WeightedNetwork& net, double theta_core, double theta_periphery, double sigma_core,
                     double sigma_periphery, const Vector& rho0, double t) {
    OUMoments out;
    out.mean = exact_mean(net, theta_core, theta_periphery, rho0, t);
    out.variance = exact_covariance(net, theta_core, theta_periphery, sigma_core, sigma_periphery, t, t).diagonal();
    out.covariance = [net, theta_core, theta_periphery, sigma_core, sigma_periphery](double a, double b) {
        return exact_covariance(net, theta_core, theta_periphery, sigma_core, sigma_periphery, a, b);
    };
    return out;
}

double limit_common_mean(double theta_core, double theta_periphery, double epsilon, double m0_core,
                         double m0_periphery) {
    const double core_rate = theta_core * epsilon;
    return (theta_periphery * m0_core + core_rate * m0_periphery) / (core_rate + theta_periphery);
}

TierMeans limit_mean_ode(double theta_core, double theta_periphery, double epsilon, double m0_core,
                         double m0_periphery, double t) {
    require(t >= 0.0, "time must be nonnegative");
    require(theta_core > 0.0 && theta_periphery > 0.0, "friction rates must be positive");
    require(epsilon >= 0.0 && epsilon < 1.0, "epsilon must lie in [0,1)");
    // The generator [[-a, a], [b, -b]] (a = theta_C eps, b = theta_P) has eigenvalues 0 and
    // -(a+b): the weighted mean is conserved and the gap m_C - m_P decays at rate a+b.
    const double a = theta_core * epsilon;
    const double b = theta_periphery;
    const double rate = a + b;
    const double limit = (b * m0_core + a * m0_periphery) / rate;
    const double gap = (m0_core - m0_periphery) * std::exp(-rate * t);
    return {limit + (a / rate) * gap, limit - (b / rate) * gap};
}

LimitMoments limit_moments(double theta, double sigma, double t, double s) {
    require(theta > 0.0 && sigma >= 0.0, "theta must be positive and sigma nonnegative");
    require(t >= 0.0 && s >= 0.0, "times must be nonnegative");
    const double scale = sigma * sigma / (2.0 * theta);
    return {scale * -std::expm1(-2.0 * theta * t),
            scale * (std::exp(-theta * std::abs(s - t)) - std::exp(-theta * (s + t)))};
}

StationaryModel stationary_model(double mu, double theta_core, double theta_periphery, double sigma_core,
                                 double sigma_periphery) {
    require(theta_core > 0.0 && theta_periphery > 0.0, "friction rates must be positive");
    require(sigma_core > 0.0 && sigma_periphery > 0.0, "volatilities must be positive");
    require(std::isfinite(mu), "mu must be finite");
    return {mu, sigma_core * sigma_core / (2.0 * theta_core), sigma_periphery * sigma_periphery / (2.0 * theta_periphery)};
}

}  // namespace cpnet
