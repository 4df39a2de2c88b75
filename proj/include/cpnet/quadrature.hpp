#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace cpnet::quadrature {

/// Result of a matrix-valued integral together with the summed error estimate
/// (max-norm over entries).
struct MatrixIntegral {
    Eigen::MatrixXd value;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {
// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 abscissae).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b;
    Eigen::MatrixXd value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Eigen::MatrixXd fc = f(c);
    Eigen::MatrixXd kron = kWgk[7] * fc;
    Eigen::MatrixXd gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        Eigen::MatrixXd pair = f(c - dx) + f(c + dx);
        kron += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kron *= h;
    gauss *= h;
    const double err = (kron - gauss).cwiseAbs().maxCoeff();
    return {a, b, std::move(kron), err};
}
}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a matrix-valued function,
/// bisecting the interval with the largest error until the summed error estimate
/// falls below abs_tol or max_intervals is reached.
template <class F>
MatrixIntegral integrate_matrix(F&& f, double a, double b, double abs_tol, int max_intervals = 2000) {
    std::priority_queue<detail::Piece> heap;
    heap.push(detail::gk15(f, a, b));
    double total_err = heap.top().error;
    int intervals = 1;
    while (total_err > abs_tol && intervals < max_intervals) {
        detail::Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
    }
    MatrixIntegral out;
    out.value = Eigen::MatrixXd::Zero(heap.top().value.rows(), heap.top().value.cols());
    // Sum in interval order so the result does not depend on heap layout.
    std::vector<detail::Piece> pieces;
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    out.error = 0.0;
    for (const auto& p : pieces) {
        out.value += p.value;
        out.error += p.error;
    }
    out.intervals = intervals;
    return out;
}

}  // namespace cpnet::quadrature
