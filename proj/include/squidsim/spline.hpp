#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "squidsim/errors.hpp"
#include "squidsim/fd.hpp"

namespace squidsim {

namespace detail {

/// Cardinal B-spline N_d supported on (0, d+1), by the Cox-de Boor recursion.
inline double cardinal_bspline(int d, double t) {
    if (t <= 0.0 || t >= d + 1.0) return d == 0 && t == 0.0 ? 1.0 : 0.0;
    if (d == 0) return 1.0;
    return (t * cardinal_bspline(d - 1, t) + (d + 1.0 - t) * cardinal_bspline(d - 1, t - 1.0)) / d;
}

/// r-th derivative of N_d: alternating-binomial sum over N_{d-r}.
inline double cardinal_bspline_deriv(int d, double t, int r) {
    if (r == 0) return cardinal_bspline(d, t);
    double sum = 0.0;
    double binom = 1.0;
    for (int m = 0; m <= r; ++m) {
        sum += (m % 2 == 0 ? binom : -binom) * cardinal_bspline(d - r, t - m);
        binom = binom * (r - m) / (m + 1.0);
    }
    return sum;
}

} // namespace detail

/// Interpolating quintic spline on a uniform grid. The fit is a fifth-degree
/// B-spline series, C4-continuous, with end conditions taken from high-order
/// one-sided finite differences of the data. Derivatives up to third order
/// and exact segment integrals are available.
class QuinticSpline {
public:
    QuinticSpline() = default;

    QuinticSpline(double x0, double step, std::vector<double> values)
        : x0_(x0), h_(step), y_(std::move(values)) {
        const int n = static_cast<int>(y_.size());
        if (n < 7) throw Error("QuinticSpline: need at least 7 points");
        if (!(step > 0.0)) throw Error("QuinticSpline: step must be positive");

        // Unknowns c_k, k = -5..n-2 (column j = k+5). Rows: n interpolation
        // conditions plus clamped first/second derivatives at both ends.
        const int m = n + 4;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd rhs(m);

        for (int i = 0; i < n; ++i) {
            for (int k = i - 5; k <= i - 1; ++k)
                a(i, k + 5) = detail::cardinal_bspline(5, double(i - k));
            rhs(i) = y_[i];
        }

        std::vector<double> nodes(7);
        for (int i = 0; i < 7; ++i) nodes[i] = i;
        const auto w_lo = fd_weights(0.0, nodes, 2);
        const auto w_hi = fd_weights(6.0, nodes, 2);
        double d0 = 0, s0 = 0, d1 = 0, s1 = 0;
        for (int i = 0; i < 7; ++i) {
            d0 += w_lo[i][1] * y_[i];
            s0 += w_lo[i][2] * y_[i];
            d1 += w_hi[i][1] * y_[n - 7 + i];
            s1 += w_hi[i][2] * y_[n - 7 + i];
        }

        auto deriv_row = [&](int row, int at, int order, double value) {
            for (int k = at - 5; k <= at; ++k) {
                if (k > n - 2) continue;
                a(row, k + 5) = detail::cardinal_bspline_deriv(5, double(at - k), order);
            }
            rhs(row) = value;
        };
        deriv_row(n, 0, 1, d0);
        deriv_row(n + 1, 0, 2, s0);
        deriv_row(n + 2, n - 1, 1, d1);
        deriv_row(n + 3, n - 1, 2, s1);

        Eigen::VectorXd c = a.partialPivLu().solve(rhs);
        coef_.assign(c.data(), c.data() + m);

        // Antiderivative series: degree-6 coefficients are scaled prefix sums.
        anti_.resize(m + 1);
        anti_[0] = 0.0;
        for (int j = 0; j < m; ++j) anti_[j + 1] = anti_[j] + h_ * coef_[j];
    }

    [[nodiscard]] double x_min() const { return x0_; }
    [[nodiscard]] double x_max() const { return x0_ + h_ * (static_cast<double>(y_.size()) - 1); }
    [[nodiscard]] double step() const { return h_; }
    [[nodiscard]] std::size_t size() const { return y_.size(); }
    [[nodiscard]] double node_value(std::size_t i) const { return y_[i]; }

    double operator()(double x) const { return eval(x, 0); }

    /// Value (order 0) or derivative of order 1..3 at x.
    [[nodiscard]] double eval(double x, int order) const {
        if (order < 0 || order > 3) throw Error("QuinticSpline: derivative order must be 0..3");
        const double u = (x - x0_) / h_;
        const int n = static_cast<int>(y_.size());
        const int kf = static_cast<int>(std::floor(u));
        double sum = 0.0;
        for (int k = kf - 5; k <= kf; ++k) {
            if (k < -5 || k > n - 2) continue;
            sum += coef_[k + 5] * detail::cardinal_bspline_deriv(5, u - k, order);
        }
        double scale = 1.0;
        for (int r = 0; r < order; ++r) scale /= h_;
        return sum * scale;
    }

    /// Exact integral of the spline over [a, b].
    [[nodiscard]] double integral(double a, double b) const { return anti(b) - anti(a); }

private:
    [[nodiscard]] double anti(double x) const {
        const double u = (x - x0_) / h_;
        const int n = static_cast<int>(y_.size());
        const int kf = static_cast<int>(std::floor(u));
        double sum = 0.0;
        for (int k = kf - 6; k <= kf; ++k) {
            if (k < -6 || k > n - 2) continue;
            sum += anti_[k + 6] * detail::cardinal_bspline(6, u - k);
        }
        return sum;
    }

    double x0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> y_;
    std::vector<double> coef_;
    std::vector<double> anti_;
};

} // namespace squidsim
