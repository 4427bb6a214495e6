#pragma once

#include <cstddef>
#include <vector>

namespace squidsim {

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
/// Returns w[i][k] such that f^(k)(z) ~ sum_i w[i][k] f(x[i]) for k = 0..m.
inline std::vector<std::vector<double>> fd_weights(double z, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = i < m ? i : m;
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Weights for the k-th derivative at z from the given nodes.
inline std::vector<double> fd_derivative_weights(double z, const std::vector<double>& x, int k) {
    auto all = fd_weights(z, x, k);
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = all[i][k];
    return w;
}

} // namespace squidsim
