#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace squidsim {

/// Deterministic random source. The standard distributions are
/// implementation-defined, so uniform and gaussian draws are generated
/// explicitly here to keep seeded output byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller, one cached value.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double gaussian(double sigma) { return sigma * gaussian(); }

    /// Complex gaussian with independent re/im parts of width sigma each.
    std::complex<double> complex_gaussian(double sigma) {
        const double re = gaussian(sigma);
        return {re, gaussian(sigma)};
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace squidsim
