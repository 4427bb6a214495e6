#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "squidsim/constants.hpp"
#include "squidsim/errors.hpp"
#include "squidsim/spline.hpp"

namespace squidsim {

// ============================================================================
// Homogeneous constriction
// ============================================================================

/// Parameters of a homogeneous constriction: ideal junction in series with a
/// linear inductance, I = I0 sin(delta_c - 2 pi L_lin I / Phi_0).
struct HomogeneousCprParams {
    double i0 = 0.0;    // critical current [A]
    double l_lin = 0.0; // linear series inductance [H]

    void validate() const {
        if (!std::isfinite(i0) || !std::isfinite(l_lin)) throw NonFinite("homogeneous CPR parameters");
        if (!(i0 > 0.0)) throw Error("homogeneous CPR: I0 must be positive");
        if (l_lin < 0.0) throw Error("homogeneous CPR: L_lin must be non-negative");
    }

    /// Ratio L_lin / L_J0; the CPR becomes multi-valued for values above 1.
    [[nodiscard]] double beta() const { return l_lin * i0 / phi0_over_2pi; }
};

namespace detail {

// Solve delta_J + beta sin(delta_J) = d on the monotone piece [0, dj_max].
inline double solve_josephson_phase(double beta, double d, double dj_max) {
    double lo = 0.0, hi = dj_max;
    double x = std::min(d, dj_max);
    for (int it = 0; it < 200; ++it) {
        const double f = x + beta * std::sin(x) - d;
        if (std::abs(f) < 1e-15 * (1.0 + std::abs(d))) break;
        (f > 0.0 ? hi : lo) = x;
        const double fp = 1.0 + beta * std::cos(x);
        double step = fp > 1e-12 ? -f / fp : 0.0;
        double next = x + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

} // namespace detail

/// Phase delta_c at which continuation from zero terminates (the CPR fold),
/// or nothing when the CPR is single-valued (L_lin <= L_J0).
inline std::optional<double> homogeneous_fold_phase(const HomogeneousCprParams& p) {
    p.validate();
    const double beta = p.beta();
    if (beta <= 1.0) return std::nullopt;
    const double dj = std::acos(-1.0 / beta);
    return dj + beta * std::sin(dj);
}

/// Current through a homogeneous constriction at total phase delta_c, on the
/// branch continuously connected to I(0) = 0.
inline double cpr_homogeneous(const HomogeneousCprParams& p, double delta_c) {
    p.validate();
    if (!std::isfinite(delta_c)) throw NonFinite("cpr_homogeneous: delta_c");
    const double beta = p.beta();
    const double d = std::abs(delta_c);
    const double sign = delta_c < 0.0 ? -1.0 : 1.0;

    double dj_max = 1e9; // unbounded branch for beta <= 1
    if (beta > 1.0) {
        dj_max = std::acos(-1.0 / beta);
        const double fold = dj_max + beta * std::sin(dj_max);
        if (d > fold) throw NoSolutionOnBranch("cpr_homogeneous: fold reached before requested phase");
    }
    const double dj = detail::solve_josephson_phase(beta, d, std::min(dj_max, d + beta + 1.0));
    return sign * p.i0 * std::sin(dj);
}

// ============================================================================
// Inhomogeneous (diode) constriction model
// ============================================================================

/// Normalized parameters of the inhomogeneous constriction. The critical
/// current density falls linearly with height (epsilon), the flux per height
/// grows linearly (b), delta_b is the in-plane flux phase across the full
/// height and delta_ell the specific linear-inductance phase scale.
struct DiodeModelParams {
    double i00 = 0.0;     // w a j0(0), full cross-section current scale [A]
    double epsilon = 0.0; // in [0, 1]
    double b = 0.0;       // in [0, 1]
    double delta_b = 0.0; // 2 pi B l_eff(0) a / Phi0, either sign
    double delta_ell = 0.0;

    void validate() const {
        if (!std::isfinite(i00) || !std::isfinite(epsilon) || !std::isfinite(b) ||
            !std::isfinite(delta_b) || !std::isfinite(delta_ell))
            throw NonFinite("diode model parameters");
        if (!(i00 > 0.0)) throw Error("diode model: I00 must be positive");
        if (epsilon < 0.0 || epsilon > 1.0) throw Error("diode model: epsilon outside [0, 1]");
        if (b < 0.0 || b > 1.0) throw Error("diode model: b outside [0, 1]");
        if (delta_ell < 0.0) throw Error("diode model: delta_ell must be non-negative");
    }
};

/// delta_ell equivalent to a given linear inductance at current scale I00.
inline double delta_ell_of_inductance(double l_lin, double i00) {
    return l_lin * i00 / phi0_over_2pi;
}

struct ScanConfig {
    double z_step = 0.01;
    double delta_step = 0.05;
    double z_overscan = 0.02;      // beyond +-1/2
    double delta_overscan = 0.15;  // beyond +-pi
    double track_tol = 0.01;       // discard threshold against predicted root
    double root_accept = 1e-10;    // residual bound for an accepted root
    double root_target = 1e-13;

    void validate() const {
        if (!(z_step > 0.0) || !(delta_step > 0.0)) throw Error("scan: steps must be positive");
        const double nc = 0.5 / z_step;
        if (std::abs(nc - std::round(nc)) > 1e-9) throw Error("scan: z_step must divide 1/2 evenly");
    }

    bool operator<(const ScanConfig& o) const {
        return std::tie(z_step, delta_step, z_overscan, delta_overscan, track_tol, root_accept, root_target) <
               std::tie(o.z_step, o.delta_step, o.z_overscan, o.delta_overscan, o.track_tol, o.root_accept,
                        o.root_target);
    }
};

/// Sampled normalized current density j(z, delta0) with its defined-mask.
/// Mask entries are false wherever root tracking was discarded.
struct CurrentDensityField {
    std::vector<double> z_grid;
    std::vector<double> delta0_grid;
    std::vector<double> j;            // row-major [iz * nd + id]
    std::vector<std::uint8_t> defined;
    std::size_t nz = 0, nd = 0;
    std::size_t iz0 = 0, id0 = 0; // indices of z = 0 and delta0 = 0
    std::size_t core_half = 0;    // node count from z = 0 to z = 1/2

    [[nodiscard]] double value(std::size_t iz, std::size_t id) const { return j[iz * nd + id]; }
    [[nodiscard]] bool is_defined(std::size_t iz, std::size_t id) const { return defined[iz * nd + id] != 0; }
};

namespace detail {

struct DensityEq {
    double epsilon, b, delta_b, delta_ell;

    [[nodiscard]] double amp(double z) const { return 1.0 - 2.0 * epsilon * z; }
    [[nodiscard]] double arg0(double z, double d0) const { return d0 + delta_b * (1.0 + b * z) * z; }

    [[nodiscard]] double residual(double z, double d0, double j) const {
        return amp(z) * std::sin(arg0(z, d0) - delta_ell * j) - j;
    }
    [[nodiscard]] double residual_dj(double z, double d0, double j) const {
        return -delta_ell * amp(z) * std::cos(arg0(z, d0) - delta_ell * j) - 1.0;
    }
    // Implicit-function gradients of the tracked root.
    [[nodiscard]] double dj_dz(double z, double d0, double j) const {
        const double a = amp(z);
        const double th = arg0(z, d0) - delta_ell * j;
        const double den = 1.0 + delta_ell * a * std::cos(th);
        return (-2.0 * epsilon * std::sin(th) + a * std::cos(th) * delta_b * (1.0 + 2.0 * b * z)) / den;
    }
    [[nodiscard]] double dj_dd0(double z, double d0, double j) const {
        const double a = amp(z);
        const double th = arg0(z, d0) - delta_ell * j;
        const double den = 1.0 + delta_ell * a * std::cos(th);
        return a * std::cos(th) / den;
    }
};

// Newton within a bracket of width 4 around the prediction, with a
// sign-change bisection fallback near the predicted value.
inline std::optional<double> track_root(const DensityEq& eq, double z, double d0, double pred,
                                        const ScanConfig& cfg) {
    if (!std::isfinite(pred)) return std::nullopt;
    const double lo = pred - 2.0, hi = pred + 2.0;
    double x = pred;
    for (int it = 0; it < 40; ++it) {
        const double f = eq.residual(z, d0, x);
        if (std::abs(f) < cfg.root_target) return x;
        const double fp = eq.residual_dj(z, d0, x);
        if (std::abs(fp) < 1e-14) break;
        double dx = -f / fp;
        dx = std::clamp(dx, -0.5, 0.5);
        x = std::clamp(x + dx, lo, hi);
    }
    if (std::abs(eq.residual(z, d0, x)) < cfg.root_accept) return x;

    // Fallback: nearest sign change around the prediction, then bisection.
    const double scan = 0.02;
    double a = pred, fa = eq.residual(z, d0, a);
    for (int k = 1; k <= 100; ++k) {
        for (const double side : {pred + k * scan, pred - k * scan}) {
            const double fb = eq.residual(z, d0, side);
            const double base = side > pred ? side - scan : side + scan;
            const double fbase = eq.residual(z, d0, base);
            if (std::isfinite(fb) && fbase * fb <= 0.0) {
                double xa = std::min(base, side), xb = std::max(base, side);
                double f_xa = eq.residual(z, d0, xa);
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (xa + xb);
                    const double fm = eq.residual(z, d0, mid);
                    if (std::abs(fm) < cfg.root_target) return mid;
                    if (f_xa * fm <= 0.0) {
                        xb = mid;
                    } else {
                        xa = mid;
                        f_xa = fm;
                    }
                }
                const double mid = 0.5 * (xa + xb);
                if (std::abs(eq.residual(z, d0, mid)) < cfg.root_accept) return mid;
            }
        }
    }
    (void)fa;
    return std::nullopt;
}

} // namespace detail

/// Trace the implicit current density over the (z, delta0) plane, seeded at
/// the trivial root j(0, 0) = 0. Along each march direction, a root is kept
/// only if it lands within track_tol of the gradient-based prediction; the
/// remainder of the row is discarded after the first failure.
inline CurrentDensityField scan_current_density(const DiodeModelParams& p, const ScanConfig& cfg = {}) {
    p.validate();
    cfg.validate();
    const detail::DensityEq eq{p.epsilon, p.b, p.delta_b, p.delta_ell};

    const long nzh = std::llround((0.5 + cfg.z_overscan) / cfg.z_step);
    const long ndh = static_cast<long>(std::ceil((3.14159265358979323846 + cfg.delta_overscan) / cfg.delta_step));

    CurrentDensityField f;
    f.nz = static_cast<std::size_t>(2 * nzh + 1);
    f.nd = static_cast<std::size_t>(2 * ndh + 1);
    f.iz0 = static_cast<std::size_t>(nzh);
    f.id0 = static_cast<std::size_t>(ndh);
    f.core_half = static_cast<std::size_t>(std::llround(0.5 / cfg.z_step));
    f.z_grid.resize(f.nz);
    f.delta0_grid.resize(f.nd);
    for (std::size_t i = 0; i < f.nz; ++i) f.z_grid[i] = (static_cast<double>(i) - nzh) * cfg.z_step;
    for (std::size_t i = 0; i < f.nd; ++i) f.delta0_grid[i] = (static_cast<double>(i) - ndh) * cfg.delta_step;
    f.j.assign(f.nz * f.nd, 0.0);
    f.defined.assign(f.nz * f.nd, 0);

    if (std::abs(eq.residual(0.0, 0.0, 0.0)) > cfg.root_accept)
        throw SeedFailure("scan_current_density: trivial seed root failed verification");
    f.j[f.iz0 * f.nd + f.id0] = 0.0;
    f.defined[f.iz0 * f.nd + f.id0] = 1;

    // Heun predictor along one axis, then the tracked Newton solve.
    auto march = [&](std::size_t iz_from, std::size_t id_from, int dz_step, int dd_step) {
        std::size_t iz = iz_from, id = id_from;
        double z = f.z_grid[iz], d0 = f.delta0_grid[id];
        double jv = f.j[iz * f.nd + id];
        while (true) {
            const long niz = static_cast<long>(iz) + dz_step;
            const long nid = static_cast<long>(id) + dd_step;
            if (niz < 0 || niz >= static_cast<long>(f.nz) || nid < 0 || nid >= static_cast<long>(f.nd)) break;
            const double zn = f.z_grid[niz];
            const double dn = f.delta0_grid[nid];
            double pred;
            if (dz_step != 0) {
                const double h = zn - z;
                const double k1 = eq.dj_dz(z, d0, jv);
                const double k2 = eq.dj_dz(zn, dn, jv + h * k1);
                pred = jv + 0.5 * h * (k1 + k2);
            } else {
                const double h = dn - d0;
                const double k1 = eq.dj_dd0(z, d0, jv);
                const double k2 = eq.dj_dd0(zn, dn, jv + h * k1);
                pred = jv + 0.5 * h * (k1 + k2);
            }
            if (!std::isfinite(pred) || std::abs(pred - jv) > 2.0) break;
            const auto root = detail::track_root(eq, zn, dn, pred, cfg);
            if (!root || std::abs(*root - pred) > cfg.track_tol) break;
            iz = static_cast<std::size_t>(niz);
            id = static_cast<std::size_t>(nid);
            z = zn;
            d0 = dn;
            jv = *root;
            f.j[iz * f.nd + id] = jv;
            f.defined[iz * f.nd + id] = 1;
        }
    };

    // First along z in both directions at delta0 = 0, then along delta0 for
    // every z row that obtained a starting value.
    march(f.iz0, f.id0, +1, 0);
    march(f.iz0, f.id0, -1, 0);
    for (std::size_t iz = 0; iz < f.nz; ++iz) {
        if (!f.is_defined(iz, f.id0)) continue;
        march(iz, f.id0, 0, +1);
        march(iz, f.id0, 0, -1);
    }
    return f;
}

// ============================================================================
// CPR table
// ============================================================================

/// Cached current-phase relation: currents sampled on a uniform delta0 grid,
/// a quintic-spline interpolant, and the zero shift that defines the working
/// coordinate delta_c = delta0 - zero_shift.
class CprTable {
public:
    /// Build from sampled currents on a uniform delta0 grid. valid_lo/hi
    /// bound queries (delta0 units); the samples may extend beyond them.
    static CprTable from_samples(double delta0_lo, double step, std::vector<double> currents, double i00,
                                 double valid_lo, double valid_hi) {
        CprTable t;
        t.i00_ = i00;
        t.grid_lo_ = delta0_lo;
        t.step_ = step;
        t.currents_ = std::move(currents);
        if (t.currents_.size() < 8) throw EmptyValidRange("CPR table: too few defined samples");
        t.spline_ = QuinticSpline(delta0_lo, step, t.currents_);
        t.valid_lo_ = std::max(valid_lo, t.spline_.x_min());
        t.valid_hi_ = std::min(valid_hi, t.spline_.x_max());
        if (!(t.valid_lo_ < t.valid_hi_)) throw EmptyValidRange("CPR table: empty valid range");
        t.compute_zero_shift();
        t.compute_extrema();
        return t;
    }

    /// Current (order 0) or CPR derivative of order 1..3 at constriction
    /// phase delta_c. Queries must land strictly inside the valid range.
    [[nodiscard]] double current(double delta_c, int order = 0) const {
        if (order < 0 || order > 3) throw Error("CPR query order must be 0..3");
        const double d0 = delta_c + zero_shift_;
        if (!(d0 > valid_lo_ && d0 < valid_hi_))
            throw OutOfRange("CPR query outside valid range");
        return spline_.eval(d0, order);
    }

    /// Integral of I over delta_c in [a, b] (ampere-radian), for energies.
    [[nodiscard]] double current_integral(double dc_a, double dc_b) const {
        const double a = dc_a + zero_shift_, b = dc_b + zero_shift_;
        if (!(a >= valid_lo_ - 1e-12 && a <= valid_hi_ + 1e-12 && b >= valid_lo_ - 1e-12 &&
              b <= valid_hi_ + 1e-12))
            throw OutOfRange("CPR integral outside valid range");
        return spline_.integral(a, b);
    }

    [[nodiscard]] double zero_shift() const { return zero_shift_; }
    [[nodiscard]] double i00() const { return i00_; }
    [[nodiscard]] double valid_lo() const { return valid_lo_; }   // delta0 units
    [[nodiscard]] double valid_hi() const { return valid_hi_; }
    [[nodiscard]] double delta_c_min() const { return valid_lo_ - zero_shift_; }
    [[nodiscard]] double delta_c_max() const { return valid_hi_ - zero_shift_; }
    [[nodiscard]] double grid_step() const { return step_; }
    [[nodiscard]] const std::vector<double>& current_grid() const { return currents_; }
    [[nodiscard]] double grid_delta0(std::size_t i) const { return grid_lo_ + step_ * static_cast<double>(i); }

    [[nodiscard]] double critical_current_plus() const { return i0_plus_; }
    [[nodiscard]] double critical_current_minus() const { return i0_minus_; }
    /// Phase of maximum slope (the flux sweetspot) and the slope there.
    [[nodiscard]] double max_slope_phase() const { return max_slope_phase_; }
    [[nodiscard]] double max_slope() const { return max_slope_; }

private:
    void compute_zero_shift() {
        // Bracketed secant between the two grid nodes straddling the sign
        // change nearest delta0 = 0. A node value of zero is already a root.
        const long n = static_cast<long>(currents_.size());
        const long i0 = std::lround((0.0 - grid_lo_) / step_);
        const double tol = 1e-13 * std::abs(i00_);
        long best = -1;
        for (long r = 0; r < n && best < 0; ++r) {
            for (const long i : {i0 - r, i0 + r}) {
                if (i < 0 || i >= n) continue;
                if (std::abs(currents_[i]) <= tol) {
                    zero_shift_ = grid_delta0(i);
                    return;
                }
                if (i + 1 < n && currents_[i] * currents_[i + 1] < 0.0) {
                    best = i;
                    break;
                }
            }
        }
        if (best < 0) throw EmptyValidRange("CPR table: no zero crossing near delta0 = 0");

        double xa = grid_delta0(best), xb = grid_delta0(best + 1);
        double fa = spline_(xa), fb = spline_(xb);
        double x = 0.5 * (xa + xb);
        for (int it = 0; it < 100; ++it) {
            double trial = fb != fa ? xb - fb * (xb - xa) / (fb - fa) : 0.5 * (xa + xb);
            if (!(trial >= xa && trial <= xb)) trial = 0.5 * (xa + xb);
            const double ft = spline_(trial);
            x = trial;
            if (std::abs(ft) <= tol || xb - xa < 1e-15) break;
            if (fa * ft <= 0.0) {
                xb = trial;
                fb = ft;
            } else {
                xa = trial;
                fa = ft;
            }
            // Illinois step keeps pure secant from stalling on one side.
            if (it % 2 == 1) {
                const double mid = 0.5 * (xa + xb);
                const double fm = spline_(mid);
                if (std::abs(fm) <= tol) {
                    x = mid;
                    break;
                }
                if (fa * fm <= 0.0) {
                    xb = mid;
                    fb = fm;
                } else {
                    xa = mid;
                    fa = fm;
                }
            }
        }
        zero_shift_ = x;
    }

    void compute_extrema() {
        auto refine = [&](double lo, double hi, auto func, bool maximize) {
            const double gr = 0.6180339887498949;
            double a = lo, b = hi;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            for (int it = 0; it < 80; ++it) {
                const double fc = maximize ? func(c) : -func(c);
                const double fd = maximize ? func(d) : -func(d);
                if (fc > fd)
                    b = d;
                else
                    a = c;
                c = b - gr * (b - a);
                d = a + gr * (b - a);
            }
            return 0.5 * (a + b);
        };
        const double eps = 1e-9 * step_;
        const double lo = valid_lo_ + eps, hi = valid_hi_ - eps;
        const long n = static_cast<long>(currents_.size());
        double vmax = -1e300, vmin = 1e300, smax = -1e300;
        long imax = 0, imin = 0, islope = 0;
        for (long i = 0; i < n; ++i) {
            const double x = grid_delta0(i);
            if (x < lo || x > hi) continue;
            const double v = currents_[i];
            if (v > vmax) {
                vmax = v;
                imax = i;
            }
            if (v < vmin) {
                vmin = v;
                imin = i;
            }
            const double s = spline_.eval(x, 1);
            if (s > smax) {
                smax = s;
                islope = i;
            }
        }
        auto bracket = [&](long i) {
            return std::pair<double, double>{std::max(lo, grid_delta0(i - 1)), std::min(hi, grid_delta0(i + 1))};
        };
        auto [la, lb] = bracket(imax);
        const double xm = refine(la, lb, [&](double x) { return spline_(x); }, true);
        i0_plus_ = spline_(xm);
        auto [ma, mb] = bracket(imin);
        const double xn = refine(ma, mb, [&](double x) { return spline_(x); }, false);
        i0_minus_ = spline_(xn);
        auto [sa, sb] = bracket(islope);
        max_slope_phase_ = refine(sa, sb, [&](double x) { return spline_.eval(x, 1); }, true) - zero_shift_;
        max_slope_ = spline_.eval(max_slope_phase_ + zero_shift_, 1);
    }

    double i00_ = 0.0;
    double grid_lo_ = 0.0, step_ = 0.0;
    std::vector<double> currents_;
    QuinticSpline spline_;
    double zero_shift_ = 0.0;
    double valid_lo_ = 0.0, valid_hi_ = 0.0;
    double i0_plus_ = 0.0, i0_minus_ = 0.0;
    double max_slope_phase_ = 0.0, max_slope_ = 0.0;
};

/// CPR derivative of order 1..3 at delta_c (interpolant derivative).
inline double cpr_derivative(const CprTable& table, double delta_c, int order) {
    if (order < 1 || order > 3) throw Error("cpr_derivative: order must be in {1, 2, 3}");
    return table.current(delta_c, order);
}

/// Integrate the scanned current density over the junction cross-section to
/// obtain the CPR. A delta0 column contributes only when the tracked root
/// exists for every scanned z row.
inline CprTable cpr_diode(const DiodeModelParams& p, const ScanConfig& cfg, const CurrentDensityField& f) {
    const long nd = static_cast<long>(f.nd);
    std::vector<std::uint8_t> column_ok(f.nd, 1);
    for (std::size_t id = 0; id < f.nd; ++id)
        for (std::size_t iz = 0; iz < f.nz; ++iz)
            if (!f.is_defined(iz, id)) {
                column_ok[id] = 0;
                break;
            }

    if (!column_ok[f.id0]) {
        bool any = false;
        for (auto ok : column_ok) any = any || ok;
        throw EmptyValidRange(any ? "cpr_diode: no usable column at delta0 = 0"
                                  : "cpr_diode: no delta0 column is fully defined");
    }
    long lo = static_cast<long>(f.id0), hi = static_cast<long>(f.id0);
    while (lo - 1 >= 0 && column_ok[lo - 1]) --lo;
    while (hi + 1 < nd && column_ok[hi + 1]) ++hi;

    // Composite Simpson over z in [-1/2, 1/2].
    const std::size_t zc_lo = f.iz0 - f.core_half;
    const std::size_t zc_hi = f.iz0 + f.core_half;
    const double hz = f.z_grid[1] - f.z_grid[0];
    std::vector<double> currents(static_cast<std::size_t>(hi - lo + 1));
    for (long id = lo; id <= hi; ++id) {
        double sum = f.value(zc_lo, id) + f.value(zc_hi, id);
        for (std::size_t iz = zc_lo + 1; iz < zc_hi; ++iz)
            sum += ((iz - zc_lo) % 2 == 1 ? 4.0 : 2.0) * f.value(iz, id);
        currents[static_cast<std::size_t>(id - lo)] = p.i00 * sum * hz / 3.0;
    }

    const double pi = 3.14159265358979323846;
    return CprTable::from_samples(f.delta0_grid[lo], cfg.delta_step, std::move(currents), p.i00, -pi, pi);
}

inline CprTable cpr_diode(const DiodeModelParams& p, const ScanConfig& cfg = {}) {
    const auto field = scan_current_density(p, cfg);
    return cpr_diode(p, cfg, field);
}

/// Process-wide cache of CPR tables keyed by exact parameter values.
class CprCache {
public:
    std::shared_ptr<const CprTable> get(const DiodeModelParams& p, const ScanConfig& cfg = {}) {
        const Key key{p.i00, p.epsilon, p.b, p.delta_b, p.delta_ell, cfg};
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        auto table = std::make_shared<const CprTable>(cpr_diode(p, cfg));
        std::lock_guard lock(mutex_);
        return cache_.emplace(key, std::move(table)).first->second;
    }

    void clear() {
        std::lock_guard lock(mutex_);
        cache_.clear();
    }

private:
    struct Key {
        double i00, epsilon, b, delta_b, delta_ell;
        ScanConfig cfg;
        bool operator<(const Key& o) const {
            if (i00 != o.i00) return i00 < o.i00;
            if (epsilon != o.epsilon) return epsilon < o.epsilon;
            if (b != o.b) return b < o.b;
            if (delta_b != o.delta_b) return delta_b < o.delta_b;
            if (delta_ell != o.delta_ell) return delta_ell < o.delta_ell;
            return cfg < o.cfg;
        }
    };
    std::map<Key, std::shared_ptr<const CprTable>> cache_;
    std::mutex mutex_;
};

} // namespace squidsim
