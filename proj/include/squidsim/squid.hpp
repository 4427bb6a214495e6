#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "squidsim/constants.hpp"
#include "squidsim/cpr.hpp"
#include "squidsim/errors.hpp"

namespace squidsim {

/// Linear circuit quantities at one in-plane field.
struct CircuitParams {
    double omega_0b = 0.0;  // bare resonance, no constrictions [rad/s]
    double l_b = 0.0;       // resonator inductance [H]
    double l_loop = 0.0;    // SQUID loop inductance [H]
    double c_tot = 0.0;     // total capacitance [F]
    double kappa = 0.0;     // total linewidth [rad/s]
    double kappa_ext = 0.0; // external linewidth [rad/s]
    double kappa_nl = 0.0;  // nonlinear damping [rad/s per photon]

    void validate() const {
        if (!(omega_0b > 0.0) || !(l_b > 0.0) || !(l_loop > 0.0) || !(c_tot > 0.0) || !(kappa > 0.0) ||
            !(kappa_ext > 0.0))
            throw Error("circuit parameters must be positive");
        if (kappa_nl < 0.0) throw Error("circuit: kappa_nl must be non-negative");
        if (kappa_ext > kappa) throw Error("circuit: kappa_ext exceeds kappa");
    }

    [[nodiscard]] double l_arm() const { return l_loop / 3.0; }
};

/// Constriction inductance L_c = (Phi0 / 2 pi) / (dI/d delta_c).
inline double constriction_inductance(const CprTable& table, double delta_c, double slope_floor = 1e-12) {
    const double slope = table.current(delta_c, 1);
    if (std::abs(slope) < slope_floor)
        throw SingularInductance("constriction_inductance: CPR slope below floor (critical phase)");
    return phi0_over_2pi / slope;
}

/// omega_0 = omega_0b / sqrt(1 + L_c / 2 L_b).
inline double resonance_frequency(double l_c, const CircuitParams& circuit) {
    const double x = 1.0 + l_c / (2.0 * circuit.l_b);
    if (!(x > 0.0)) throw NonPhysical("resonance_frequency: 1 + L_c / 2 L_b is not positive");
    return circuit.omega_0b / std::sqrt(x);
}

// ============================================================================
// Flux relation (bias flux <-> constriction phase on one fluxoid branch)
// ============================================================================

/// Solves Phi0 delta_c / pi + L_loop I(delta_c) = Phi_b - n Phi0 on the branch
/// window bounded by the folds nearest delta_c = 0.
class FluxSolver {
public:
    FluxSolver(const CprTable& table, double l_loop) : table_(&table), l_loop_(l_loop) {
        const double pi = 3.14159265358979323846;
        const double margin = 1e-6 * table.grid_step();
        dc_min_ = table.delta_c_min() + margin;
        dc_max_ = table.delta_c_max() - margin;
        // Walk out from delta_c = 0 to the first sign change of dPhi_b/ddelta_c.
        const double h = 0.5 * table.grid_step();
        auto gp = [&](double dc) { return phys.flux_quantum / pi + l_loop_ * table_->current(dc, 1); };
        if (!(gp(0.0) > 0.0)) throw Error("FluxSolver: dPhi_b/ddelta_c not positive at delta_c = 0");
        auto find_fold = [&](int dir) -> std::optional<double> {
            double prev = 0.0, gprev = gp(prev);
            for (double dc = h * dir;; dc += h * dir) {
                if (dc <= dc_min_ || dc >= dc_max_) return std::nullopt;
                const double g = gp(dc);
                if (gprev > 0.0 && g <= 0.0) {
                    double a = prev, b = dc;
                    for (int it = 0; it < 80; ++it) {
                        const double m = 0.5 * (a + b);
                        (gp(m) > 0.0 ? a : b) = m;
                    }
                    return 0.5 * (a + b);
                }
                prev = dc;
                gprev = g;
            }
        };
        const auto hi = find_fold(+1);
        const auto lo = find_fold(-1);
        fold_hi_ = hi.has_value();
        fold_lo_ = lo.has_value();
        win_hi_ = hi.value_or(dc_max_);
        win_lo_ = lo.value_or(dc_min_);
    }

    /// Bias flux produced by phase delta_c on fluxoid branch n.
    [[nodiscard]] double bias_flux(double delta_c, int branch = 0) const {
        const double pi = 3.14159265358979323846;
        return phys.flux_quantum * delta_c / pi + l_loop_ * table_->current(delta_c) +
               branch * phys.flux_quantum;
    }

    [[nodiscard]] double dbias_flux(double delta_c) const {
        const double pi = 3.14159265358979323846;
        return phys.flux_quantum / pi + l_loop_ * table_->current(delta_c, 1);
    }

    /// Phase on branch n at bias flux phi_b; throws BranchTerminated past a fold.
    [[nodiscard]] double delta_c_of_bias(double phi_b, int branch = 0) const {
        const double target = phi_b - branch * phys.flux_quantum;
        const double g_lo = bias_flux(win_lo_), g_hi = bias_flux(win_hi_);
        if (target < g_lo || target > g_hi)
            throw BranchTerminated("delta_c_of_bias: bias flux beyond the branch fold");
        double a = win_lo_, b = win_hi_, fa = g_lo - target;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = bias_flux(m) - target;
            if (std::abs(fm) < 1e-12 * phys.flux_quantum && it > 4) return m;
            if (fa * fm <= 0.0) {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
            if (b - a < 1e-14) break;
        }
        return 0.5 * (a + b);
    }

    [[nodiscard]] double window_lo() const { return win_lo_; }
    [[nodiscard]] double window_hi() const { return win_hi_; }
    [[nodiscard]] bool fold_at_lo() const { return fold_lo_; }
    [[nodiscard]] bool fold_at_hi() const { return fold_hi_; }
    [[nodiscard]] double range_lo() const { return dc_min_; }
    [[nodiscard]] double range_hi() const { return dc_max_; }
    [[nodiscard]] const CprTable& table() const { return *table_; }
    [[nodiscard]] double l_loop() const { return l_loop_; }

private:
    const CprTable* table_;
    double l_loop_;
    double dc_min_ = 0, dc_max_ = 0;
    double win_lo_ = 0, win_hi_ = 0;
    bool fold_lo_ = false, fold_hi_ = false;
};

inline double delta_c_of_bias(const CprTable& table, double l_loop, double phi_b, int branch) {
    return FluxSolver(table, l_loop).delta_c_of_bias(phi_b, branch);
}

// ============================================================================
// Flux arcs
// ============================================================================

/// One fluxoid branch sampled across the full phase range of the CPR.
/// stable marks points with dPhi_b/ddelta_c > 0; physical marks points where
/// the resonance frequency exists. The switch points are the folds nearest
/// the sweetspot, or the range ends when no fold occurs first.
struct FluxArc {
    int branch = 0;
    CircuitParams circuit;
    std::vector<double> delta_c, bias_flux, frequency, l_c;
    std::vector<double> current;         // I(delta_c)
    std::vector<double> di1, di2, dphib; // I', I'', dPhi_b/ddelta_c
    std::vector<std::uint8_t> stable, physical;
    double sweetspot_delta_c = 0, sweetspot_flux = 0, sweetspot_frequency = 0;
    double switch_flux_lo = 0, switch_current_lo = 0;
    double switch_flux_hi = 0, switch_current_hi = 0;
    bool fold_lo = false, fold_hi = false;

    [[nodiscard]] std::size_t size() const { return delta_c.size(); }
};

inline FluxArc flux_arc(const CprTable& table, const CircuitParams& circuit, int branch = 0,
                        std::size_t resolution = 2001) {
    circuit.validate();
    if (resolution < 16) throw Error("flux_arc: resolution too small");
    const FluxSolver solver(table, circuit.l_loop);

    FluxArc arc;
    arc.branch = branch;
    arc.circuit = circuit;
    const double lo = solver.range_lo(), hi = solver.range_hi();
    const double step = (hi - lo) / static_cast<double>(resolution - 1);
    arc.delta_c.resize(resolution);
    arc.bias_flux.resize(resolution);
    arc.frequency.resize(resolution);
    arc.l_c.resize(resolution);
    arc.current.resize(resolution);
    arc.di1.resize(resolution);
    arc.di2.resize(resolution);
    arc.dphib.resize(resolution);
    arc.stable.resize(resolution);
    arc.physical.resize(resolution);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < resolution; ++k) {
        const double dc = lo + step * static_cast<double>(k);
        arc.delta_c[k] = dc;
        arc.bias_flux[k] = solver.bias_flux(dc, branch);
        arc.current[k] = table.current(dc);
        arc.di1[k] = table.current(dc, 1);
        arc.di2[k] = table.current(dc, 2);
        arc.dphib[k] = solver.dbias_flux(dc);
        arc.stable[k] = arc.dphib[k] > 0.0 ? 1 : 0;
        if (std::abs(arc.di1[k]) < 1e-12) {
            arc.l_c[k] = nan;
            arc.frequency[k] = nan;
            arc.physical[k] = 0;
            continue;
        }
        arc.l_c[k] = phi0_over_2pi / arc.di1[k];
        const double x = 1.0 + arc.l_c[k] / (2.0 * circuit.l_b);
        if (x > 0.0) {
            arc.frequency[k] = circuit.omega_0b / std::sqrt(x);
            arc.physical[k] = 1;
        } else {
            arc.frequency[k] = nan;
            arc.physical[k] = 0;
        }
    }

    arc.sweetspot_delta_c = table.max_slope_phase();
    arc.sweetspot_flux = solver.bias_flux(arc.sweetspot_delta_c, branch);
    arc.sweetspot_frequency =
        resonance_frequency(phi0_over_2pi / table.max_slope(), circuit);

    arc.fold_lo = solver.fold_at_lo();
    arc.fold_hi = solver.fold_at_hi();
    arc.switch_flux_lo = solver.bias_flux(solver.window_lo(), branch);
    arc.switch_current_lo = table.current(solver.window_lo());
    arc.switch_flux_hi = solver.bias_flux(solver.window_hi(), branch);
    arc.switch_current_hi = table.current(solver.window_hi());
    return arc;
}

/// Analytic flux responsivity F = domega_0/dPhi_b along the arc, by the chain
/// rule through L_c(delta_c) and Phi_b(delta_c). NaN where undefined.
inline std::vector<std::pair<double, double>> flux_responsivity(const FluxArc& arc) {
    if (arc.size() < 3) throw Error("flux_responsivity: arc too short");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> out(arc.size());
    for (std::size_t k = 0; k < arc.size(); ++k) {
        if (!arc.physical[k] || arc.dphib[k] == 0.0) {
            out[k] = {arc.frequency[k], nan};
            continue;
        }
        const double domega_dlc = -arc.frequency[k] / (2.0 * (2.0 * arc.circuit.l_b + arc.l_c[k]));
        const double dlc_ddc = -phi0_over_2pi * arc.di2[k] / (arc.di1[k] * arc.di1[k]);
        out[k] = {arc.frequency[k], domega_dlc * dlc_ddc / arc.dphib[k]};
    }
    return out;
}

// ============================================================================
// Switching rules and hysteresis sweeps
// ============================================================================

struct FoldPoint {};
struct FixedPhase {
    double delta_lo, delta_hi;
};
struct FixedCurrent {
    double i_lo, i_hi;
};
using SwitchingRule = std::variant<FoldPoint, FixedPhase, FixedCurrent>;

enum class SweepDirection { up, down };

struct SweepResult {
    SweepDirection direction = SweepDirection::up;
    std::vector<double> bias_flux, frequency;
    std::vector<int> fluxoid_index;
    std::vector<double> jump_locations;
};

/// Sweep the bias flux following one fluxoid branch until the switching rule
/// triggers, then hop to the adjacent branch. FoldPoint switches only at the
/// branch fold; the fixed rules may switch earlier but the fold remains a
/// hard limit. Frequencies are NaN where the resonance is not physical.
inline SweepResult hysteresis_sweep(const CprTable& table, const CircuitParams& circuit, double phi_lo,
                                    double phi_hi, std::size_t n_points, SweepDirection direction,
                                    const SwitchingRule& rule = FoldPoint{}) {
    circuit.validate();
    if (n_points < 2 || !(phi_hi > phi_lo)) throw Error("hysteresis_sweep: bad flux range");
    const FluxSolver solver(table, circuit.l_loop);
    const double sweet0 = solver.bias_flux(table.max_slope_phase(), 0);

    SweepResult res;
    res.direction = direction;
    res.bias_flux.resize(n_points);
    res.frequency.resize(n_points);
    res.fluxoid_index.resize(n_points);
    const double h = (phi_hi - phi_lo) / static_cast<double>(n_points - 1);
    const int dir = direction == SweepDirection::up ? +1 : -1;

    auto triggered = [&](double dc) {
        if (std::holds_alternative<FixedPhase>(rule)) {
            const auto& r = std::get<FixedPhase>(rule);
            return dir > 0 ? dc > r.delta_hi : dc < r.delta_lo;
        }
        if (std::holds_alternative<FixedCurrent>(rule)) {
            const auto& r = std::get<FixedCurrent>(rule);
            const double i = table.current(dc);
            return dir > 0 ? i > r.i_hi : i < r.i_lo;
        }
        return false;
    };

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto accepts = [&](double phi, int n) {
        try {
            return !triggered(solver.delta_c_of_bias(phi, n));
        } catch (const BranchTerminated&) {
            return false;
        }
    };
    // Steady-state entry: the branch the sweep would occupy had it started far
    // outside the range (the oldest surviving fluxoid state).
    const double phi_first = direction == SweepDirection::up ? phi_lo : phi_hi;
    int branch = static_cast<int>(std::lround((phi_first - sweet0) / phys.flux_quantum));
    for (int back = 0; back < 6 && accepts(phi_first, branch - dir); ++back) branch -= dir;

    for (std::size_t k = 0; k < n_points; ++k) {
        const std::size_t idx = direction == SweepDirection::up ? k : n_points - 1 - k;
        const double phi = phi_lo + h * static_cast<double>(idx);
        double dc = 0.0;
        bool solved = false;
        for (int hop = 0; hop <= 4 && !solved; ++hop) {
            try {
                dc = solver.delta_c_of_bias(phi, branch);
                if (triggered(dc)) {
                    branch += dir;
                    if (k > 0) res.jump_locations.push_back(phi);
                    continue;
                }
                solved = true;
            } catch (const BranchTerminated&) {
                branch += dir;
                if (k > 0) res.jump_locations.push_back(phi);
            }
        }
        if (!solved) throw NoStableBranch("hysteresis_sweep: no branch accepts the bias flux after a jump");
        res.bias_flux[idx] = phi;
        res.fluxoid_index[idx] = branch;
        try {
            res.frequency[idx] = resonance_frequency(constriction_inductance(table, dc), circuit);
        } catch (const Error&) {
            res.frequency[idx] = nan;
        }
    }
    return res;
}

// ============================================================================
// Operating range and figures of merit
// ============================================================================

/// Endpoints of the stable operating segment around the sweetspot: the arc
/// crossing with the neighboring branch when the arcs cross (beyond it the
/// state is only metastable), otherwise the switch point given by the rule,
/// with the fold as hard limit.
struct StableRange {
    double phi_lo = 0, phi_hi = 0;
    bool acp_lo = false, acp_hi = false;
};

inline StableRange stable_operating_range(const FluxArc& arc, const SwitchingRule& rule = FoldPoint{}) {
    // Contiguous stable+physical component around the sweetspot.
    const std::size_t n = arc.size();
    std::size_t ks = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::abs(arc.delta_c[k] - arc.sweetspot_delta_c);
        if (d < best) {
            best = d;
            ks = k;
        }
    }
    std::size_t a = ks, b = ks;
    while (a > 0 && arc.stable[a - 1] && arc.physical[a - 1]) --a;
    while (b + 1 < n && arc.stable[b + 1] && arc.physical[b + 1]) ++b;

    StableRange out;
    out.phi_lo = arc.bias_flux[a];
    out.phi_hi = arc.bias_flux[b];

    // Apply the switching rule within the component.
    if (std::holds_alternative<FixedPhase>(rule)) {
        const auto& r = std::get<FixedPhase>(rule);
        for (std::size_t k = ks; k <= b; ++k)
            if (arc.delta_c[k] > r.delta_hi) {
                out.phi_hi = arc.bias_flux[k];
                break;
            }
        for (std::size_t k = ks + 1; k-- > a;)
            if (arc.delta_c[k] < r.delta_lo) {
                out.phi_lo = arc.bias_flux[k];
                break;
            }
    } else if (std::holds_alternative<FixedCurrent>(rule)) {
        const auto& r = std::get<FixedCurrent>(rule);
        for (std::size_t k = ks; k <= b; ++k)
            if (arc.current[k] > r.i_hi) {
                out.phi_hi = arc.bias_flux[k];
                break;
            }
        for (std::size_t k = ks + 1; k-- > a;)
            if (arc.current[k] < r.i_lo) {
                out.phi_lo = arc.bias_flux[k];
                break;
            }
    }

    // Arc-crossing points against the branch shifted by one flux quantum.
    auto omega_at = [&](double phi) -> double {
        // linear interpolation on the stable component (monotone Phi_b)
        std::size_t klo = a, khi = b;
        if (phi <= arc.bias_flux[a] || phi >= arc.bias_flux[b]) return std::numeric_limits<double>::quiet_NaN();
        while (khi - klo > 1) {
            const std::size_t m = (klo + khi) / 2;
            (arc.bias_flux[m] <= phi ? klo : khi) = m;
        }
        const double t = (phi - arc.bias_flux[klo]) / (arc.bias_flux[khi] - arc.bias_flux[klo]);
        return arc.frequency[klo] + t * (arc.frequency[khi] - arc.frequency[klo]);
    };
    const double q = phys.flux_quantum;
    auto crossing = [&](int side) -> std::optional<double> {
        // side +1: solve omega(phi) = omega(phi - q) for phi > sweetspot
        const double lo = std::max(arc.sweetspot_flux, arc.bias_flux[a] + q);
        const double hi = arc.bias_flux[b];
        if (side < 0) {
            const double l2 = arc.bias_flux[a];
            const double h2 = std::min(arc.sweetspot_flux, arc.bias_flux[b] - q);
            if (!(h2 > l2)) return std::nullopt;
            double prev = l2 + 1e-6 * q, gprev = omega_at(prev) - omega_at(prev + q);
            const int m = 400;
            for (int i = 1; i <= m; ++i) {
                const double x = l2 + (h2 - l2) * i / m;
                const double g = omega_at(x) - omega_at(x + q);
                if (gprev == gprev && g == g && gprev * g <= 0.0) {
                    double xa = prev, xb = x;
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (xa + xb);
                        const double gm = omega_at(mid) - omega_at(mid + q);
                        ((gprev <= 0) == (gm <= 0) ? xa : xb) = mid;
                    }
                    return 0.5 * (xa + xb);
                }
                prev = x;
                gprev = g;
            }
            return std::nullopt;
        }
        if (!(hi > lo)) return std::nullopt;
        double prev = lo + 1e-6 * q, gprev = omega_at(prev) - omega_at(prev - q);
        const int m = 400;
        for (int i = 1; i <= m; ++i) {
            const double x = lo + (hi - lo) * i / m;
            const double g = omega_at(x) - omega_at(x - q);
            if (gprev == gprev && g == g && gprev * g <= 0.0) {
                double xa = prev, xb = x;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (xa + xb);
                    const double gm = omega_at(mid) - omega_at(mid - q);
                    ((gprev <= 0) == (gm <= 0) ? xa : xb) = mid;
                }
                return 0.5 * (xa + xb);
            }
            prev = x;
            gprev = g;
        }
        return std::nullopt;
    };
    if (const auto c = crossing(+1); c && *c < out.phi_hi) {
        out.phi_hi = *c;
        out.acp_hi = true;
    }
    if (const auto c = crossing(-1); c && *c > out.phi_lo) {
        out.phi_lo = *c;
        out.acp_lo = true;
    }
    return out;
}

/// Largest |domega_0/dPhi_b| over the stable operating range.
inline double max_stable_responsivity(const FluxArc& arc, const StableRange& range) {
    const auto resp = flux_responsivity(arc);
    double best = 0.0;
    for (std::size_t k = 0; k < arc.size(); ++k) {
        if (!arc.stable[k] || !arc.physical[k]) continue;
        if (arc.bias_flux[k] < range.phi_lo || arc.bias_flux[k] > range.phi_hi) continue;
        const double f = std::abs(resp[k].second);
        if (f == f && f > best) best = f;
    }
    return best;
}

} // namespace squidsim
