#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "squidsim/constants.hpp"
#include "squidsim/cpr.hpp"
#include "squidsim/squid.hpp"

using namespace squidsim;

namespace {

const double kPi = 3.14159265358979323846;
const double kPhi0 = 2.067833848e-15;

CircuitParams paper_circuit() {
    CircuitParams c;
    c.omega_0b = two_pi * 10.380e9;
    c.l_b = 397e-12;
    c.l_loop = 44e-12;
    c.c_tot = 592e-15;
    c.kappa = two_pi * 22e6;
    c.kappa_ext = two_pi * 4.7e6;
    return c;
}

CprTable sine_table(double i00) { return cpr_diode({i00, 0.0, 0.0, 0.0, 0.0}); }

CprTable homogeneous_table(double i0, double l_lin) {
    return cpr_diode({i0, 0.0, 0.0, 0.0, delta_ell_of_inductance(l_lin, i0)});
}

CprTable highfield_table() {
    // Parameters in the regime of the strongest measured diode effect.
    return cpr_diode({35e-6, 0.78, 1.0, two_pi * 300.0 / 305.0, 1.2});
}

// Linear interpolation of omega(phi) on a monotone stretch of the arc.
double omega_interp(const FluxArc& arc, double phi) {
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < arc.size(); ++k)
        if (arc.stable[k] && arc.physical[k] &&
            (arc.bias_flux[k] - phi) * (arc.bias_flux[k + 1] - phi) <= 0.0) {
            best = k;
            break;
        }
    const double t = (phi - arc.bias_flux[best]) / (arc.bias_flux[best + 1] - arc.bias_flux[best]);
    return arc.frequency[best] + t * (arc.frequency[best + 1] - arc.frequency[best]);
}

} // namespace

TEST_CASE("constriction inductance examples") {
    const auto sine = sine_table(30e-6);
    const double lj0 = constriction_inductance(sine, 0.0);
    CHECK(lj0 == Catch::Approx(11e-12).margin(0.2e-12)); // Phi0 / (2 pi 30 uA)

    const auto homog = homogeneous_table(30e-6, 12e-12);
    CHECK(constriction_inductance(homog, 0.0) == Catch::Approx(23e-12).margin(0.2e-12));

    CHECK_THROWS_AS(constriction_inductance(sine, kPi / 2), SingularInductance);

    // reciprocal of the maximum slope is the arc minimum of L_c
    const auto arc = flux_arc(homog, paper_circuit());
    double lc_min = 1e9;
    for (std::size_t k = 0; k < arc.size(); ++k)
        if (arc.physical[k] && arc.l_c[k] > 0) lc_min = std::min(lc_min, arc.l_c[k]);
    CHECK(phi0_over_2pi / homog.max_slope() <= lc_min * (1 + 1e-9));
}

TEST_CASE("delta_c_of_bias examples") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    CHECK(std::abs(delta_c_of_bias(homog, 44e-12, 0.0, 0)) < 1e-9);

    // brute-force oracle on a dense grid, using the independent homogeneous solver
    HomogeneousCprParams hp{30e-6, 12e-12};
    const double target = 0.5 * kPhi0;
    auto bias_of = [&](double dc) { return kPhi0 * dc / kPi + 44e-12 * cpr_homogeneous(hp, dc); };
    double oracle = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double a = kPi * i / n, b = kPi * (i + 1) / n;
        if ((bias_of(a) - target) * (bias_of(b) - target) <= 0.0) {
            const double fa = bias_of(a) - target, fb = bias_of(b) - target;
            oracle = a - fa * (b - a) / (fb - fa);
            break;
        }
    }
    REQUIRE(oracle > 0.0);
    CHECK(delta_c_of_bias(homog, 44e-12, target, 0) == Catch::Approx(oracle).margin(1e-5));

    // beyond the fold the branch has terminated
    const FluxSolver solver(homog, 44e-12);
    REQUIRE(solver.fold_at_hi());
    const double fold_flux = solver.bias_flux(solver.window_hi(), 0);
    CHECK_THROWS_AS(solver.delta_c_of_bias(fold_flux + 1e-4 * kPhi0, 0), BranchTerminated);
}

TEST_CASE("resonance frequency examples") {
    const auto c = paper_circuit();
    CHECK(resonance_frequency(23e-12, c) == Catch::Approx(two_pi * 10.233e9).margin(two_pi * 1e6));
    CHECK(resonance_frequency(0.0, c) == Catch::Approx(c.omega_0b));
    CHECK(resonance_frequency(2.0 * c.l_b, c) == Catch::Approx(c.omega_0b / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(resonance_frequency(-3.0 * c.l_b, c), NonPhysical);
}

TEST_CASE("flux arc satisfies the flux relation along the arc") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    const auto c = paper_circuit();
    const auto arc = flux_arc(homog, c, 0, 801);
    for (std::size_t k = 0; k < arc.size(); k += 13) {
        const double phi = kPhi0 * arc.delta_c[k] / kPi; // SQUID flux
        const double resid = arc.bias_flux[k] - phi - c.l_loop * homog.current(arc.delta_c[k]);
        CHECK(std::abs(resid) < 1e-6 * kPhi0);
        if (arc.physical[k]) {
            const double w = resonance_frequency(constriction_inductance(homog, arc.delta_c[k]), c);
            CHECK(w == Catch::Approx(arc.frequency[k]).epsilon(1e-12));
        }
    }
    CHECK(arc.sweetspot_frequency == Catch::Approx(two_pi * 10.233e9).margin(two_pi * 2e6));
}

TEST_CASE("experimental switching phase puts the jumps near 0.9 flux quanta") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    const auto c = paper_circuit();
    const auto up = hysteresis_sweep(homog, c, -1.5 * kPhi0, 1.5 * kPhi0, 1537, SweepDirection::up,
                                     FixedPhase{-1.45, 1.45});
    REQUIRE_FALSE(up.jump_locations.empty());
    bool near = false;
    for (double j : up.jump_locations) near = near || std::abs(j / kPhi0 - 0.9) < 0.05;
    CHECK(near);

    // switching current at that phase is about 20 uA
    CHECK(homog.current(1.45) == Catch::Approx(20e-6).margin(1e-6));
}

TEST_CASE("negligible loop inductance: symmetric arc, no hysteresis, flux periodic") {
    auto c = paper_circuit();
    c.l_loop = 1e-18;
    const auto sine = sine_table(30e-6);
    const auto arc = flux_arc(sine, c, 0, 2001);
    // symmetric arc about zero flux
    for (std::size_t k = 0; k < arc.size(); ++k) {
        const std::size_t m = arc.size() - 1 - k;
        if (!arc.physical[k] || !arc.physical[m]) continue;
        CHECK(arc.frequency[k] == Catch::Approx(arc.frequency[m]).epsilon(1e-9));
    }

    const std::size_t n = 193; // 64 points per flux quantum
    const auto up = hysteresis_sweep(sine, c, -1.5 * kPhi0, 1.5 * kPhi0, n, SweepDirection::up);
    const auto down = hysteresis_sweep(sine, c, -1.5 * kPhi0, 1.5 * kPhi0, n, SweepDirection::down);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::isnan(up.frequency[k]) || std::isnan(down.frequency[k])) continue;
        CHECK(up.frequency[k] == Catch::Approx(down.frequency[k]).epsilon(1e-9));
        if (k + 64 < n && !std::isnan(up.frequency[k + 64])) {
            CHECK(up.frequency[k + 64] == Catch::Approx(up.frequency[k]).epsilon(1e-9));
            CHECK(up.fluxoid_index[k + 64] == up.fluxoid_index[k] + 1);
        }
    }
}

TEST_CASE("hysteresis with fold-point switching") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    const auto c = paper_circuit();
    const std::size_t n = 1537;
    const auto up = hysteresis_sweep(homog, c, -2.0 * kPhi0, 2.0 * kPhi0, n, SweepDirection::up);
    const auto down = hysteresis_sweep(homog, c, -2.0 * kPhi0, 2.0 * kPhi0, n, SweepDirection::down);
    REQUIRE_FALSE(up.jump_locations.empty());
    REQUIRE_FALSE(down.jump_locations.empty());

    // jump positions mirror about the arc crossings at (n + 1/2) Phi0
    const double h = 4.0 * kPhi0 / static_cast<double>(n - 1);
    for (double u : up.jump_locations) {
        bool paired = false;
        for (double d : down.jump_locations) {
            const double mid = 0.5 * (u + d) / kPhi0; // expect k + 1/2
            if (std::abs(mid - std::round(mid - 0.5) - 0.5) < 2.5 * h / kPhi0) paired = true;
        }
        CHECK(paired);
    }

    // frequencies coincide exactly where both sweeps occupy the same branch
    for (std::size_t k = 0; k < n; ++k) {
        if (up.fluxoid_index[k] != down.fluxoid_index[k]) continue;
        if (std::isnan(up.frequency[k]) || std::isnan(down.frequency[k])) continue;
        CHECK(up.frequency[k] == Catch::Approx(down.frequency[k]).epsilon(1e-12));
    }

    // premature (fixed-current) switching jumps before the fold
    const auto early = hysteresis_sweep(homog, c, -2.0 * kPhi0, 2.0 * kPhi0, n, SweepDirection::up,
                                        FixedCurrent{-20e-6, 20e-6});
    REQUIRE_FALSE(early.jump_locations.empty());
    CHECK(early.jump_locations.front() < up.jump_locations.front());
}

TEST_CASE("flux periodicity of hysteretic sweeps") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    const auto c = paper_circuit();
    const std::size_t n = 193;
    const auto up = hysteresis_sweep(homog, c, -0.5 * kPhi0, 2.5 * kPhi0, n, SweepDirection::up);
    for (std::size_t k = 0; k + 64 < n; ++k) {
        if (std::isnan(up.frequency[k]) || std::isnan(up.frequency[k + 64])) continue;
        CHECK(up.frequency[k + 64] == Catch::Approx(up.frequency[k]).epsilon(1e-12));
        CHECK(up.fluxoid_index[k + 64] == up.fluxoid_index[k] + 1);
    }
}

TEST_CASE("high-field diode arcs: inverted down-sweep jumps") {
    const auto table = highfield_table();
    auto c = paper_circuit();
    c.omega_0b = two_pi * 10.21e9;
    c.l_b = 410e-12;
    c.l_loop = 45e-12;

    const auto arc = flux_arc(table, c);
    // the sweetspot shifts away from zero flux and the CPR is asymmetric
    CHECK(std::abs(arc.sweetspot_flux) > 0.02 * kPhi0);
    CHECK(std::abs(table.critical_current_minus()) >
          2.0 * std::abs(table.critical_current_plus()));

    const std::size_t n = 2049;
    const double lo = arc.sweetspot_flux - 2.0 * kPhi0, hi = arc.sweetspot_flux + 2.0 * kPhi0;
    const auto down = hysteresis_sweep(table, c, lo, hi, n, SweepDirection::down);
    const auto up = hysteresis_sweep(table, c, lo, hi, n, SweepDirection::up);
    REQUIRE_FALSE(down.jump_locations.empty());
    REQUIRE_FALSE(up.jump_locations.empty());

    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (double j : down.jump_locations) {
        const auto k = static_cast<std::size_t>(std::lround((j - lo) / h));
        if (k + 1 >= n) continue;
        const double step = down.frequency[k] - down.frequency[k + 1]; // post minus pre
        if (std::isnan(step)) continue;
        CHECK(step < 0.0); // metastable branch sits above the stable one
    }
    for (double j : up.jump_locations) {
        const auto k = static_cast<std::size_t>(std::lround((j - lo) / h));
        if (k == 0) continue;
        const double step = up.frequency[k] - up.frequency[k - 1];
        if (std::isnan(step)) continue;
        CHECK(step > 0.0);
    }
}

TEST_CASE("flux responsivity: sweetspot zero, odd symmetry, finite differences") {
    const auto sine = sine_table(30e-6);
    const auto c = paper_circuit();
    const auto arc = flux_arc(sine, c, 0, 4001);
    const auto resp = flux_responsivity(arc);

    std::size_t ks = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < arc.size(); ++k)
        if (std::abs(arc.delta_c[k] - arc.sweetspot_delta_c) < best) {
            best = std::abs(arc.delta_c[k] - arc.sweetspot_delta_c);
            ks = k;
        }
    CHECK(std::abs(resp[ks].second) * kPhi0 / two_pi < 0.2e6);

    // odd symmetry about the (zero-flux) sweetspot of a sine CPR
    for (std::size_t k = 0; k < arc.size(); k += 97) {
        const std::size_t m = arc.size() - 1 - k;
        if (std::isnan(resp[k].second) || std::isnan(resp[m].second)) continue;
        if (std::abs(resp[k].second) < 1e-3) continue;
        CHECK(resp[k].second == Catch::Approx(-resp[m].second).epsilon(1e-6));
    }

    // matches a finite difference of the arc away from folds
    for (std::size_t k = 10; k + 10 < arc.size(); k += 131) {
        if (!arc.stable[k] || !arc.physical[k]) continue;
        if (std::abs(arc.delta_c[k]) > 1.2) continue; // stay away from the critical phase
        const double fd =
            (arc.frequency[k + 1] - arc.frequency[k - 1]) / (arc.bias_flux[k + 1] - arc.bias_flux[k - 1]);
        if (std::abs(fd) < 1e-3) continue;
        CHECK(resp[k].second == Catch::Approx(fd).epsilon(0.01));
    }
}

TEST_CASE("maximum stable responsivity at zero field is about 25 MHz per flux quantum") {
    const auto homog = homogeneous_table(30e-6, 12e-12);
    const auto c = paper_circuit();
    const auto arc = flux_arc(homog, c, 0, 4001);
    const auto range = stable_operating_range(arc);
    CHECK(range.acp_hi);
    CHECK(range.acp_lo);
    CHECK(range.phi_hi == Catch::Approx(0.5 * kPhi0).epsilon(0.02));
    const double fmax = max_stable_responsivity(arc, range);
    CHECK(fmax * kPhi0 / two_pi == Catch::Approx(25e6).epsilon(0.2));
}

TEST_CASE("reversing the field mirrors every arc about its sweetspot") {
    const DiodeModelParams pp{35e-6, 0.4, 0.6, 2.2, 0.9};
    DiodeModelParams pm = pp;
    pm.delta_b = -pp.delta_b;
    const auto tp = cpr_diode(pp);
    const auto tm = cpr_diode(pm);
    const auto c = paper_circuit();
    const auto ap = flux_arc(tp, c);
    const auto am = flux_arc(tm, c);
    CHECK(ap.sweetspot_frequency == Catch::Approx(am.sweetspot_frequency).epsilon(1e-9));
    for (double x = 0.05 * kPhi0; x < 0.35 * kPhi0; x += 0.06 * kPhi0) {
        const double wp = omega_interp(ap, ap.sweetspot_flux + x);
        const double wm = omega_interp(am, am.sweetspot_flux - x);
        CHECK(wp == Catch::Approx(wm).epsilon(1e-6));
        const double wp2 = omega_interp(ap, ap.sweetspot_flux - x);
        const double wm2 = omega_interp(am, am.sweetspot_flux + x);
        CHECK(wp2 == Catch::Approx(wm2).epsilon(1e-6));
    }
}

TEST_CASE("non-diode parameter sets give arcs symmetric about the sweetspot") {
    const auto c = paper_circuit();
    // delta_ell = 0 with both gradients
    const auto t1 = cpr_diode({35e-6, 0.5, 0.7, 2.0, 0.0});
    const auto a1 = flux_arc(t1, c);
    // no gradients with field and inductance
    const auto t2 = cpr_diode({35e-6, 0.0, 0.0, 1.5, 0.8});
    const auto a2 = flux_arc(t2, c);
    for (const auto* arc : {&a1, &a2}) {
        for (double x = 0.04 * kPhi0; x < 0.3 * kPhi0; x += 0.05 * kPhi0) {
            const double wp = omega_interp(*arc, arc->sweetspot_flux + x);
            const double wm = omega_interp(*arc, arc->sweetspot_flux - x);
            CHECK(wp == Catch::Approx(wm).epsilon(1e-6));
        }
    }
}

TEST_CASE("constriction inductance grows monotonically from sweetspot to switch points") {
    const auto table = highfield_table();
    const auto c = paper_circuit();
    const auto arc = flux_arc(table, c);
    std::size_t ks = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < arc.size(); ++k)
        if (std::abs(arc.delta_c[k] - arc.sweetspot_delta_c) < best) {
            best = std::abs(arc.delta_c[k] - arc.sweetspot_delta_c);
            ks = k;
        }
    for (std::size_t k = ks; k + 1 < arc.size(); ++k) {
        if (!arc.stable[k + 1] || !arc.physical[k + 1]) break;
        CHECK(arc.l_c[k + 1] >= arc.l_c[k] * (1 - 1e-9));
    }
    for (std::size_t k = ks; k-- > 1;) {
        if (!arc.stable[k] || !arc.physical[k]) break;
        CHECK(arc.l_c[k] >= arc.l_c[k + 1] * (1 - 1e-9));
    }
}

TEST_CASE("circuit parameter validation") {
    auto c = paper_circuit();
    c.kappa_ext = 2.0 * c.kappa;
    CHECK_THROWS_AS(c.validate(), Error);
    c = paper_circuit();
    c.l_b = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
}
