#pragma once

namespace squidsim {

/// Fundamental constants at CODATA precision. All internal computation is in
/// SI units (ampere, henry, farad, weber, radian per second).
struct PhysicalConstants {
    double flux_quantum = 2.067833848e-15;    // Phi_0 = h / 2e  [Wb]
    double electron_charge = 1.602176634e-19; // e  [C]
    double reduced_planck = 1.054571817e-34;  // hbar  [J s]
};

inline constexpr PhysicalConstants phys{};

/// Phi_0 / 2pi, the conversion between phase and flux.
inline constexpr double phi0_over_2pi = 2.067833848e-15 / 6.283185307179586476925286766559;

inline constexpr double two_pi = 6.283185307179586476925286766559;

} // namespace squidsim
