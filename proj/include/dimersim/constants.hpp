#pragma once

#include <cmath>

// Unit conventions used throughout the library:
//   energies            eV
//   dipole vectors      Debye (divided by the 1 Debye reference wherever they
//                       enter a rate expression, so they act as dimensionless)
//   time                hbar/eV internally, seconds at the I/O boundary
//   temperature         Kelvin

namespace dimersim::constants {

inline constexpr double pi = 3.14159265358979323846;

// hbar in eV*s, used only when converting times for output.
inline constexpr double hbar_ev_s = 6.582119569e-16;

// Boltzmann constant in eV/K.
inline constexpr double k_boltzmann_ev_per_k = 8.617333262e-5;

// CODATA 2018 fine-structure constant and hbar*c.
inline constexpr double fine_structure = 7.2973525693e-3;
inline constexpr double hbar_c_ev_nm = 197.3269804;

// 1 Debye expressed as charge*length in e*nm.
inline constexpr double debye_e_nm = 2.08194332709356e-2;

// 1 Debye in Heaviside-Lorentz natural units (1/eV). Squared it is the
// |d_ref|^2 that enters the dimensionless field-coupling constant.
inline const double debye_natural =
    debye_e_nm * std::sqrt(4.0 * pi * fine_structure) / hbar_c_ev_nm;

inline double seconds_from_natural(double t_nat) { return t_nat * hbar_ev_s; }
inline double natural_from_seconds(double t_s) { return t_s / hbar_ev_s; }

} // namespace dimersim::constants
