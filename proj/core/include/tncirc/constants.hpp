#pragma once

#include <cmath>

// Physical constants (CODATA 2018 exact values) and the unit conversions used
// throughout: energies as frequencies in GHz (E/h), capacitance in fF,
// inductance in nH, flux in units of Phi0. This keeps circuit-scale matrix
// entries near unity.
namespace tncirc::constants {

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck_h = 6.62607015e-34;            // J s
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = planck_h / (2.0 * pi);
inline constexpr double flux_quantum = planck_h / (2.0 * elementary_charge);   // Phi0, Wb
inline constexpr double reduced_flux_quantum = hbar / (2.0 * elementary_charge);
inline constexpr double resistance_quantum =
    planck_h / (4.0 * elementary_charge * elementary_charge);  // R_Q = h/(2e)^2, Ohm
inline constexpr double euler_gamma = 0.57721566490153286061;

// E_C = e^2 / 2C as a frequency in GHz for C in fF.
inline double charging_energy_ghz(double capacitance_ff) {
  return elementary_charge * elementary_charge /
         (2.0 * capacitance_ff * 1e-15 * planck_h) * 1e-9;
}

// E_J = phi0^2 / L as a frequency in GHz for L in nH.
inline double inductive_energy_ghz(double inductance_nh) {
  return reduced_flux_quantum * reduced_flux_quantum /
         (inductance_nh * 1e-9 * planck_h) * 1e-9;
}

// Junction L_J (nH) from plasma frequency omega_p/2pi (GHz) and reduced
// impedance z = sqrt(L/C)/R_Q.
inline double junction_inductance_nh(double f_p_ghz, double z) {
  const double omega_p = 2.0 * pi * f_p_ghz * 1e9;
  return z * resistance_quantum / omega_p * 1e9;
}

// Junction C_J (fF) from plasma frequency and reduced impedance.
inline double junction_capacitance_ff(double f_p_ghz, double z) {
  const double omega_p = 2.0 * pi * f_p_ghz * 1e9;
  return 1.0 / (z * resistance_quantum * omega_p) * 1e15;
}

}  // namespace tncirc::constants
