#pragma once

#include <string>
#include <vector>

#include "tncirc/circuit.hpp"
#include "tncirc/dmrg.hpp"
#include "tncirc/ed.hpp"
#include "tncirc/effective_model.hpp"

namespace tncirc {

enum class Solver { dmrg, single_mode, ed };

Solver solver_from_string(const std::string& name);
std::string to_string(Solver s);

struct SweepOptions {
  int d = 15;
  int charge_cutoff = 0;  // 0: default rule
  DmrgConfig dmrg;
  EdOptions ed;
  int single_mode_basis = 400;
  bool renormalize = true;   // false: linear-theory baseline (x_i = x_b = 1)
  bool warm_start = true;    // reuse the previous flux point's bundle
};

struct SpectrumRow {
  double phi_ext = 0.0;
  double n_g = 0.0;
  Solver solver = Solver::dmrg;
  std::vector<double> transitions_ghz;  // omega_0k / 2pi, k = 1..K
  bool converged = false;
  double max_truncation_error = 0.0;
  int sweeps = 0;
  std::string error;  // nonempty when the solver failed at this point
};

struct SpectrumTable {
  int k_levels = 0;
  std::vector<SpectrumRow> rows;

  const SpectrumRow& row_at(double phi_ext, double tol = 1e-12) const;
};

SpectrumTable spectrum_sweep(const CircuitParams& p, const std::vector<double>& flux_grid,
                             Solver solver, int k, const SweepOptions& opts);

// Mean site populations <psi_k|H_0i|psi_k> / (h f_p), absolute convention
// (the decoupled ground state gives the site ground energy over h f_p).
Matrix site_populations(const BundledMps& states, const std::vector<SiteBasis>& site_bases,
                        double omega_p_ghz);

struct PhaseProfile {
  std::vector<double> drop;    // <phi_0 - phi_i> for i = 1..N_J
  std::vector<bool> defined;   // false where |<e^{i theta}>| < 1e-6
};

PhaseProfile phase_profile(const BundledMps& states, const std::vector<SiteBasis>& site_bases,
                           int member);

struct CqpsAmplitude {
  double value_ghz = 0.0;           // epsilon_0 / h
  bool low_impedance_valid = true;  // false when z > 0.1
};

// Per-junction phase-slip amplitude  eps0 = 8 sqrt(2) hbar w_p e^{-4/(pi z)} / sqrt(pi z).
CqpsAmplitude cqps_epsilon(double z, double omega_p_ghz);

// |Delta omega_01| = 2 N_J eps0 |<T>_1 - <T>_0| / hbar  in rad/s.
double charge_dispersion_perturbative(Complex t0, Complex t1, double eps0_ghz, int n_j);

struct DispersionOptions {
  int d = 15;
  int charge_cutoff = 0;
  Solver solver = Solver::dmrg;
  DmrgConfig dmrg;
  EdOptions ed;
};

struct DispersionResult {
  double delta_omega_rad_s = 0.0;
  double f_ng0_ghz = 0.0;    // tracked transition at n_g = 0
  double f_ng05_ghz = 0.0;   // at n_g = 0.5
  bool tracking_ok = true;   // overlap-based state matching succeeded
  double match_overlap = 1.0;
  int matched_index = 0;
};

// Fully numerical dispersion: difference of a tracked transition between
// uniform n_g = 0 and n_g = 0.5 runs.
DispersionResult charge_dispersion_full(const CircuitParams& p, int transition,
                                        const DispersionOptions& opts);

// 1/T_phi = |Delta omega_01| / (4 sqrt(N_J)); infinity at zero dispersion.
double tphi_cqps(double delta_omega_rad_s, int n_j);

// One dispersion working point: the fully numerical n_g = 0 vs 0.5 difference
// plus the perturbative estimate with <T> evaluated both from the DMRG
// eigenstates and from the single-mode model.
struct DispersionPoint {
  double z = 0.0;
  double phi_ext = 0.0;
  DispersionResult full;
  double eps0_ghz = 0.0;
  bool eps0_valid = true;
  Complex t0_dmrg, t1_dmrg;       // <T> from the n_g = 0 eigenstates
  Complex t0_sm, t1_sm;           // <T> from the single-mode model
  double delta_pert_dmrg_rad_s = 0.0;
  double delta_pert_sm_rad_s = 0.0;
};

DispersionPoint compute_dispersion_point(const CircuitParams& p, int transition,
                                         const DispersionOptions& opts,
                                         int single_mode_basis = 400);

struct FluxDispersion {
  double slope_rad_s_per_phi0 = 0.0;  // d omega / d Phi_ext (half-step estimate)
  double slope_full_step = 0.0;
  bool richardson_ok = true;          // full- and half-step agree within 1%
};

inline constexpr double kDefaultFluxStep = 1e-4;    // Phi0
// Slopes below this are treated as a vanishing first-order dispersion.
inline constexpr double kSlopeFloor = 2.0 * 3.14159265358979323846 * 1e6;  // rad/s per Phi0

// Central difference of transition `transition` at phi_ext, with a half-step
// Richardson self-check. The table must contain rows at phi_ext +- h and
// phi_ext +- h/2.
FluxDispersion flux_dispersion(const SpectrumTable& spec, int transition, double phi_ext,
                               double step = kDefaultFluxStep);

// Coherence decay  rho01(t)/rho01(0)  under 1/f flux noise:
// exp{-A^2 s^2 t^2 [(3/2 - gamma) - log(w_ir t)]}.
double flux_noise_coherence_ratio(double t_s, double slope_rad_s_per_phi0, double a_phi_phi0,
                                  double omega_ir_rad_s);

// Pure-dephasing time from the 1/e condition, solved by bracketed bisection
// on (0, 1/omega_ir]; infinity when the slope is below kSlopeFloor or no root
// exists below 1/omega_ir.
double tphi_flux(double slope_rad_s_per_phi0, double a_phi_phi0, double omega_ir_rad_s);

}  // namespace tncirc
