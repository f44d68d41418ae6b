#include "tncirc/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "tncirc/constants.hpp"

namespace tncirc {

namespace constants_ns = tncirc::constants;

Solver solver_from_string(const std::string& name) {
  if (name == "dmrg") return Solver::dmrg;
  if (name == "single-mode" || name == "single_mode") return Solver::single_mode;
  if (name == "ed") return Solver::ed;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

std::string to_string(Solver s) {
  switch (s) {
    case Solver::dmrg: return "dmrg";
    case Solver::single_mode: return "single-mode";
    case Solver::ed: return "ed";
  }
  return "?";
}

const SpectrumRow& SpectrumTable::row_at(double phi_ext, double tol) const {
  for (const auto& r : rows) {
    if (std::abs(r.phi_ext - phi_ext) <= tol) return r;
  }
  throw std::invalid_argument("SpectrumTable: no row at phi_ext = " + std::to_string(phi_ext));
}

SpectrumTable spectrum_sweep(const CircuitParams& p, const std::vector<double>& flux_grid,
                             Solver solver, int k, const SweepOptions& opts) {
  if (flux_grid.empty()) throw std::invalid_argument("spectrum_sweep: empty flux grid");
  if (k < 2) throw std::invalid_argument("spectrum_sweep: need at least two levels");
  SpectrumTable table;
  table.k_levels = k;

  // The effective model is flux independent; compute it once for the
  // single-mode solver.
  EffectiveModel eff;
  if (solver == Solver::single_mode) {
    eff = effective_model_from_circuit(p, opts.renormalize);
  }

  BundledMps warm;
  bool have_warm = false;
  for (double phi : flux_grid) {
    SpectrumRow row;
    row.phi_ext = phi;
    row.n_g = p.n_g.empty() ? 0.0 : p.n_g[0];
    row.solver = solver;
    try {
      CircuitParams pp = p;
      pp.phi_ext = phi;
      switch (solver) {
        case Solver::dmrg: {
          CircuitOperators ops = build_circuit_operators(pp, opts.d, opts.charge_cutoff);
          DmrgConfig cfg = opts.dmrg;
          cfg.k_excitations = k;
          BundledMps init = (opts.warm_start && have_warm)
                                ? warm
                                : default_initial_state(ops.sites, k, cfg.seed);
          DmrgResult res = run_multitarget_dmrg(ops.hamiltonian, init, cfg);
          row.transitions_ghz = res.transitions_ghz();
          row.converged = res.all_converged();
          row.max_truncation_error = res.max_truncation_error;
          row.sweeps = res.sweeps;
          warm = res.states;
          have_warm = true;
          break;
        }
        case Solver::single_mode: {
          SingleModeResult res =
              diagonalize_single_mode(eff, phi, k, opts.single_mode_basis, true);
          row.transitions_ghz = res.transitions_ghz();
          row.converged = true;
          for (bool c : res.level_converged) row.converged = row.converged && c;
          break;
        }
        case Solver::ed: {
          EdOptions eopts = opts.ed;
          eopts.k = k;
          eopts.charge_cutoff = opts.charge_cutoff;
          EdResult res = solve_ed(pp, opts.d, eopts);
          row.transitions_ghz = res.transitions_ghz();
          row.converged = res.converged;
          break;
        }
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
      row.converged = false;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Matrix site_populations(const BundledMps& states, const std::vector<SiteBasis>& site_bases,
                        double omega_p_ghz) {
  if (static_cast<int>(site_bases.size()) != states.n_sites()) {
    throw std::invalid_argument("site_populations: site basis count mismatch");
  }
  if (omega_p_ghz <= 0.0) throw std::invalid_argument("site_populations: omega_p must be positive");
  std::vector<Matrix> ops;
  for (const auto& s : site_bases) ops.push_back(s.op_h0);
  return site_expectations(states, ops) / omega_p_ghz;
}

PhaseProfile phase_profile(const BundledMps& states, const std::vector<SiteBasis>& site_bases,
                           int member) {
  if (member < 0 || member >= states.excitation_count) {
    throw std::invalid_argument("phase_profile: member out of range");
  }
  std::vector<Matrix> ops;
  for (const auto& s : site_bases) ops.push_back(s.op_exp_itheta);
  const Matrix exp_theta = site_expectations(states, ops);

  PhaseProfile out;
  double cumulative = 0.0;
  for (int i = 0; i < states.n_sites(); ++i) {
    const Complex v = exp_theta(member, i);
    const bool ok = std::abs(v) >= 1e-6;
    out.defined.push_back(ok);
    if (ok) cumulative += std::arg(v);
    out.drop.push_back(cumulative);
  }
  return out;
}

CqpsAmplitude cqps_epsilon(double z, double omega_p_ghz) {
  if (z <= 0.0) throw std::invalid_argument("cqps_epsilon: z must be positive");
  CqpsAmplitude out;
  out.value_ghz = 8.0 * std::sqrt(2.0) * omega_p_ghz * std::exp(-4.0 / (constants_ns::pi * z)) /
                  std::sqrt(constants_ns::pi * z);
  out.low_impedance_valid = z <= 0.1;
  return out;
}

double charge_dispersion_perturbative(Complex t0, Complex t1, double eps0_ghz, int n_j) {
  if (std::abs(t0) > 1.0 + 1e-8 || std::abs(t1) > 1.0 + 1e-8) {
    throw std::invalid_argument("charge_dispersion_perturbative: |<T>| exceeds 1");
  }
  const double eps0_rad_s = 2.0 * constants_ns::pi * eps0_ghz * 1e9;
  return 2.0 * static_cast<double>(n_j) * eps0_rad_s * std::abs(t1 - t0);
}

namespace {

// Overlap-based tracking of the transition between the n_g = 0 and 0.5 runs,
// with a fallback to energy ordering when the overlap match is ambiguous
// (near the sweet spot the fluxon pair rotates under the offset charge).
DispersionResult match_and_diff(const std::vector<double>& e0, const std::vector<double>& e5,
                                const Matrix& overlap, int transition) {
  DispersionResult out;
  Index best = 0;
  const double mag = overlap.row(transition).cwiseAbs().maxCoeff(&best);
  out.match_overlap = mag;
  out.tracking_ok = mag >= 0.5;
  Index ground = 0;
  const double ground_mag = overlap.row(0).cwiseAbs().maxCoeff(&ground);
  if (!out.tracking_ok || ground_mag < 0.5) {
    best = transition;
    ground = 0;
  }
  out.matched_index = static_cast<int>(best);
  out.f_ng0_ghz = e0[static_cast<std::size_t>(transition)] - e0[0];
  out.f_ng05_ghz =
      e5[static_cast<std::size_t>(best)] - e5[static_cast<std::size_t>(ground)];
  out.delta_omega_rad_s =
      2.0 * constants_ns::pi * std::abs(out.f_ng0_ghz - out.f_ng05_ghz) * 1e9;
  return out;
}

}  // namespace

DispersionResult charge_dispersion_full(const CircuitParams& p, int transition,
                                        const DispersionOptions& opts) {
  if (transition < 1) throw std::invalid_argument("charge_dispersion_full: transition must be >= 1");
  const int k = transition + 1;

  CircuitParams p0 = p;
  p0.set_uniform_ng(0.0);
  CircuitParams p5 = p;
  p5.set_uniform_ng(0.5);

  if (opts.solver == Solver::dmrg) {
    DmrgConfig cfg = opts.dmrg;
    cfg.k_excitations = k;
    CircuitOperators ops0 = build_circuit_operators(p0, opts.d, opts.charge_cutoff);
    CircuitOperators ops5 = build_circuit_operators(p5, opts.d, opts.charge_cutoff);
    DmrgResult r0 = run_multitarget_dmrg(ops0.hamiltonian,
                                         default_initial_state(ops0.sites, k, cfg.seed), cfg);
    DmrgResult r5 = run_multitarget_dmrg(ops5.hamiltonian,
                                         default_initial_state(ops5.sites, k, cfg.seed), cfg);
    return match_and_diff(r0.energies, r5.energies, bundle_overlap(r0.states, r5.states),
                          transition);
  }
  if (opts.solver == Solver::ed) {
    EdOptions eopts = opts.ed;
    eopts.k = k;
    eopts.charge_cutoff = opts.charge_cutoff;
    eopts.keep_vectors = true;
    EdResult r0 = solve_ed(p0, opts.d, eopts);
    EdResult r5 = solve_ed(p5, opts.d, eopts);
    return match_and_diff(r0.energies, r5.energies, r0.vectors.adjoint() * r5.vectors, transition);
  }
  throw std::invalid_argument("charge_dispersion_full: solver must be dmrg or ed");
}

DispersionPoint compute_dispersion_point(const CircuitParams& p, int transition,
                                         const DispersionOptions& opts, int single_mode_basis) {
  if (transition < 1) throw std::invalid_argument("compute_dispersion_point: transition must be >= 1");
  const int k = transition + 1;
  DispersionPoint out;
  out.z = p.reduced_impedance(0);
  out.phi_ext = p.phi_ext;
  const CqpsAmplitude eps = cqps_epsilon(out.z, p.omega_p_ghz(0));
  out.eps0_ghz = eps.value_ghz;
  out.eps0_valid = eps.low_impedance_valid;

  CircuitParams p0 = p;
  p0.set_uniform_ng(0.0);
  CircuitParams p5 = p;
  p5.set_uniform_ng(0.5);

  if (opts.solver == Solver::dmrg) {
    DmrgConfig cfg = opts.dmrg;
    cfg.k_excitations = k;
    CircuitOperators ops0 = build_circuit_operators(p0, opts.d, opts.charge_cutoff);
    CircuitOperators ops5 = build_circuit_operators(p5, opts.d, opts.charge_cutoff);
    DmrgResult r0 = run_multitarget_dmrg(ops0.hamiltonian,
                                         default_initial_state(ops0.sites, k, cfg.seed), cfg);
    DmrgResult r5 = run_multitarget_dmrg(ops5.hamiltonian,
                                         default_initial_state(ops5.sites, k, cfg.seed), cfg);
    out.full = match_and_diff(r0.energies, r5.energies, bundle_overlap(r0.states, r5.states),
                              transition);
    const Matrix t_el = mpo_matrix_elements(r0.states, t_string_mpo(ops0.sites), r0.states);
    out.t0_dmrg = t_el(0, 0);
    out.t1_dmrg = t_el(transition, transition);
  } else if (opts.solver == Solver::ed) {
    EdOptions eopts = opts.ed;
    eopts.k = k;
    eopts.charge_cutoff = opts.charge_cutoff;
    eopts.keep_vectors = true;
    CircuitOperators ops0 = build_circuit_operators(
        p0, opts.d, eopts.charge_cutoff > 0 ? eopts.charge_cutoff : default_charge_cutoff(opts.d));
    EdResult r0 = solve_ed(ops0, eopts);
    EdResult r5 = solve_ed(p5, opts.d, eopts);
    out.full = match_and_diff(r0.energies, r5.energies, r0.vectors.adjoint() * r5.vectors,
                              transition);
    out.t0_dmrg = ed_t_expectation(ops0, r0.vectors.col(0), r0.vectors.col(0));
    out.t1_dmrg = ed_t_expectation(ops0, r0.vectors.col(transition), r0.vectors.col(transition));
  } else {
    throw std::invalid_argument("compute_dispersion_point: solver must be dmrg or ed");
  }

  const EffectiveModel eff = effective_model_from_circuit(p0, true);
  const SingleModeResult sm = diagonalize_single_mode(eff, p.phi_ext, k, single_mode_basis, true);
  out.t0_sm = sm.op_t(0, 0);
  out.t1_sm = sm.op_t(transition, transition);

  auto clamp_t = [](Complex t) {
    const double mag = std::abs(t);
    return mag > 1.0 ? t / mag : t;
  };
  out.delta_pert_dmrg_rad_s = charge_dispersion_perturbative(
      clamp_t(out.t0_dmrg), clamp_t(out.t1_dmrg), out.eps0_ghz, p.n_junctions);
  out.delta_pert_sm_rad_s = charge_dispersion_perturbative(
      clamp_t(out.t0_sm), clamp_t(out.t1_sm), out.eps0_ghz, p.n_junctions);
  return out;
}

double tphi_cqps(double delta_omega_rad_s, int n_j) {
  if (delta_omega_rad_s < 0.0) throw std::invalid_argument("tphi_cqps: negative dispersion");
  if (delta_omega_rad_s == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * std::sqrt(static_cast<double>(n_j)) / delta_omega_rad_s;
}

FluxDispersion flux_dispersion(const SpectrumTable& spec, int transition, double phi_ext,
                               double step) {
  if (transition < 1 || transition > spec.k_levels - 1) {
    throw std::invalid_argument("flux_dispersion: transition out of range");
  }
  auto value = [&](double phi) {
    const SpectrumRow& row = spec.row_at(phi, step * 1e-6);
    if (!row.error.empty()) {
      throw std::invalid_argument("flux_dispersion: solver failed at phi = " + std::to_string(phi));
    }
    return row.transitions_ghz.at(static_cast<std::size_t>(transition - 1));
  };
  const double to_rad_s = 2.0 * constants_ns::pi * 1e9;
  FluxDispersion out;
  out.slope_full_step = (value(phi_ext + step) - value(phi_ext - step)) / (2.0 * step) * to_rad_s;
  out.slope_rad_s_per_phi0 =
      (value(phi_ext + 0.5 * step) - value(phi_ext - 0.5 * step)) / step * to_rad_s;
  const double s1 = std::abs(out.slope_full_step);
  const double s2 = std::abs(out.slope_rad_s_per_phi0);
  if (s1 < kSlopeFloor && s2 < kSlopeFloor) {
    out.slope_rad_s_per_phi0 = 0.0;
    out.richardson_ok = true;
  } else {
    out.richardson_ok =
        std::abs(out.slope_full_step - out.slope_rad_s_per_phi0) <= 0.01 * std::max(s1, s2);
  }
  return out;
}

double flux_noise_coherence_ratio(double t_s, double slope_rad_s_per_phi0, double a_phi_phi0,
                                  double omega_ir_rad_s) {
  if (t_s <= 0.0) return 1.0;
  const double as = a_phi_phi0 * slope_rad_s_per_phi0;
  const double expo = as * as * t_s * t_s *
                      ((1.5 - constants_ns::euler_gamma) - std::log(omega_ir_rad_s * t_s));
  return std::exp(-expo);
}

double tphi_flux(double slope_rad_s_per_phi0, double a_phi_phi0, double omega_ir_rad_s) {
  if (a_phi_phi0 <= 0.0) throw std::invalid_argument("tphi_flux: flux-noise amplitude must be positive");
  if (omega_ir_rad_s <= 0.0) throw std::invalid_argument("tphi_flux: omega_ir must be positive");
  const double slope = std::abs(slope_rad_s_per_phi0);
  if (slope < kSlopeFloor) return std::numeric_limits<double>::infinity();

  auto exponent = [&](double t) {
    const double as = a_phi_phi0 * slope;
    return as * as * t * t * ((1.5 - constants_ns::euler_gamma) - std::log(omega_ir_rad_s * t));
  };
  const double t_hi0 = 1.0 / omega_ir_rad_s;
  if (exponent(t_hi0) < 1.0) return std::numeric_limits<double>::infinity();

  // Exponent is monotone on (0, 1/omega_ir); bisect the 1/e crossing in log
  // time so the relative precision is uniform.
  double lo = std::log(t_hi0) - 120.0;
  double hi = std::log(t_hi0);
  for (int it = 0; it < 300 && (hi - lo) > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (exponent(std::exp(mid)) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace tncirc
