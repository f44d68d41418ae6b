#pragma once

#include <vector>

#include "tncirc/circuit.hpp"
#include "tncirc/tensor.hpp"

namespace tncirc {

// Classical normal-mode data of the junction array after the recursive
// capacitance decoupling. Mode 0 is the superinductance-like mode phi'; modes
// n >= 1 are the internal array modes that get traced out.
struct DecoupledModes {
  RealMatrix block_cap;     // C_X, diagonal up to numerical noise (fF)
  RealMatrix mode_vectors;  // v(n, i) = d theta_i / d phi^(n)
  RealVector big_v;         // V_n = sum_i v_ni
  RealVector c_n_ff;        // effective mode capacitances
  RealVector l_n_nh;        // effective mode inductances
  RealVector z_n;           // reduced impedances sqrt(L_n/C_n)/R_Q

  int n_modes() const { return static_cast<int>(c_n_ff.size()); }
  double max_off_diagonal_ratio() const;
};

struct EffectiveModel {
  double e_c_ghz = 0.0;
  double e_l_ghz = 0.0;
  double e_j_ghz = 0.0;
  std::vector<double> x_i;  // per-junction cosine renormalization factors
  double x_b = 1.0;         // black-sheep renormalization factor
  int n_junctions = 1;
};

// Successive basis changes R^(1)..R^(N_J-1) that diagonalize the junction
// block of the capacitance matrix, each step decoupling one mode. The
// coefficients are a_k = (s * colsum_k - total) / total over the active
// block (size s, pivot included), the generalization that reduces to the
// first-step formula and makes the decoupling exact.
DecoupledModes recursive_decoupling(const ThetaHamiltonian& h);

// Effective single-mode parameters: charging energy of the phi' mode,
// vacuum-renormalization factors x_i / x_b from tracing the n >= 1 modes, and
// the resulting inductive and Josephson energies. With renormalize = false
// all x factors are pinned to 1 (the linear-theory baseline).
EffectiveModel effective_params(const DecoupledModes& modes, const ThetaHamiltonian& h,
                                bool renormalize = true);

struct SingleModeResult {
  RealVector energies;       // lowest n_levels, GHz
  std::vector<bool> level_converged;
  Matrix op_n;               // n' in the eigenbasis
  Matrix op_exp_iphi;        // e^{i phi'}
  Matrix op_t;               // T = e^{-i 2 pi n'}
  double basis_frequency_ghz = 0.0;

  std::vector<double> transitions_ghz() const;
};

// Exact diagonalization of the single-mode Hamiltonian in the harmonic
// eigenbasis of its quadratic part. full_cosine = true keeps the array
// potential -N_J^2 E_L cos(phi'/N_J); false uses E_L phi'^2 / 2. Periodic
// operators are built from exact displacement-operator matrix elements.
SingleModeResult diagonalize_single_mode(const EffectiveModel& m, double phi_ext, int n_levels,
                                         int basis_size = 400, bool full_cosine = true);

// Convenience pipeline: circuit parameters -> effective model.
EffectiveModel effective_model_from_circuit(const CircuitParams& p, bool renormalize = true);

// <m|exp(beta a^dag - conj(beta) a)|n> on an M-dimensional oscillator basis.
Matrix displacement_matrix(Complex beta, int basis_size);

}  // namespace tncirc
