#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tncirc/mpo.hpp"
#include "tncirc/tensor.hpp"

namespace tncirc {

// Lumped-element description of a fluxonium-class circuit: a black-sheep
// junction shunted by an array of N_J junctions, with per-island ground and
// gate capacitances. Units: fF, nH, GHz (energies as E/h), flux in Phi0.
struct CircuitParams {
  int n_junctions = 1;
  double c_jb_ff = 0.0;   // black-sheep capacitance (junction + shunt)
  double e_jb_ghz = 0.0;  // black-sheep Josephson energy
  std::vector<double> c_j_ff;  // array junction capacitances, size N_J
  std::vector<double> l_j_nh;  // array junction inductances, size N_J
  std::vector<double> c0_ff;   // ground capacitances, islands 0..N_J
  std::vector<double> cg_ff;   // gate capacitances, islands 0..N_J
  std::vector<double> vg_v;    // gate voltages, islands 0..N_J
  std::vector<double> n_g;     // per-junction offset charges (Cooper pairs)
  double phi_ext = 0.0;        // external flux in units of Phi0

  static CircuitParams homogeneous(int n_junctions, double c_jb_ff, double e_jb_ghz,
                                   double omega_p_ghz, double z, double c0_ff = 0.0,
                                   double phi_ext = 0.0, double n_g = 0.0);

  double omega_p_ghz(int junction) const;  // plasma frequency omega_p/2pi
  double reduced_impedance(int junction) const;
  void set_uniform_ng(double value);
  void validate() const;
};

// Charge-basis site Hamiltonian  4 E_C (n - n_g)^2 - E_J cos(theta)
// diagonalized and truncated to its d lowest eigenstates, with the operators
// needed by the MPO builder projected onto that basis.
struct SiteBasis {
  int d = 0;
  double e_c_ghz = 0.0, e_j_ghz = 0.0, n_g = 0.0;
  int charge_cutoff = 0;
  RealVector energies;     // lowest d eigenvalues, GHz
  Matrix op_h0;            // diagonal site Hamiltonian
  Matrix op_n;             // Cooper-pair number
  Matrix op_exp_itheta;    // e^{i theta} (charge raising)
  Matrix op_cos;           // cos(theta)
  RealMatrix eigvecs;      // charge-basis eigenvectors, (2*cutoff+1) x d
  RealVector charge_values;

  double ground_energy() const { return energies[0]; }
  // e^{i alpha n} projected onto the retained eigenstates.
  Matrix phase_op(double alpha) const;
};

// Hamiltonian data in the junction-phase basis after the R transform and the
// removal of the cyclic sigma mode.
struct ThetaHamiltonian {
  RealMatrix inv_cap;             // [C_Theta^{-1}] block, 1/fF
  std::vector<double> e_j_ghz;    // array Josephson energies
  RealVector q_g;                 // gate-network offset charges, Cooper pairs
  std::vector<double> n_g_site;   // effective per-junction offsets (n_g + q_g)
  double e_jb_ghz = 0.0;
  double phi_ext = 0.0;
  double sigma_coupling = 0.0;    // largest dropped sigma-theta entry, fF

  double site_charging_energy_ghz(int junction) const;
  double pair_coupling_ghz(int i, int j) const;  // hbar g_ij as energy/h
};

int default_charge_cutoff(int d);

// Node capacitance matrix C_Phi of the circuit Lagrangian: junction and
// ground capacitances only (gate capacitances are added by theta_transform).
RealMatrix capacitance_matrix(const CircuitParams& p);

// The (N_J+1)-dimensional change of basis to junction phase differences plus
// the cyclic mode, Theta = R * Phi.
RealMatrix r_matrix(int n_junctions);

ThetaHamiltonian theta_transform(const CircuitParams& p);

SiteBasis site_eigenbasis(double e_c_ghz, double e_j_ghz, double n_g, int d, int charge_cutoff);

struct CircuitOperators {
  Mpo hamiltonian;                // site terms shifted; scalar in energy_offset
  std::vector<SiteBasis> sites;
  ThetaHamiltonian theta;
};

CircuitOperators build_circuit_operators(const CircuitParams& p, int d, int charge_cutoff = 0);

// Full circuit Hamiltonian as a compressed MPO (plus its recorded scalar
// offset): site terms, all-to-all charge coupling from the inverse
// capacitance matrix, and the two black-sheep cosine strings.
Mpo build_hamiltonian_mpo(const CircuitParams& p, int d);

// 2*pi displacement operator of the collective charge,
// T = prod_i e^{-i 2 pi n_i / N_J}, a bond-dimension-1 MPO.
Mpo t_string_mpo(const std::vector<SiteBasis>& sites);

}  // namespace tncirc
