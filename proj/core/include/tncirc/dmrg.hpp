#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tncirc/circuit.hpp"
#include "tncirc/contraction.hpp"
#include "tncirc/lanczos.hpp"
#include "tncirc/mpo.hpp"
#include "tncirc/mps.hpp"

namespace tncirc {

struct DmrgConfig {
  int k_excitations = 1;
  Index max_bond = 64;
  double svd_cutoff = 1e-11;      // squared-weight truncation cutoff
  double eig_tol = 1e-12;         // eigenvalue tolerance of the local solves
  int max_sweeps = 40;
  double energy_convergence = 1e-12;  // per-state sweep-to-sweep change, GHz
  std::uint64_t seed = kDefaultSeed;
  // Local block-Lanczos controls. The residual tolerance is derived from
  // eig_tol (residual^2/gap accuracy); local_res_tol overrides it if > 0.
  double local_res_tol = 1e-8;
  int local_max_iter = 200;
  Index local_max_basis = 0;  // 0: automatic bound from k
  // Warm-up schedule: the bond cap starts at start_bond and doubles per
  // sweep until max_bond; local solves run at a loosened residual tolerance
  // while the energies are still moving. Convergence and the reported
  // truncation error count full-bond, full-tolerance sweeps only.
  Index start_bond = 8;

  void validate() const;
};

struct SweepRecord {
  int sweep = 0;
  double max_truncation_error = 0.0;
  std::vector<double> energies;       // per state, GHz (offset included)
  std::vector<double> energy_change;  // vs previous sweep
};

struct DmrgResult {
  std::vector<double> energies;  // k nondecreasing values, GHz
  BundledMps states;
  std::vector<SweepRecord> sweep_log;
  std::vector<bool> converged;   // per state
  double max_truncation_error = 0.0;
  int sweeps = 0;

  bool all_converged() const;
  std::vector<double> transitions_ghz() const;  // energies relative to the ground state
};

// Variational minimization of the k lowest eigenstates of `h` by two-site
// multi-targeted DMRG: the local solve is a block Lanczos carrying all k
// excitations, and the excitation index rides the two-site block, landing on
// the new orthogonality center after the truncated SVD split.
DmrgResult run_multitarget_dmrg(const Mpo& h, const BundledMps& init, const DmrgConfig& cfg);

// Bundle of k orthonormal start states: member 0 is the product of site
// ground states, members > 0 add deterministic pseudo-random low-level site
// excitations.
BundledMps default_initial_state(const std::vector<SiteBasis>& sites, int k,
                                 std::uint64_t seed = kDefaultSeed);

// Restartable checkpoints: DmrgResult in the binary container plus a JSON
// header echoing the configuration and sweep log.
void save_checkpoint(const std::string& path, const DmrgResult& result, const DmrgConfig& cfg);

struct DmrgCheckpoint {
  DmrgConfig config;
  DmrgResult result;
};
DmrgCheckpoint load_checkpoint(const std::string& path);

}  // namespace tncirc
