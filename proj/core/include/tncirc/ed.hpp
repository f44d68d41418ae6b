#pragma once

#include <cstdint>

#include "tncirc/circuit.hpp"
#include "tncirc/lanczos.hpp"

namespace tncirc {

struct EdOptions {
  int k = 1;
  double res_tol = 1e-8;
  int max_iter = 2000;
  Index max_basis = 36;          // bounded Lanczos basis for the iterative path
  std::uint64_t seed = kDefaultSeed;
  Index dense_threshold = 4096;  // largest Hilbert space diagonalized densely
  int charge_cutoff = 0;
  bool keep_vectors = true;
};

struct EdResult {
  std::vector<double> energies;  // k lowest, GHz
  Matrix vectors;                // product-basis eigenvectors (optional)
  bool converged = false;
  Index dimension = 0;

  std::vector<double> transitions_ghz() const;
};

// Dense circuit Hamiltonian in the product site eigenbasis (site 0 index
// fastest). Only sensible for small Hilbert spaces.
Matrix dense_circuit_hamiltonian(const CircuitOperators& ops);

// Exact diagonalization of the circuit in the product site basis: dense up to
// dense_threshold, matrix-free block Lanczos with a bounded (thick-restart)
// basis above it.
EdResult solve_ed(const CircuitParams& p, int d, const EdOptions& opts);
EdResult solve_ed(const CircuitOperators& ops, const EdOptions& opts);

// <v| T |w> with T the 2*pi collective charge displacement, for product-basis
// vectors from solve_ed.
Complex ed_t_expectation(const CircuitOperators& ops, const Vector& bra, const Vector& ket);

}  // namespace tncirc
