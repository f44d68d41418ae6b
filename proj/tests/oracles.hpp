#pragma once

// Independent dense reference implementations used as test oracles. These
// deliberately avoid the library's contraction/MPO machinery: everything is
// spelled out with explicit index loops and Kronecker products.

#include <cstdint>
#include <vector>

#include "tncirc/circuit.hpp"
#include "tncirc/mpo.hpp"
#include "tncirc/mps.hpp"

namespace tncirc::testing {

// Dense amplitude vector of bundle member `member` (site 0 index fastest).
Vector dense_state(const BundledMps& s, int member);

// Dense operator matrix of an MPO (site 0 index fastest), excluding the
// recorded scalar offset.
Matrix dense_operator(const Mpo& op);

// Direct Kronecker-product assembly of the circuit Hamiltonian from the site
// bases and the theta-basis couplings.
Matrix dense_hamiltonian(const CircuitOperators& ops, bool include_offset = true);

Matrix random_hermitian(Index n, std::uint64_t seed);
Matrix random_matrix(Index rows, Index cols, std::uint64_t seed);
BundledMps random_bundled_mps(const std::vector<Index>& phys_dims, Index bond, int k,
                              std::uint64_t seed);

// Apply a single-site operator to a dense vector (site 0 fastest).
Vector dense_apply_site_op(const Vector& v, const Matrix& op, int site,
                           const std::vector<Index>& dims);

}  // namespace tncirc::testing
