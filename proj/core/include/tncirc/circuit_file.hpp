#pragma once

#include <iosfwd>
#include <string>

#include "tncirc/circuit.hpp"

namespace tncirc {

// Flat key-value circuit description. One `key = value...` entry per line,
// `#` comments. Scalar keys: n_junctions, c_jb_fF, e_jb_GHz, phi_ext, and the
// junction parameters either as (omega_p_GHz, z) or as (c_j_fF, l_j_nH).
// c0_fF, cg_fF, vg_V, n_g, c_j_fF and l_j_nH accept a scalar (applied
// uniformly) or a full per-element list.
CircuitParams parse_circuit(std::istream& is);
CircuitParams parse_circuit_file(const std::string& path);
CircuitParams parse_circuit_string(const std::string& text);

}  // namespace tncirc
