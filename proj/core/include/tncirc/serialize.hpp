#pragma once

#include <iosfwd>
#include <string>

#include "tncirc/mpo.hpp"
#include "tncirc/mps.hpp"

namespace tncirc {

// Self-describing binary container for tensor-network objects: magic "TNCB",
// format version, a JSON metadata string, and little-endian complex-double
// tensor payloads with explicit shapes.
inline constexpr std::uint32_t kContainerVersion = 1;

void save_mps(std::ostream& os, const BundledMps& state, const std::string& meta_json = "{}");
BundledMps load_mps(std::istream& is, std::string* meta_json = nullptr);

void save_mpo(std::ostream& os, const Mpo& op, const std::string& meta_json = "{}");
Mpo load_mpo(std::istream& is, std::string* meta_json = nullptr);

void save_mps_file(const std::string& path, const BundledMps& state,
                   const std::string& meta_json = "{}");
BundledMps load_mps_file(const std::string& path, std::string* meta_json = nullptr);

}  // namespace tncirc
