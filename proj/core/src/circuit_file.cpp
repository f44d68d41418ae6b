#include "tncirc/circuit_file.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tncirc/constants.hpp"

namespace tncirc {

namespace {

std::vector<double> parse_values(const std::string& text, const std::string& key) {
  std::istringstream ss(text);
  std::vector<double> out;
  std::string token;
  while (ss >> token) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument("circuit file: bad numeric value '" + token + "' for key '" +
                                  key + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("circuit file: no value for key '" + key + "'");
  return out;
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, const std::string& key) {
  if (v.size() == 1) return std::vector<double>(n, v[0]);
  if (v.size() == n) return v;
  throw std::invalid_argument("circuit file: key '" + key + "' needs 1 or " + std::to_string(n) +
                              " values, got " + std::to_string(v.size()));
}

}  // namespace

CircuitParams parse_circuit(std::istream& is) {
  std::map<std::string, std::vector<double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, rest;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = line.substr(0, eq);
      rest = line.substr(eq + 1);
    } else {
      std::istringstream ss(line);
      ss >> key;
      std::getline(ss, rest);
    }
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    key = strip(key);
    if (key.empty()) continue;
    if (entries.count(key)) {
      throw std::invalid_argument("circuit file: duplicate key '" + key + "' at line " +
                                  std::to_string(lineno));
    }
    entries[key] = parse_values(strip(rest), key);
  }

  auto take = [&](const std::string& key) -> std::vector<double> {
    auto it = entries.find(key);
    if (it == entries.end()) return {};
    std::vector<double> v = it->second;
    entries.erase(it);
    return v;
  };
  auto take_scalar = [&](const std::string& key, bool required, double fallback) -> double {
    const auto v = take(key);
    if (v.empty()) {
      if (required) throw std::invalid_argument("circuit file: missing key '" + key + "'");
      return fallback;
    }
    if (v.size() != 1) throw std::invalid_argument("circuit file: key '" + key + "' must be scalar");
    return v[0];
  };

  CircuitParams p;
  const double nj = take_scalar("n_junctions", true, 0.0);
  if (nj < 1.0 || nj != std::floor(nj)) {
    throw std::invalid_argument("circuit file: n_junctions must be a positive integer");
  }
  p.n_junctions = static_cast<int>(nj);
  const auto n = static_cast<std::size_t>(p.n_junctions);

  p.c_jb_ff = take_scalar("c_jb_fF", true, 0.0);
  p.e_jb_ghz = take_scalar("e_jb_GHz", true, 0.0);
  p.phi_ext = take_scalar("phi_ext", false, 0.0);

  const auto c_j = take("c_j_fF");
  const auto l_j = take("l_j_nH");
  const auto omega_p = take("omega_p_GHz");
  const auto z = take("z");
  if (!c_j.empty() || !l_j.empty()) {
    if (c_j.empty() || l_j.empty() || !omega_p.empty() || !z.empty()) {
      throw std::invalid_argument(
          "circuit file: junctions need either (c_j_fF, l_j_nH) or (omega_p_GHz, z)");
    }
    p.c_j_ff = broadcast(c_j, n, "c_j_fF");
    p.l_j_nh = broadcast(l_j, n, "l_j_nH");
  } else {
    if (omega_p.empty() || z.empty()) {
      throw std::invalid_argument(
          "circuit file: junctions need either (c_j_fF, l_j_nH) or (omega_p_GHz, z)");
    }
    const auto w = broadcast(omega_p, n, "omega_p_GHz");
    const auto zz = broadcast(z, n, "z");
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] <= 0.0 || zz[i] <= 0.0) {
        throw std::invalid_argument("circuit file: omega_p_GHz and z must be positive");
      }
      p.c_j_ff.push_back(constants::junction_capacitance_ff(w[i], zz[i]));
      p.l_j_nh.push_back(constants::junction_inductance_nh(w[i], zz[i]));
    }
  }

  auto island_array = [&](const std::string& key) {
    const auto v = take(key);
    if (v.empty()) return std::vector<double>(n + 1, 0.0);
    return broadcast(v, n + 1, key);
  };
  p.c0_ff = island_array("c0_fF");
  p.cg_ff = island_array("cg_fF");
  p.vg_v = island_array("vg_V");

  const auto ng = take("n_g");
  p.n_g = ng.empty() ? std::vector<double>(n, 0.0) : broadcast(ng, n, "n_g");

  if (!entries.empty()) {
    throw std::invalid_argument("circuit file: unknown key '" + entries.begin()->first + "'");
  }
  p.validate();
  return p;
}

CircuitParams parse_circuit_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open circuit file " + path);
  return parse_circuit(is);
}

CircuitParams parse_circuit_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_circuit(ss);
}

}  // namespace tncirc
