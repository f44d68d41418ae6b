#include "tncirc/dmrg.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "tncirc/serialize.hpp"
#include "tncirc/svd.hpp"

namespace tncirc {

void DmrgConfig::validate() const {
  if (k_excitations < 1) throw std::invalid_argument("DmrgConfig: k_excitations must be >= 1");
  if (max_bond < 1) throw std::invalid_argument("DmrgConfig: max_bond must be >= 1");
  if (svd_cutoff < 0.0) throw std::invalid_argument("DmrgConfig: svd_cutoff must be >= 0");
  if (eig_tol <= 0.0) throw std::invalid_argument("DmrgConfig: eig_tol must be > 0");
  if (energy_convergence <= 0.0) {
    throw std::invalid_argument("DmrgConfig: energy_convergence must be > 0");
  }
  if (max_sweeps < 1) throw std::invalid_argument("DmrgConfig: max_sweeps must be >= 1");
}

bool DmrgResult::all_converged() const {
  for (bool c : converged) {
    if (!c) return false;
  }
  return !converged.empty();
}

std::vector<double> DmrgResult::transitions_ghz() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < energies.size(); ++i) out.push_back(energies[i] - energies[0]);
  return out;
}

namespace {

// Merge the center at site i with its right neighbor into (l, d1, d2, r, e).
DenseTensor merge_with_right(const BundledMps& s, int i) {
  const DenseTensor& c = s.site(i);
  const DenseTensor& a = s.site(i + 1);
  const Index l = c.dim(0), d1 = c.dim(1), m = c.dim(2), k = c.dim(3);
  const Index d2 = a.dim(1), r = a.dim(2);
  DenseTensor cp = c.permute({0, 1, 3, 2});  // (l,d1,e,m)
  DenseTensor theta = contract_last_first(cp.reshape({l * d1 * k, m}), a);
  return theta.reshape({l, d1, k, d2, r}).permute({0, 1, 3, 4, 2});
}

// Merge a left-orthonormal site with the center at i+1 into (l, d1, d2, r, e).
DenseTensor merge_with_left(const BundledMps& s, int i) {
  const DenseTensor& a = s.site(i);
  const DenseTensor& c = s.site(i + 1);
  const Index l = a.dim(0), d1 = a.dim(1), m = a.dim(2);
  const Index d2 = c.dim(1), r = c.dim(2), k = c.dim(3);
  DenseTensor theta = contract_last_first(a, c.reshape({m, d2 * r * k}));
  return theta.reshape({l, d1, d2, r, k});
}

struct LocalSolveStats {
  RealVector energies;
  double truncation_error = 0.0;
};

}  // namespace

DmrgResult run_multitarget_dmrg(const Mpo& h, const BundledMps& init, const DmrgConfig& cfg) {
  cfg.validate();
  h.check_valid();
  init.check_valid();
  const int n = h.n_sites();
  const int k = cfg.k_excitations;
  if (init.n_sites() != n) throw std::invalid_argument("run_multitarget_dmrg: site count mismatch");
  if (init.excitation_count != k) {
    throw std::invalid_argument("run_multitarget_dmrg: initial bundle must carry k states");
  }
  for (int i = 0; i < n; ++i) {
    if (init.phys_dim(i) != h.phys_dim(i)) {
      throw std::invalid_argument("run_multitarget_dmrg: physical dimension mismatch");
    }
  }

  DmrgResult res;
  res.states = canonicalize(init, 0);
  res.converged.assign(static_cast<std::size_t>(k), false);

  LanczosOptions lopts;
  lopts.tol = cfg.local_res_tol > 0.0 ? cfg.local_res_tol : 1e-8;
  lopts.max_iter = cfg.local_max_iter;
  lopts.max_basis = cfg.local_max_basis;
  lopts.check_hermiticity = true;

  // Single-site chain: one dense local solve.
  if (n == 1) {
    const DenseTensor& w = h.site(0);
    const Index d = w.dim(1);
    Matrix hloc(d, d);
    for (Index a = 0; a < d; ++a) {
      for (Index b = 0; b < d; ++b) hloc(a, b) = w({0, a, b, 0});
    }
    const double asym = (hloc - hloc.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(1.0, hloc.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("run_multitarget_dmrg: local operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hloc);
    DenseTensor c({1, d, 1, k});
    for (int e = 0; e < k; ++e) {
      for (Index s = 0; s < d; ++s) c({0, s, 0, e}) = es.eigenvectors()(s, e);
    }
    res.states.tensors[0] = std::move(c);
    res.states.center = 0;
    res.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    for (double& e : res.energies) e += h.energy_offset;
    res.converged.assign(static_cast<std::size_t>(k), true);
    res.sweeps = 1;
    SweepRecord rec;
    rec.sweep = 1;
    rec.energies = res.energies;
    rec.energy_change.assign(static_cast<std::size_t>(k), 0.0);
    res.sweep_log.push_back(rec);
    return res;
  }

  // Environments: lenv[i] covers sites < i, renv[i] covers sites > i.
  std::vector<DenseTensor> lenv(static_cast<std::size_t>(n)), renv(static_cast<std::size_t>(n));
  lenv[0] = make_boundary_env();
  renv[static_cast<std::size_t>(n - 1)] = make_boundary_env();
  for (int i = n - 1; i >= 2; --i) {
    renv[static_cast<std::size_t>(i - 1)] =
        update_right_env(renv[static_cast<std::size_t>(i)], res.states.site(i), h.site(i),
                         res.states.site(i));
  }

  std::vector<double> prev_energies;
  std::uint64_t solve_counter = 0;
  Index bond_cap = std::min(std::max<Index>(cfg.start_bond, 1), cfg.max_bond);
  double tol_scale = 1e4;  // loosened local tolerance during warm-up sweeps

  auto local_solve = [&](int i, bool to_right) -> LocalSolveStats {
    DenseTensor theta = res.states.center == i ? merge_with_right(res.states, i)
                                               : merge_with_left(res.states, i);
    const Index l = theta.dim(0), d1 = theta.dim(1), d2 = theta.dim(2), r = theta.dim(3);
    const Index dim = l * d1 * d2 * r;

    TwoSiteOperator op(lenv[static_cast<std::size_t>(i)], h.site(i), h.site(i + 1),
                       renv[static_cast<std::size_t>(i + 1)]);
    LanczosOptions opts = lopts;
    opts.tol = lopts.tol * tol_scale;
    // Warm-up sweeps improve the state a little and move on; the final
    // full-tolerance sweeps polish with the full iteration budget.
    if (tol_scale > 1.0) opts.max_iter = std::min(opts.max_iter, 12);
    if (cfg.local_max_basis <= 0) {
      // Bound the Krylov basis by a ~0.5 GB memory budget; small local
      // problems run unrestarted.
      const Index budget = (Index(1) << 29) / (16 * std::max<Index>(dim, 1));
      opts.max_basis = std::clamp<Index>(budget, 3 * k, 144);
      if (opts.max_basis >= dim) opts.max_basis = 0;
    }
    opts.seed = cfg.seed + 0x9e3779b97f4a7c15ull * (++solve_counter);
    Eigen::Map<const Matrix> init_block(theta.data().data(), dim, k);
    LanczosResult lr = block_lanczos(
        [&op](const Matrix& in, Matrix& out) { op.apply(in, out); }, init_block, k, opts);

    DenseTensor solution({l, d1, d2, r, k},
                         Eigen::Map<const Vector>(lr.vectors.data(), dim * k));

    LocalSolveStats stats;
    stats.energies = lr.values;
    if (to_right) {
      // Split (l d1 | d2 r e); excitation index lands on site i+1.
      const SvdResult svd = truncated_svd(solution.as_matrix(2), cfg.svd_cutoff, bond_cap);
      const Index m = svd.s.size();
      stats.truncation_error = svd.truncation_error;
      DenseTensor a({l, d1, m});
      a.as_matrix(2) = svd.u;
      DenseTensor c({m, d2, r, k});
      c.as_matrix(1) = svd.s.cast<Complex>().asDiagonal() * svd.vh;
      res.states.site(i) = std::move(a);
      res.states.site(i + 1) = std::move(c);
      res.states.center = i + 1;
      lenv[static_cast<std::size_t>(i + 1)] = update_left_env(
          lenv[static_cast<std::size_t>(i)], res.states.site(i), h.site(i), res.states.site(i));
    } else {
      // Split (l d1 e | d2 r); excitation index lands on site i.
      DenseTensor perm = solution.permute({0, 1, 4, 2, 3});  // (l,d1,e,d2,r)
      const SvdResult svd = truncated_svd(perm.as_matrix(3), cfg.svd_cutoff, bond_cap);
      const Index m = svd.s.size();
      stats.truncation_error = svd.truncation_error;
      DenseTensor c({l, d1, k, m});
      c.as_matrix(3) = svd.u * svd.s.cast<Complex>().asDiagonal();
      DenseTensor b({m, d2, r});
      b.as_matrix(1) = svd.vh;
      res.states.site(i) = c.permute({0, 1, 3, 2});
      res.states.site(i + 1) = std::move(b);
      res.states.center = i;
      renv[static_cast<std::size_t>(i)] = update_right_env(
          renv[static_cast<std::size_t>(i + 1)], res.states.site(i + 1), h.site(i + 1),
          res.states.site(i + 1));
    }
    return stats;
  };

  const bool trace = std::getenv("TNCIRC_DMRG_TRACE") != nullptr;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const auto sweep_start = std::chrono::steady_clock::now();
    const bool full_quality = bond_cap >= cfg.max_bond && tol_scale == 1.0;
    double max_trunc = 0.0;
    RealVector last_energies;
    for (int i = 0; i + 1 < n; ++i) {
      LocalSolveStats st = local_solve(i, true);
      max_trunc = std::max(max_trunc, st.truncation_error);
      last_energies = st.energies;
    }
    for (int i = n - 2; i >= 0; --i) {
      LocalSolveStats st = local_solve(i, false);
      max_trunc = std::max(max_trunc, st.truncation_error);
      last_energies = st.energies;
    }

    SweepRecord rec;
    rec.sweep = sweep;
    rec.max_truncation_error = max_trunc;
    // The reported truncation error measures the converged state: warm-up
    // sweeps at reduced bond caps are re-optimized afterwards.
    if (full_quality) {
      res.max_truncation_error = std::max(res.max_truncation_error, max_trunc);
    }
    rec.energies.resize(static_cast<std::size_t>(k));
    rec.energy_change.assign(static_cast<std::size_t>(k), 0.0);
    for (int e = 0; e < k; ++e) {
      rec.energies[static_cast<std::size_t>(e)] = last_energies[e] + h.energy_offset;
    }
    bool all_ok = full_quality && !prev_energies.empty();
    for (int e = 0; e < k; ++e) {
      if (!prev_energies.empty()) {
        const double change =
            std::abs(rec.energies[static_cast<std::size_t>(e)] - prev_energies[static_cast<std::size_t>(e)]);
        rec.energy_change[static_cast<std::size_t>(e)] = change;
        res.converged[static_cast<std::size_t>(e)] = full_quality && change < cfg.energy_convergence;
        if (!res.converged[static_cast<std::size_t>(e)]) all_ok = false;
      }
    }
    prev_energies = rec.energies;
    res.energies = rec.energies;
    res.sweep_log.push_back(rec);
    res.sweeps = sweep;
    if (trace) {
      Index maxb = 1;
      for (Index b : res.states.bond_dims()) maxb = std::max(maxb, b);
      double mc = 0.0;
      for (double ch : rec.energy_change) mc = std::max(mc, ch);
      std::fprintf(stderr,
                   "[dmrg] sweep %d: %.2f s, bond cap %ld (max %ld), tol x%g, E0 %.9f, "
                   "max change %.3e, trunc %.3e\n",
                   sweep,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start)
                       .count(),
                   static_cast<long>(bond_cap), static_cast<long>(maxb), tol_scale,
                   rec.energies[0], mc, max_trunc);
    }
    if (all_ok) break;

    // Advance the warm-up schedule: grow the bond cap, then run at full
    // tolerance.
    if (bond_cap < cfg.max_bond) {
      bond_cap = std::min<Index>(cfg.max_bond, 2 * bond_cap);
    } else {
      tol_scale = 1.0;
    }
  }
  return res;
}

BundledMps default_initial_state(const std::vector<SiteBasis>& sites, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("default_initial_state: k must be >= 1");
  const int n = static_cast<int>(sites.size());
  if (n < 1) throw std::invalid_argument("default_initial_state: no sites");
  const Index d = sites[0].d;
  if (k > 1 && d < 2) {
    throw std::invalid_argument("default_initial_state: k > 1 needs at least two site levels");
  }

  std::vector<std::vector<Vector>> members;
  for (int e = 0; e < k; ++e) {
    std::vector<Vector> prod;
    for (int i = 0; i < n; ++i) {
      Vector v = Vector::Zero(sites[static_cast<std::size_t>(i)].d);
      v[0] = 1.0;
      prod.push_back(std::move(v));
    }
    if (e > 0) {
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(e));
      std::normal_distribution<double> gauss(0.0, 1.0);
      const int site = (e - 1) % n;
      const Index dd = sites[static_cast<std::size_t>(site)].d;
      Vector v = Vector::Zero(dd);
      const Index top = std::min<Index>(dd - 1, 2);
      for (Index lvl = 1; lvl <= top; ++lvl) v[lvl] = Complex(gauss(rng), gauss(rng));
      prod[static_cast<std::size_t>(site)] = v.normalized();
    }
    members.push_back(std::move(prod));
  }
  return BundledMps::from_product_states(members);
}

namespace {

nlohmann::json config_to_json(const DmrgConfig& cfg) {
  return nlohmann::json{{"k_excitations", cfg.k_excitations},
                        {"max_bond", cfg.max_bond},
                        {"svd_cutoff", cfg.svd_cutoff},
                        {"eig_tol", cfg.eig_tol},
                        {"max_sweeps", cfg.max_sweeps},
                        {"energy_convergence", cfg.energy_convergence},
                        {"seed", cfg.seed},
                        {"local_res_tol", cfg.local_res_tol},
                        {"local_max_iter", cfg.local_max_iter},
                        {"local_max_basis", cfg.local_max_basis}};
}

DmrgConfig config_from_json(const nlohmann::json& j) {
  DmrgConfig cfg;
  cfg.k_excitations = j.at("k_excitations").get<int>();
  cfg.max_bond = j.at("max_bond").get<Index>();
  cfg.svd_cutoff = j.at("svd_cutoff").get<double>();
  cfg.eig_tol = j.at("eig_tol").get<double>();
  cfg.max_sweeps = j.at("max_sweeps").get<int>();
  cfg.energy_convergence = j.at("energy_convergence").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.local_res_tol = j.at("local_res_tol").get<double>();
  cfg.local_max_iter = j.at("local_max_iter").get<int>();
  cfg.local_max_basis = j.at("local_max_basis").get<Index>();
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const DmrgResult& result, const DmrgConfig& cfg) {
  nlohmann::json meta;
  meta["config"] = config_to_json(cfg);
  meta["energies"] = result.energies;
  meta["converged"] = result.converged;
  meta["max_truncation_error"] = result.max_truncation_error;
  meta["sweeps"] = result.sweeps;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& rec : result.sweep_log) {
    log.push_back({{"sweep", rec.sweep},
                   {"max_truncation_error", rec.max_truncation_error},
                   {"energies", rec.energies},
                   {"energy_change", rec.energy_change}});
  }
  meta["sweep_log"] = log;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  save_mps(os, result.states, meta.dump());
}

DmrgCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string meta_str;
  DmrgCheckpoint out;
  out.result.states = load_mps(is, &meta_str);
  const nlohmann::json meta = nlohmann::json::parse(meta_str);
  out.config = config_from_json(meta.at("config"));
  out.result.energies = meta.at("energies").get<std::vector<double>>();
  out.result.converged = meta.at("converged").get<std::vector<bool>>();
  out.result.max_truncation_error = meta.at("max_truncation_error").get<double>();
  out.result.sweeps = meta.at("sweeps").get<int>();
  for (const auto& recj : meta.at("sweep_log")) {
    SweepRecord rec;
    rec.sweep = recj.at("sweep").get<int>();
    rec.max_truncation_error = recj.at("max_truncation_error").get<double>();
    rec.energies = recj.at("energies").get<std::vector<double>>();
    rec.energy_change = recj.at("energy_change").get<std::vector<double>>();
    out.result.sweep_log.push_back(std::move(rec));
  }
  return out;
}

}  // namespace tncirc
