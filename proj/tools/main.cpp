// Command-line front end: parses a circuit description, dispatches solver
// runs and sweeps, and writes CSV or JSON tables for spectra, observables,
// charge dispersion and pure-dephasing coherence estimates.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tncirc/analysis.hpp"
#include "tncirc/circuit_file.hpp"
#include "tncirc/constants.hpp"

namespace {

using namespace tncirc;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string circuit_path;
  std::string command;
  std::string solver = "dmrg";
  double flux_start = 0.0, flux_stop = 0.0;
  int flux_count = 1;
  bool flux_given = false;
  double ng = 0.0;
  bool ng_given = false;
  int levels = 6;
  int site_dim = 15;
  Index max_bond = 64;
  double cutoff = 1e-11;
  double tol = 1e-12;
  int max_sweeps = 40;
  bool renormalize = true;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  // dispersion / coherence extras
  double z_start = 0.0, z_stop = 0.0;
  int z_count = 0;
  int transition = 1;
  double flux_step = kDefaultFluxStep;
  double a_phi = 1.2e-6;      // Phi0
  double omega_ir = 2.0 * constants::pi;  // rad/s
};

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

// Cell values: numbers keep full precision, infinities become "inf" in CSV
// and null in JSON.
using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
  std::string name;           // schema name, e.g. "spectrum"
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string cell_to_csv(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "1" : "0";
  std::string s = std::get<std::string>(c);
  for (char& ch : s) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  return s;
}

json cell_to_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isinf(v) || std::isnan(v)) return nullptr;
    return v;
  }
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c);
  return std::get<std::string>(c);
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream ss;
  ss << "circuit=" << cfg.circuit_path << " command=" << cfg.command << " solver=" << cfg.solver
     << " flux=" << format_double(cfg.flux_start) << ":" << format_double(cfg.flux_stop) << ":"
     << cfg.flux_count << " ng=" << (cfg.ng_given ? format_double(cfg.ng) : std::string("circuit"))
     << " levels=" << cfg.levels << " site_dim=" << cfg.site_dim << " max_bond=" << cfg.max_bond
     << " cutoff=" << format_double(cfg.cutoff) << " tol=" << format_double(cfg.tol)
     << " max_sweeps=" << cfg.max_sweeps << " renormalize=" << (cfg.renormalize ? 1 : 0)
     << " seed=" << cfg.seed << " workers=" << cfg.workers;
  if (cfg.z_count > 0) {
    ss << " zgrid=" << format_double(cfg.z_start) << ":" << format_double(cfg.z_stop) << ":"
       << cfg.z_count;
  }
  if (cfg.command == "dispersion" || cfg.command == "coherence") {
    ss << " transition=" << cfg.transition;
  }
  if (cfg.command == "coherence") {
    ss << " flux_step=" << format_double(cfg.flux_step) << " a_phi=" << format_double(cfg.a_phi)
       << " omega_ir=" << format_double(cfg.omega_ir);
  }
  return ss.str();
}

void write_output(const Table& table, const RunConfig& cfg) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path);
    if (!file) throw std::runtime_error("cannot open output file " + cfg.out_path);
    os = &file;
  }
  const auto now = std::chrono::system_clock::now();
  const auto now_s = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());

  if (cfg.format == "csv") {
    *os << "# tncirc " << kVersion << " schema=tncirc." << table.name << ".v1\n";
    *os << "# config: " << config_echo(cfg) << "\n";
    *os << "# units: ";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      *os << table.columns[i] << "[" << table.units[i] << "]";
      if (i + 1 < table.columns.size()) *os << " ";
    }
    *os << "\n";
    *os << "# generated: " << now_s.count() << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      *os << table.columns[i];
      if (i + 1 < table.columns.size()) *os << ",";
    }
    *os << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        *os << cell_to_csv(row[i]);
        if (i + 1 < row.size()) *os << ",";
      }
      *os << "\n";
    }
  } else {
    json j;
    j["schema"] = "tncirc." + table.name + ".v1";
    j["version"] = kVersion;
    j["config"] = config_echo(cfg);
    j["generated"] = now_s.count();
    j["columns"] = table.columns;
    j["units"] = table.units;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_to_json(c));
      rows.push_back(r);
    }
    j["rows"] = rows;
    *os << j.dump(2) << "\n";
  }
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions opts;
  opts.d = cfg.site_dim;
  opts.dmrg.max_bond = cfg.max_bond;
  opts.dmrg.svd_cutoff = cfg.cutoff;
  opts.dmrg.eig_tol = cfg.tol;
  opts.dmrg.energy_convergence = cfg.tol;
  opts.dmrg.max_sweeps = cfg.max_sweeps;
  opts.dmrg.seed = cfg.seed;
  opts.ed.seed = cfg.seed;
  opts.renormalize = cfg.renormalize;
  return opts;
}

// Parallel map over grid chunks; each worker sweeps its chunk in order so
// DMRG warm starts stay within a chunk. Results merge in grid order.
SpectrumTable parallel_spectrum(const CircuitParams& p, const std::vector<double>& grid,
                                Solver solver, int k, const SweepOptions& opts, int workers) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
  if (workers == 1) return spectrum_sweep(p, grid, solver, k, opts);

  std::vector<SpectrumTable> parts(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  const std::size_t per = (grid.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * per;
    const std::size_t hi = std::min(grid.size(), lo + per);
    if (lo >= hi) break;
    threads.emplace_back([&, w, lo, hi]() {
      const std::vector<double> chunk(grid.begin() + lo, grid.begin() + hi);
      parts[static_cast<std::size_t>(w)] = spectrum_sweep(p, chunk, solver, k, opts);
    });
  }
  for (auto& t : threads) t.join();
  SpectrumTable out;
  out.k_levels = k;
  for (const auto& part : parts) {
    for (const auto& row : part.rows) out.rows.push_back(row);
  }
  return out;
}

void validate(RunConfig& cfg, const CircuitParams& p) {
  if (cfg.flux_count < 1) throw std::invalid_argument("flux grid count must be >= 1");
  if (cfg.levels < 2) throw std::invalid_argument("--levels must be >= 2");
  if (cfg.site_dim < 2) throw std::invalid_argument("--site-dim must be >= 2");
  if (cfg.solver == "ed" || cfg.solver == "all") {
    if (cfg.solver == "ed" && (p.n_junctions > 6 || cfg.site_dim > 8)) {
      throw std::invalid_argument(
          "the ed solver is limited to n_junctions <= 6 and site dimension <= 8");
    }
  }
  if (cfg.format != "csv" && cfg.format != "json") {
    throw std::invalid_argument("--format must be csv or json");
  }
  if (cfg.transition < 1 || cfg.transition >= cfg.levels) {
    throw std::invalid_argument("--transition must be in [1, levels)");
  }
}

int spectrum_exit_code(const SpectrumTable& t) {
  for (const auto& r : t.rows) {
    if (!r.error.empty()) return 2;
  }
  return 0;
}

void append_spectrum_rows(Table& table, const SpectrumTable& t, int k) {
  for (const auto& row : t.rows) {
    std::vector<Cell> cells;
    cells.emplace_back(row.phi_ext);
    cells.emplace_back(row.n_g);
    cells.emplace_back(to_string(row.solver));
    for (int i = 0; i + 1 < k; ++i) {
      cells.emplace_back(i < static_cast<int>(row.transitions_ghz.size())
                             ? Cell(row.transitions_ghz[static_cast<std::size_t>(i)])
                             : Cell(std::string()));
    }
    cells.emplace_back(row.converged);
    cells.emplace_back(row.max_truncation_error);
    cells.emplace_back(static_cast<std::int64_t>(row.sweeps));
    cells.emplace_back(row.error);
    table.rows.push_back(std::move(cells));
  }
}

int cmd_spectrum(const RunConfig& cfg, const CircuitParams& p, const std::vector<double>& grid) {
  const Solver solver = solver_from_string(cfg.solver == "all" ? "dmrg" : cfg.solver);
  const SpectrumTable t =
      parallel_spectrum(p, grid, solver, cfg.levels, sweep_options(cfg), cfg.workers);
  Table out;
  out.name = "spectrum";
  out.columns = {"phi_ext", "n_g", "solver"};
  out.units = {"Phi0", "2e", "-"};
  for (int i = 1; i < cfg.levels; ++i) {
    out.columns.push_back("f_0" + std::to_string(i));
    out.units.push_back("GHz");
  }
  for (const char* c : {"converged", "max_trunc_error", "sweeps", "error"}) out.columns.push_back(c);
  for (const char* u : {"-", "-", "-", "-"}) out.units.push_back(u);
  append_spectrum_rows(out, t, cfg.levels);
  write_output(out, cfg);
  return spectrum_exit_code(t);
}

int cmd_observables(const RunConfig& cfg, const CircuitParams& p,
                    const std::vector<double>& grid) {
  Table out;
  out.name = "observables";
  out.columns = {"phi_ext", "state", "site",  "population",   "population_excess",
                 "phase_drop", "phase_defined", "energy_0k"};
  out.units = {"Phi0", "-", "-", "hbar*omega_p", "hbar*omega_p", "rad", "-", "GHz"};

  const SweepOptions opts = sweep_options(cfg);
  int exit_code = 0;
  for (double phi : grid) {
    CircuitParams pp = p;
    pp.phi_ext = phi;
    try {
      const CircuitOperators ops = build_circuit_operators(pp, opts.d, opts.charge_cutoff);
      DmrgConfig dc = opts.dmrg;
      dc.k_excitations = cfg.levels;
      const DmrgResult res = run_multitarget_dmrg(
          ops.hamiltonian, default_initial_state(ops.sites, cfg.levels, dc.seed), dc);
      const double f_p = pp.omega_p_ghz(0);
      const Matrix pops = site_populations(res.states, ops.sites, f_p);
      for (int e = 0; e < cfg.levels; ++e) {
        const PhaseProfile prof = phase_profile(res.states, ops.sites, e);
        for (int i = 0; i < pp.n_junctions; ++i) {
          std::vector<Cell> cells;
          cells.emplace_back(phi);
          cells.emplace_back(static_cast<std::int64_t>(e));
          cells.emplace_back(static_cast<std::int64_t>(i + 1));
          const double pop = pops(e, i).real();
          cells.emplace_back(pop);
          cells.emplace_back(pop - ops.sites[static_cast<std::size_t>(i)].ground_energy() / f_p);
          cells.emplace_back(prof.drop[static_cast<std::size_t>(i)]);
          cells.emplace_back(prof.defined[static_cast<std::size_t>(i)]);
          cells.emplace_back(res.energies[static_cast<std::size_t>(e)] - res.energies[0]);
          out.rows.push_back(std::move(cells));
        }
      }
    } catch (const std::exception& ex) {
      std::vector<Cell> cells(out.columns.size(), Cell(std::string()));
      cells[0] = phi;
      cells.back() = std::string(ex.what());
      out.rows.push_back(std::move(cells));
      exit_code = 2;
    }
  }
  write_output(out, cfg);
  return exit_code;
}

int cmd_dispersion(const RunConfig& cfg, const CircuitParams& p, const std::vector<double>& grid) {
  Table out;
  out.name = "dispersion";
  out.columns = {"z",
                 "phi_ext",
                 "f_ng0",
                 "f_ng05",
                 "delta_full",
                 "eps0",
                 "eps0_valid",
                 "t0_re",
                 "t0_im",
                 "t1_re",
                 "t1_im",
                 "delta_pert_dmrg",
                 "delta_pert_sm",
                 "abs_dT",
                 "tracking_ok",
                 "match_overlap",
                 "error"};
  out.units = {"-",  "Phi0", "GHz", "GHz", "Hz", "Hz", "-", "-", "-",
               "-",  "-",    "Hz",  "Hz",  "-",  "-",  "-", "-"};

  DispersionOptions dopts;
  dopts.d = cfg.site_dim;
  dopts.solver = cfg.solver == "ed" ? Solver::ed : Solver::dmrg;
  dopts.dmrg.max_bond = cfg.max_bond;
  dopts.dmrg.svd_cutoff = cfg.cutoff;
  dopts.dmrg.eig_tol = cfg.tol;
  dopts.dmrg.energy_convergence = cfg.tol;
  dopts.dmrg.max_sweeps = cfg.max_sweeps;
  dopts.dmrg.seed = cfg.seed;
  dopts.ed.seed = cfg.seed;

  // Sweep either reduced impedance (zgrid) at fixed flux, or external flux.
  struct Point {
    double z, phi;
  };
  std::vector<Point> points;
  if (cfg.z_count > 0) {
    for (double z : linspace(cfg.z_start, cfg.z_stop, cfg.z_count)) {
      points.push_back({z, p.phi_ext});
    }
  } else {
    for (double phi : grid) points.push_back({p.reduced_impedance(0), phi});
  }

  int exit_code = 0;
  for (const Point& pt : points) {
    try {
      CircuitParams pp = cfg.z_count > 0
                             ? CircuitParams::homogeneous(
                                   p.n_junctions, p.c_jb_ff, p.e_jb_ghz, p.omega_p_ghz(0), pt.z,
                                   p.c0_ff[0], pt.phi, p.n_g.empty() ? 0.0 : p.n_g[0])
                             : p;
      pp.phi_ext = pt.phi;
      const DispersionPoint dp = compute_dispersion_point(pp, cfg.transition, dopts);
      std::vector<Cell> cells;
      cells.emplace_back(dp.z);
      cells.emplace_back(dp.phi_ext);
      cells.emplace_back(dp.full.f_ng0_ghz);
      cells.emplace_back(dp.full.f_ng05_ghz);
      cells.emplace_back(dp.full.delta_omega_rad_s / (2.0 * constants::pi));
      cells.emplace_back(dp.eps0_ghz * 1e9);
      cells.emplace_back(dp.eps0_valid);
      cells.emplace_back(dp.t0_dmrg.real());
      cells.emplace_back(dp.t0_dmrg.imag());
      cells.emplace_back(dp.t1_dmrg.real());
      cells.emplace_back(dp.t1_dmrg.imag());
      cells.emplace_back(dp.delta_pert_dmrg_rad_s / (2.0 * constants::pi));
      cells.emplace_back(dp.delta_pert_sm_rad_s / (2.0 * constants::pi));
      cells.emplace_back(std::abs(dp.t1_dmrg - dp.t0_dmrg));
      cells.emplace_back(dp.full.tracking_ok);
      cells.emplace_back(dp.full.match_overlap);
      cells.emplace_back(std::string());
      out.rows.push_back(std::move(cells));
    } catch (const std::exception& ex) {
      std::vector<Cell> cells(out.columns.size(), Cell(std::string()));
      cells[0] = pt.z;
      cells[1] = pt.phi;
      cells.back() = std::string(ex.what());
      out.rows.push_back(std::move(cells));
      exit_code = 2;
    }
  }
  write_output(out, cfg);
  return exit_code;
}

int cmd_coherence(const RunConfig& cfg, const CircuitParams& p, const std::vector<double>& grid) {
  Table out;
  out.name = "coherence";
  out.columns = {"phi_ext",       "delta_omega01", "t_phi_cqps", "slope",
                 "richardson_ok", "t_phi_flux",    "a_phi",      "omega_ir",
                 "n_junctions",   "error"};
  out.units = {"Phi0", "rad/s", "us", "rad/s/Phi0", "-", "us", "Phi0", "rad/s", "-", "-"};

  DispersionOptions dopts;
  dopts.d = cfg.site_dim;
  dopts.solver = cfg.solver == "ed" ? Solver::ed : Solver::dmrg;
  dopts.dmrg.max_bond = cfg.max_bond;
  dopts.dmrg.svd_cutoff = cfg.cutoff;
  dopts.dmrg.eig_tol = cfg.tol;
  dopts.dmrg.energy_convergence = cfg.tol;
  dopts.dmrg.max_sweeps = cfg.max_sweeps;
  dopts.dmrg.seed = cfg.seed;
  const SweepOptions sopts = sweep_options(cfg);

  int exit_code = 0;
  for (double phi : grid) {
    try {
      CircuitParams pp = p;
      pp.phi_ext = phi;
      const DispersionResult disp = charge_dispersion_full(pp, cfg.transition, dopts);
      const double t_cqps = tphi_cqps(disp.delta_omega_rad_s, p.n_junctions);

      const double h = cfg.flux_step;
      const std::vector<double> stencil{phi - h, phi - 0.5 * h, phi + 0.5 * h, phi + h};
      const Solver solver = cfg.solver == "single-mode" ? Solver::single_mode : Solver::dmrg;
      const SpectrumTable spec =
          spectrum_sweep(pp, stencil, solver, cfg.transition + 1, sopts);
      const FluxDispersion fd = flux_dispersion(spec, cfg.transition, phi, h);
      const double t_flux = tphi_flux(fd.slope_rad_s_per_phi0, cfg.a_phi, cfg.omega_ir);

      std::vector<Cell> cells;
      cells.emplace_back(phi);
      cells.emplace_back(disp.delta_omega_rad_s);
      cells.emplace_back(t_cqps * 1e6);
      cells.emplace_back(fd.slope_rad_s_per_phi0);
      cells.emplace_back(fd.richardson_ok);
      cells.emplace_back(t_flux * 1e6);
      cells.emplace_back(cfg.a_phi);
      cells.emplace_back(cfg.omega_ir);
      cells.emplace_back(static_cast<std::int64_t>(p.n_junctions));
      cells.emplace_back(std::string());
      out.rows.push_back(std::move(cells));
    } catch (const std::exception& ex) {
      std::vector<Cell> cells(out.columns.size(), Cell(std::string()));
      cells[0] = phi;
      cells.back() = std::string(ex.what());
      out.rows.push_back(std::move(cells));
      exit_code = 2;
    }
  }
  write_output(out, cfg);
  return exit_code;
}

int cmd_compare(const RunConfig& cfg, const CircuitParams& p, const std::vector<double>& grid) {
  std::vector<Solver> solvers;
  if (cfg.solver == "all") {
    solvers = {Solver::dmrg, Solver::single_mode};
    if (p.n_junctions <= 6 && cfg.site_dim <= 8) solvers.push_back(Solver::ed);
  } else {
    solvers = {Solver::dmrg, solver_from_string(cfg.solver)};
    if (solvers[1] == Solver::dmrg) solvers = {Solver::dmrg, Solver::single_mode};
  }

  std::vector<SpectrumTable> tables;
  const SweepOptions opts = sweep_options(cfg);
  for (Solver s : solvers) {
    tables.push_back(parallel_spectrum(p, grid, s, cfg.levels, opts, cfg.workers));
  }

  Table out;
  out.name = "compare";
  out.columns = {"phi_ext", "transition"};
  out.units = {"Phi0", "-"};
  for (Solver s : solvers) {
    out.columns.push_back("f_" + to_string(s));
    out.units.push_back("GHz");
  }
  out.columns.push_back("max_rel_dev");
  out.units.push_back("-");
  out.columns.push_back("error");
  out.units.push_back("-");

  int exit_code = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::string err;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      if (!tables[s].rows[g].error.empty()) err = tables[s].rows[g].error;
    }
    if (!err.empty()) exit_code = 2;
    for (int t = 1; t < cfg.levels; ++t) {
      std::vector<Cell> cells;
      cells.emplace_back(grid[g]);
      cells.emplace_back(static_cast<std::int64_t>(t));
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        const auto& row = tables[s].rows[g];
        if (!row.error.empty() ||
            static_cast<int>(row.transitions_ghz.size()) < t) {
          cells.emplace_back(std::string());
        } else {
          const double v = row.transitions_ghz[static_cast<std::size_t>(t - 1)];
          cells.emplace_back(v);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      const double dev = std::isfinite(lo) && std::isfinite(hi) && hi != 0.0
                             ? (hi - lo) / std::abs(hi)
                             : std::numeric_limits<double>::quiet_NaN();
      cells.emplace_back(dev);
      cells.emplace_back(err);
      out.rows.push_back(std::move(cells));
    }
  }
  write_output(out, cfg);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"tncirc: tensor-network spectra and coherence estimates for "
               "Josephson-junction-array circuits"};
  app.add_option("--circuit", cfg.circuit_path, "circuit description file")->required();
  app.add_option("--command", cfg.command,
                 "one of spectrum, observables, dispersion, coherence, compare")
      ->required();
  app.add_option("--solver", cfg.solver, "dmrg, single-mode, ed or all");
  std::string flux_spec;
  app.add_option("--flux", flux_spec, "flux grid start:stop:count in Phi0");
  app.add_option("--ng", cfg.ng, "uniform offset charge override");
  app.add_option("--levels", cfg.levels, "number of excitations k");
  app.add_option("--site-dim", cfg.site_dim, "retained site levels d");
  app.add_option("--max-bond", cfg.max_bond, "maximum MPS bond dimension");
  app.add_option("--cutoff", cfg.cutoff, "SVD squared-weight truncation cutoff");
  app.add_option("--tol", cfg.tol, "eigenvalue/convergence tolerance (GHz)");
  app.add_option("--max-sweeps", cfg.max_sweeps, "maximum DMRG sweeps");
  app.add_option("--renormalize", cfg.renormalize,
                 "apply the x_i/x_b junction-nonlinearity renormalization");
  app.add_option("--out", cfg.out_path, "output path (stdout if omitted)");
  app.add_option("--format", cfg.format, "csv or json");
  app.add_option("--seed", cfg.seed, "deterministic seed");
  app.add_option("--workers", cfg.workers, "parallel sweep workers")
      ->envname("TNCIRC_WORKERS");
  std::string z_spec;
  app.add_option("--zgrid", z_spec, "dispersion sweep over z, start:stop:count");
  app.add_option("--transition", cfg.transition, "tracked transition index (0 -> t)");
  app.add_option("--flux-step", cfg.flux_step, "finite-difference flux step (Phi0)");
  app.add_option("--a-phi", cfg.a_phi, "1/f flux-noise amplitude (Phi0)");
  app.add_option("--omega-ir", cfg.omega_ir, "infrared cutoff (rad/s)");

  try {
    app.parse(argc, argv);

    auto parse_grid = [](const std::string& spec, double& start, double& stop, int& count) {
      if (spec.empty()) return false;
      std::istringstream ss(spec);
      std::string a, b, c;
      if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
        throw std::invalid_argument("grid must be start:stop:count");
      }
      start = std::stod(a);
      stop = std::stod(b);
      count = std::stoi(c);
      if (count < 1) throw std::invalid_argument("grid count must be >= 1");
      return true;
    };
    cfg.flux_given = parse_grid(flux_spec, cfg.flux_start, cfg.flux_stop, cfg.flux_count);
    if (parse_grid(z_spec, cfg.z_start, cfg.z_stop, cfg.z_count)) {
      if (cfg.command != "dispersion") {
        throw std::invalid_argument("--zgrid only applies to the dispersion command");
      }
    } else {
      cfg.z_count = 0;
    }
    cfg.ng_given = app.count("--ng") > 0;

    CircuitParams p = parse_circuit_file(cfg.circuit_path);
    if (cfg.ng_given) p.set_uniform_ng(cfg.ng);
    validate(cfg, p);

    std::vector<double> grid = cfg.flux_given
                                   ? linspace(cfg.flux_start, cfg.flux_stop, cfg.flux_count)
                                   : std::vector<double>{p.phi_ext};

    if (cfg.command == "spectrum") return cmd_spectrum(cfg, p, grid);
    if (cfg.command == "observables") return cmd_observables(cfg, p, grid);
    if (cfg.command == "dispersion") return cmd_dispersion(cfg, p, grid);
    if (cfg.command == "coherence") return cmd_coherence(cfg, p, grid);
    if (cfg.command == "compare") return cmd_compare(cfg, p, grid);
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& ex) {
    json err;
    err["error"] = ex.what();
    err["command"] = cfg.command;
    err["circuit"] = cfg.circuit_path;
    std::cerr << err.dump() << std::endl;
    return 1;
  }
}
