#include "tncirc/ed.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tncirc/constants.hpp"

namespace tncirc {

namespace constants_ns = tncirc::constants;

namespace {

Index hilbert_dimension(const CircuitOperators& ops) {
  Index dim = 1;
  for (const auto& s : ops.sites) {
    if (dim > (Index(1) << 40) / s.d) throw std::invalid_argument("solve_ed: Hilbert space too large");
    dim *= s.d;
  }
  return dim;
}

// Apply a single-site operator in the product basis (site 0 fastest).
void apply_site_op(const Matrix& op, int site, const Vector& in, Vector& out,
                   const std::vector<Index>& dims) {
  const Index d = dims[static_cast<std::size_t>(site)];
  Index left = 1;
  for (int i = 0; i < site; ++i) left *= dims[static_cast<std::size_t>(i)];
  const Index right = in.size() / (left * d);
  out.resize(in.size());
  const Matrix op_t = op.transpose();
  for (Index r = 0; r < right; ++r) {
    Eigen::Map<const Matrix> blk(in.data() + r * left * d, left, d);
    Eigen::Map<Matrix> oblk(out.data() + r * left * d, left, d);
    oblk.noalias() = blk * op_t;
  }
}

struct EdApply {
  const CircuitOperators* ops;
  std::vector<Index> dims;
  RealVector diagonal;          // summed shifted site energies
  RealMatrix coupling;          // g(i,j), strict upper used symmetrically
  std::vector<Matrix> string_fwd, string_bwd;
  Complex coeff_fwd, coeff_bwd;

  explicit EdApply(const CircuitOperators& o) : ops(&o) {
    const int n = static_cast<int>(o.sites.size());
    for (const auto& s : o.sites) dims.push_back(s.d);
    const Index dim = hilbert_dimension(o);
    diagonal = RealVector::Zero(dim);
    for (int i = 0; i < n; ++i) {
      const auto& s = o.sites[static_cast<std::size_t>(i)];
      Index left = 1;
      for (int j = 0; j < i; ++j) left *= dims[static_cast<std::size_t>(j)];
      const Index right = dim / (left * s.d);
      for (Index r = 0; r < right; ++r) {
        for (Index m = 0; m < s.d; ++m) {
          diagonal.segment(r * left * s.d + m * left, left).array() +=
              s.energies[m] - s.ground_energy();
        }
      }
    }
    coupling = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) coupling(i, j) = o.theta.pair_coupling_ghz(i, j);
    }
    if (o.theta.e_jb_ghz != 0.0) {
      const double phase = 2.0 * constants_ns::pi * o.theta.phi_ext;
      coeff_fwd = -0.5 * o.theta.e_jb_ghz * std::exp(Complex(0.0, phase));
      coeff_bwd = std::conj(coeff_fwd);
      for (const auto& s : o.sites) {
        string_fwd.push_back(s.op_exp_itheta);
        string_bwd.push_back(s.op_exp_itheta.adjoint());
      }
    }
  }

  void column(const Vector& v, Vector& y) const {
    const int n = static_cast<int>(dims.size());
    y = diagonal.cast<Complex>().cwiseProduct(v);

    // Pair couplings via prefix accumulation: y += sum_j n_j (sum_{i<j} g_ij n_i v).
    std::vector<Vector> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      apply_site_op(ops->sites[static_cast<std::size_t>(i)].op_n, i, v,
                    t[static_cast<std::size_t>(i)], dims);
    }
    Vector s_acc, tmp;
    for (int j = 1; j < n; ++j) {
      s_acc = Vector::Zero(v.size());
      bool any = false;
      for (int i = 0; i < j; ++i) {
        const double g = coupling(i, j);
        if (g != 0.0) {
          s_acc += g * t[static_cast<std::size_t>(i)];
          any = true;
        }
      }
      if (any) {
        apply_site_op(ops->sites[static_cast<std::size_t>(j)].op_n, j, s_acc, tmp, dims);
        y += tmp;
      }
    }

    if (!string_fwd.empty()) {
      Vector w = v, w2;
      for (int i = 0; i < n; ++i) {
        apply_site_op(string_fwd[static_cast<std::size_t>(i)], i, w, w2, dims);
        std::swap(w, w2);
      }
      y += coeff_fwd * w;
      w = v;
      for (int i = 0; i < n; ++i) {
        apply_site_op(string_bwd[static_cast<std::size_t>(i)], i, w, w2, dims);
        std::swap(w, w2);
      }
      y += coeff_bwd * w;
    }
  }

  void block(const Matrix& in, Matrix& out) const {
    out.resize(in.rows(), in.cols());
    Vector y;
    for (Index c = 0; c < in.cols(); ++c) {
      const Vector v = in.col(c);
      column(v, y);
      out.col(c) = y;
    }
  }
};

}  // namespace

std::vector<double> EdResult::transitions_ghz() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < energies.size(); ++i) out.push_back(energies[i] - energies[0]);
  return out;
}

Matrix dense_circuit_hamiltonian(const CircuitOperators& ops) {
  const Index dim = hilbert_dimension(ops);
  if (dim > 16384) throw std::invalid_argument("dense_circuit_hamiltonian: Hilbert space too large");
  EdApply apply(ops);
  Matrix h(dim, dim);
  Vector y;
  Vector e = Vector::Zero(dim);
  for (Index c = 0; c < dim; ++c) {
    e[c] = 1.0;
    apply.column(e, y);
    h.col(c) = y;
    e[c] = 0.0;
  }
  return h;
}

EdResult solve_ed(const CircuitParams& p, int d, const EdOptions& opts) {
  const CircuitOperators ops = build_circuit_operators(
      p, d, opts.charge_cutoff > 0 ? opts.charge_cutoff : default_charge_cutoff(d));
  return solve_ed(ops, opts);
}

EdResult solve_ed(const CircuitOperators& ops, const EdOptions& opts) {
  const Index dim = hilbert_dimension(ops);
  const int k = opts.k;
  if (k < 1 || dim < k) throw std::invalid_argument("solve_ed: bad excitation count");

  EdResult out;
  out.dimension = dim;
  const double offset = ops.hamiltonian.energy_offset;

  if (dim <= opts.dense_threshold) {
    const Matrix h = dense_circuit_hamiltonian(ops);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    for (double& e : out.energies) e += offset;
    if (opts.keep_vectors) out.vectors = es.eigenvectors().leftCols(k);
    out.converged = true;
    return out;
  }

  EdApply apply(ops);
  Matrix init = Matrix::Zero(dim, k);
  init(0, 0) = 1.0;  // all sites in their local ground state
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    for (Index i = 0; i < dim; ++i) init(i, c) = Complex(gauss(rng), gauss(rng));
    init.col(c).normalize();
  }

  LanczosOptions lopts;
  lopts.tol = opts.res_tol;
  lopts.max_iter = opts.max_iter;
  lopts.max_basis = opts.max_basis;
  lopts.seed = opts.seed;
  LanczosResult lr = block_lanczos(
      [&apply](const Matrix& in, Matrix& o) { apply.block(in, o); }, init, k, lopts);
  out.energies.assign(lr.values.data(), lr.values.data() + k);
  for (double& e : out.energies) e += offset;
  if (opts.keep_vectors) out.vectors = lr.vectors;
  out.converged = lr.converged;
  return out;
}

Complex ed_t_expectation(const CircuitOperators& ops, const Vector& bra, const Vector& ket) {
  EdApply apply(ops);
  Vector w = ket, w2;
  const int n = static_cast<int>(ops.sites.size());
  const double alpha = -2.0 * constants_ns::pi / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    apply_site_op(ops.sites[static_cast<std::size_t>(i)].phase_op(alpha), i, w, w2, apply.dims);
    std::swap(w, w2);
  }
  return bra.dot(w);
}

}  // namespace tncirc
