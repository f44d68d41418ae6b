#include "tncirc/circuit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "tncirc/constants.hpp"

using namespace tncirc;
using tncirc::testing::dense_hamiltonian;
using tncirc::testing::dense_operator;

namespace {

RealVector dense_spectrum(const CircuitParams& p, int d) {
  const CircuitOperators ops = build_circuit_operators(p, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_hamiltonian(ops));
  return es.eigenvalues();
}

}  // namespace

TEST(CapacitanceMatrix, TwoJunctionExample) {
  CircuitParams p = CircuitParams::homogeneous(2, 1.0, 5.0, 20.0, 0.05);
  p.c_j_ff = {1.0, 1.0};
  p.l_j_nh = {1.0, 1.0};
  const RealMatrix c = capacitance_matrix(p);
  RealMatrix want(3, 3);
  want << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_LT((c - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CapacitanceMatrix, RowSumsTrackGroundCapacitance) {
  CircuitParams p = CircuitParams::homogeneous(4, 3.0, 5.0, 20.0, 0.05);
  RealMatrix c = capacitance_matrix(p);
  EXPECT_LT(c.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);

  p.c0_ff.assign(5, 0.1);
  c = capacitance_matrix(p);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(c.row(i).sum(), 0.1, 1e-12);
  EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ThetaTransform, SigmaDecouplesWithoutDisorder) {
  const CircuitParams p = CircuitParams::homogeneous(5, 10.0, 5.0, 20.0, 0.05, 0.2);
  const ThetaHamiltonian th = theta_transform(p);
  EXPECT_LT(th.sigma_coupling, 1e-12);
}

TEST(ThetaTransform, TwoJunctionAnalyticInverse) {
  CircuitParams p = CircuitParams::homogeneous(2, 7.0, 5.0, 20.0, 0.05);
  p.c_j_ff = {3.0, 3.0};
  const ThetaHamiltonian th = theta_transform(p);
  // Theta block is [[C_J + C_Jb, C_Jb], [C_Jb, C_J + C_Jb]].
  RealMatrix block(2, 2);
  block << 10.0, 7.0, 7.0, 10.0;
  const RealMatrix want = block.inverse();
  EXPECT_LT((th.inv_cap - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ThetaTransform, HomogeneousStructureMatchesClosedForm) {
  const int n = 7;
  const CircuitParams p = CircuitParams::homogeneous(n, 11.0, 5.0, 20.0, 0.05);
  const ThetaHamiltonian th = theta_transform(p);
  const double cj = p.c_j_ff[0];
  RealMatrix c = cj * RealMatrix::Identity(n, n) + 11.0 * RealMatrix::Ones(n, n);
  EXPECT_LT((th.inv_cap - c.inverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ThetaTransform, NoGateDriveNoOffsets) {
  CircuitParams p = CircuitParams::homogeneous(3, 5.0, 5.0, 20.0, 0.05);
  p.set_uniform_ng(0.37);
  const ThetaHamiltonian th = theta_transform(p);
  EXPECT_LT(th.q_g.cwiseAbs().maxCoeff(), 1e-15);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(th.n_g_site[static_cast<std::size_t>(i)], 0.37, 1e-15);
}

TEST(ThetaTransform, UniformGateChargeLandsOnTheCyclicMode) {
  // Driving every island identically polarizes only the sigma mode.
  CircuitParams p = CircuitParams::homogeneous(3, 5.0, 5.0, 20.0, 0.05, 0.1);
  p.cg_ff.assign(4, 0.05);
  p.vg_v.assign(4, 2.0);
  const ThetaHamiltonian th = theta_transform(p);
  EXPECT_LT(th.q_g.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ThetaTransform, GateNetworkShiftsOffsets) {
  // Single junction with one driven island: q_g = C_g V / 2 in charge units,
  // i.e. C_g V / 4e Cooper pairs, independent of the capacitance values.
  CircuitParams p = CircuitParams::homogeneous(1, 5.0, 5.0, 20.0, 0.05, 0.1);
  p.cg_ff = {0.0, 0.05};
  p.vg_v = {0.0, 2.0};
  const ThetaHamiltonian th = theta_transform(p);
  const double want = 0.05e-15 * 2.0 / (4.0 * constants::elementary_charge);
  EXPECT_NEAR(th.q_g[0], want, 1e-9 * want);

  // Non-uniform drive on a chain produces nonzero theta-basis offsets and
  // keeps the retained block positive definite.
  CircuitParams q = CircuitParams::homogeneous(3, 5.0, 5.0, 20.0, 0.05, 0.1);
  q.cg_ff = {0.0, 0.05, 0.0, 0.0};
  q.vg_v = {0.0, 2.0, 0.0, 0.0};
  const ThetaHamiltonian thq = theta_transform(q);
  EXPECT_GT(thq.q_g.cwiseAbs().maxCoeff(), 1e-3);
  Eigen::LLT<RealMatrix> llt(thq.inv_cap);
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(SiteEigenbasis, FreeRotorEnergies) {
  const SiteBasis b = site_eigenbasis(1.0, 0.0, 0.2, 5, 30);
  // 4 E_C (m - n_g)^2 over integers, sorted: m = 0, 1, -1, 2, -2.
  const double ec4 = 4.0;
  std::vector<double> want{ec4 * 0.04, ec4 * 0.64, ec4 * 1.44, ec4 * 3.24, ec4 * 4.84};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(b.energies[i], want[static_cast<std::size_t>(i)], 1e-12);
}

TEST(SiteEigenbasis, ChargeDegeneracyPoint) {
  const SiteBasis b = site_eigenbasis(1.0, 1e-9, 0.5, 4, 30);
  EXPECT_NEAR(b.energies[1] - b.energies[0], 0.0, 1e-7);
  EXPECT_GT(b.energies[2] - b.energies[1], 1.0);
}

TEST(SiteEigenbasis, TransmonGapAgainstLargeCutoffOracle) {
  // omega_p/2pi = 25 GHz, z = 0.03 site parameters.
  const double e_j = constants::inductive_energy_ghz(constants::junction_inductance_nh(25.0, 0.03));
  const double e_c = constants::charging_energy_ghz(constants::junction_capacitance_ff(25.0, 0.03));

  // Independent oracle: dense diagonalization at charge cutoff 200.
  const int nc = 200;
  const int dim = 2 * nc + 1;
  RealMatrix h = RealMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    const double nval = m - nc;
    h(m, m) = 4.0 * e_c * nval * nval;
    if (m + 1 < dim) h(m, m + 1) = h(m + 1, m) = -0.5 * e_j;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);

  const SiteBasis b = site_eigenbasis(e_c, e_j, 0.0, 6, default_charge_cutoff(6));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(b.energies[i], es.eigenvalues()[i], 1e-9);

  // First gap is omega_p minus an anharmonic correction of order E_C.
  const double gap = b.energies[1] - b.energies[0];
  EXPECT_NEAR(gap, 25.0 - e_c, 0.1);
}

TEST(SiteEigenbasis, OperatorProperties) {
  const SiteBasis b = site_eigenbasis(0.6, 130.0, 0.0, 8, 60);
  EXPECT_LT((b.op_n - b.op_n.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 0; i + 1 < 8; ++i) EXPECT_LE(b.op_h0(i, i).real(), b.op_h0(i + 1, i + 1).real());
  // e^{i theta} is approximately isometric on the retained low levels.
  const Matrix prod = b.op_exp_itheta.adjoint() * b.op_exp_itheta;
  EXPECT_NEAR(prod(0, 0).real(), 1.0, 1e-6);
  EXPECT_THROW(site_eigenbasis(1.0, 1.0, 0.0, 8, 10), std::invalid_argument);
}

TEST(BuildHamiltonianMpo, DenseReconstructionMatchesKroneckerOracle) {
  CircuitParams p = CircuitParams::homogeneous(3, 8.0, 6.0, 22.0, 0.06, 0.15, 0.3);
  p.set_uniform_ng(0.2);
  const CircuitOperators ops = build_circuit_operators(p, 4);
  const Matrix want = dense_hamiltonian(ops);
  const Matrix got = dense_operator(ops.hamiltonian) +
                     ops.hamiltonian.energy_offset * Matrix::Identity(want.rows(), want.cols());
  EXPECT_LT((got - want).norm() / want.norm(), 1e-12);
}

TEST(BuildHamiltonianMpo, DecoupledLimitGroundEnergyIsSumOfSiteMinima) {
  CircuitParams p = CircuitParams::homogeneous(4, 0.0, 0.0, 22.0, 0.06);
  const CircuitOperators ops = build_circuit_operators(p, 4);
  double want = 0.0;
  for (const auto& s : ops.sites) want += s.ground_energy();
  EXPECT_NEAR(ops.hamiltonian.energy_offset, want, 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_operator(ops.hamiltonian));
  EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-10);
}

TEST(BuildHamiltonianMpo, CosineStringsHaveBondDimensionTwo) {
  for (int n : {3, 5, 8}) {
    std::vector<Matrix> site_terms(static_cast<std::size_t>(n), Matrix::Zero(3, 3));
    std::vector<OperatorString> strings(2);
    const SiteBasis b = site_eigenbasis(0.6, 130.0, 0.0, 3, 30);
    strings[0].coeff = Complex(0.5, 0.25);
    strings[1].coeff = Complex(0.5, -0.25);
    for (int i = 0; i < n; ++i) {
      strings[0].ops.push_back(b.op_exp_itheta);
      strings[1].ops.push_back(b.op_exp_itheta.adjoint());
    }
    const Mpo m = mpo_compress(build_sum_mpo(site_terms, {}, RealMatrix(), strings), 1e-13);
    for (int l = 0; l + 1 < n; ++l) EXPECT_LE(m.bond_dim(l), 2);
  }
}

TEST(BuildHamiltonianMpo, DenseHermiticity) {
  CircuitParams p = CircuitParams::homogeneous(3, 8.0, 6.0, 22.0, 0.06, 0.1, 0.17);
  p.set_uniform_ng(0.31);
  const Mpo mpo = build_hamiltonian_mpo(p, 3);
  const Matrix h = dense_operator(mpo);
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST(CircuitSpectrum, FluxQuantumPeriodicity) {
  CircuitParams p = CircuitParams::homogeneous(3, 8.0, 6.0, 22.0, 0.06, 0.0, 0.23);
  const RealVector a = dense_spectrum(p, 3);
  p.phi_ext += 1.0;
  const RealVector b = dense_spectrum(p, 3);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CircuitSpectrum, MirrorSymmetryAboutHalfQuantum) {
  for (double delta : {0.05, 0.21}) {
    CircuitParams p = CircuitParams::homogeneous(3, 8.0, 6.0, 22.0, 0.06);
    p.phi_ext = 0.5 + delta;
    const RealVector a = dense_spectrum(p, 3);
    p.phi_ext = 0.5 - delta;
    const RealVector b = dense_spectrum(p, 3);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(CircuitSpectrum, InverseCapacitanceIsPositiveDefinite) {
  const CircuitParams p = CircuitParams::homogeneous(6, 40.0, 7.5, 25.0, 0.03, 0.05);
  const ThetaHamiltonian th = theta_transform(p);
  Eigen::LLT<RealMatrix> llt(th.inv_cap);
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(CircuitParams, ValidationAndDerivedQuantities) {
  CircuitParams p = CircuitParams::homogeneous(2, 40.0, 7.5, 25.0, 0.03);
  EXPECT_NEAR(p.omega_p_ghz(0), 25.0, 1e-9);
  EXPECT_NEAR(p.reduced_impedance(0), 0.03, 1e-12);
  EXPECT_NEAR(p.c_j_ff[0], 32.8839226223, 1e-6);
  EXPECT_NEAR(p.l_j_nh[0], 1.2324707707, 1e-6);

  p.l_j_nh[0] = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  CircuitParams bad = CircuitParams::homogeneous(2, 40.0, 7.5, 25.0, 0.03);
  bad.c_j_ff = {1.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
