#include "tncirc/mps.hpp"

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace tncirc;
using tncirc::testing::dense_state;
using tncirc::testing::random_bundled_mps;

namespace {

BundledMps simple_product_state(const std::vector<Vector>& site_vectors) {
  return BundledMps::from_product_states({site_vectors});
}

}  // namespace

TEST(BundledMps, ProductStateCanonicalizeLeavesTensorsAlmostUnchanged) {
  std::vector<Vector> vs;
  for (int i = 0; i < 4; ++i) {
    Vector v = Vector::Zero(3);
    v[i % 3] = 1.0;
    vs.push_back(v);
  }
  const BundledMps s = simple_product_state(vs);
  for (int c = 0; c < 4; ++c) {
    const BundledMps moved = canonicalize(s, c);
    EXPECT_EQ(moved.center, c);
    for (int l = 0; l + 1 < 4; ++l) EXPECT_EQ(moved.bond_dim(l), 1);
    // Dense states equal up to a unit phase.
    const Vector a = dense_state(s, 0);
    const Vector b = dense_state(moved, 0);
    const Complex phase = b.dot(a);
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
    EXPECT_LT((phase * b - a).norm(), 1e-12);
  }
}

TEST(BundledMps, GaugeInvarianceOfOverlaps) {
  const BundledMps s = random_bundled_mps({3, 3, 3, 3, 3, 3}, 5, 3, 13);
  const Matrix g0 = bundle_overlap(s, s);
  EXPECT_LT((g0 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);

  BundledMps moved = canonicalize(s, s.n_sites() - 1);
  moved = canonicalize(moved, 0);
  const Matrix g1 = bundle_overlap(moved, moved);
  EXPECT_LT((g1 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);

  // Cross overlaps with the original are preserved.
  const Matrix cross = bundle_overlap(s, moved);
  EXPECT_LT((cross - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BundledMps, CanonicalizePreservesDenseAmplitudes) {
  const BundledMps s = random_bundled_mps({2, 3, 2, 3, 2}, 4, 2, 29);
  for (int member = 0; member < 2; ++member) {
    const Vector before = dense_state(s, member);
    for (int c : {2, 4, 0}) {
      const BundledMps moved = canonicalize(s, c);
      const Vector after = dense_state(moved, member);
      EXPECT_LT((before - after).norm(), 1e-12);
    }
  }
}

TEST(BundledMps, GaugeConditionsHoldSiteBySite) {
  BundledMps s = random_bundled_mps({3, 4, 3, 4}, 6, 2, 31);
  for (int c : {0, 2, 3}) {
    s = canonicalize(s, c);
    EXPECT_LT(gauge_defect(s), 1e-12);
  }
}

TEST(BundledMps, FromProductStatesBuildsOrthonormalBundle) {
  std::vector<std::vector<Vector>> members;
  for (int e = 0; e < 3; ++e) {
    std::vector<Vector> vs;
    for (int i = 0; i < 5; ++i) {
      Vector v = Vector::Zero(3);
      v[(i + e) % 3] = 1.0;
      if (e > 0) v[(i + e + 1) % 3] = 0.5;  // non-orthogonal members
      vs.push_back(v.normalized());
    }
    members.push_back(vs);
  }
  const BundledMps s = BundledMps::from_product_states(members);
  EXPECT_EQ(s.excitation_count, 3);
  const Matrix g = bundle_overlap(s, s);
  EXPECT_LT((g - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  s.check_valid();
}

TEST(BundledMps, BoundaryBondsAreOne) {
  const BundledMps s = random_bundled_mps({2, 2, 2}, 3, 2, 37);
  EXPECT_EQ(s.site(0).dim(0), 1);
  EXPECT_EQ(s.site(2).dim(2), 1);
}

TEST(BundledMps, RejectsDependentMembers) {
  std::vector<Vector> vs(3, Vector::Ones(2).normalized());
  EXPECT_THROW(BundledMps::from_product_states({vs, vs}), std::invalid_argument);
}
