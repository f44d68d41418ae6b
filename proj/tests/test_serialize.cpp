#include "tncirc/serialize.hpp"

#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace tncirc;

TEST(Serialize, MpsRoundTripIsBitwise) {
  const BundledMps s = tncirc::testing::random_bundled_mps({3, 4, 3}, 5, 2, 77);
  std::stringstream buf;
  save_mps(buf, s, R"({"note":"test"})");
  std::string meta;
  const BundledMps back = load_mps(buf, &meta);
  EXPECT_EQ(meta, R"({"note":"test"})");
  EXPECT_EQ(back.center, s.center);
  EXPECT_EQ(back.excitation_count, s.excitation_count);
  ASSERT_EQ(back.tensors.size(), s.tensors.size());
  for (std::size_t i = 0; i < s.tensors.size(); ++i) {
    ASSERT_EQ(back.tensors[i].shape(), s.tensors[i].shape());
    for (Index j = 0; j < s.tensors[i].size(); ++j) {
      EXPECT_EQ(back.tensors[i].data()[j], s.tensors[i].data()[j]);
    }
  }
}

TEST(Serialize, MpoRoundTripKeepsOffset) {
  Mpo op = identity_mpo({2, 2});
  op.energy_offset = -3.75;
  std::stringstream buf;
  save_mpo(buf, op);
  const Mpo back = load_mpo(buf);
  EXPECT_EQ(back.energy_offset, -3.75);
  ASSERT_EQ(back.n_sites(), 2);
}

TEST(Serialize, RejectsWrongMagicAndKind) {
  std::stringstream buf("not a container at all");
  EXPECT_THROW(load_mps(buf), std::runtime_error);

  std::stringstream buf2;
  save_mpo(buf2, identity_mpo({2}));
  EXPECT_THROW(load_mps(buf2), std::runtime_error);
}

TEST(Serialize, RejectsTruncatedPayload) {
  const BundledMps s = tncirc::testing::random_bundled_mps({2, 2}, 2, 1, 78);
  std::stringstream buf;
  save_mps(buf, s);
  std::string whole = buf.str();
  std::stringstream cut(whole.substr(0, whole.size() / 2));
  EXPECT_THROW(load_mps(cut), std::runtime_error);
}

TEST(Serialize, RejectsUnsupportedVersion) {
  const BundledMps s = tncirc::testing::random_bundled_mps({2, 2}, 2, 1, 79);
  std::stringstream buf;
  save_mps(buf, s);
  std::string whole = buf.str();
  whole[4] = 99;  // patch the little-endian version field
  std::stringstream bad(whole);
  EXPECT_THROW(load_mps(bad), std::runtime_error);
}
