#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace kslice;

namespace {

std::set<std::vector<bool>> solution_set(const IntMatrix& m) {
  std::set<std::vector<bool>> out;
  for (const auto& v : characteristic_sublinks(m).enumerate()) out.insert(v.to_bools());
  return out;
}

}  // namespace

TEST(Characteristic, ZeroFramedKnotHasTwoSolutions) {
  const std::set<std::vector<bool>> expected{{false}, {true}};
  EXPECT_EQ(solution_set(IntMatrix{{0}}), expected);
}

TEST(Characteristic, DiagonalTwoThree) {
  const std::set<std::vector<bool>> expected{{false, true}, {true, true}};
  EXPECT_EQ(solution_set(IntMatrix{{2, 0}, {0, 3}}), expected);
}

TEST(Characteristic, EvenMatrixAdmitsEmptySublink) {
  std::mt19937 rng(21);
  for (int i = 0; i < 50; ++i) {
    auto m = oracle::random_symmetric(rng, 1 + rng() % 8, -4, 4);
    for (std::size_t k = 0; k < m.size(); ++k) m(k, k) = 2 * (m(k, k) / 2);
    const auto sols = characteristic_sublinks(m);
    EXPECT_TRUE(sols.contains(Gf2Vector(m.size())));
  }
}

TEST(Characteristic, EmptyMatrix) {
  const auto sols = characteristic_sublinks(IntMatrix(0));
  EXPECT_EQ(sols.enumerate().size(), 1u);
}

TEST(Characteristic, RejectsNonSymmetric) {
  try {
    characteristic_sublinks(IntMatrix{{0, 1}, {0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_symmetric);
  }
}

TEST(Characteristic, MatchesBruteForce) {
  std::mt19937 rng(1234);
  for (int i = 0; i < 150; ++i) {
    const auto m = oracle::random_symmetric(rng, 1 + rng() % 12, -3, 3);
    const auto brute = oracle::brute_force_characteristic(m);
    ASSERT_FALSE(brute.empty());
    EXPECT_EQ(solution_set(m), brute) << to_string(m);
  }
}

TEST(Characteristic, ContainsAgreesWithIsCharacteristic) {
  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto m = oracle::random_symmetric(rng, 1 + rng() % 10, -2, 2);
    const auto sols = characteristic_sublinks(m);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<bool> mask(m.size());
      for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = rng() % 2;
      EXPECT_EQ(sols.contains(Gf2Vector::from_bools(mask)), is_characteristic(m, mask));
    }
  }
}

TEST(Gf2Vector, WideVectorsCrossWordBoundaries) {
  Gf2Vector a(130), b(130);
  a.set(0);
  a.set(64);
  a.set(129);
  b.set(64);
  const auto c = a ^ b;
  EXPECT_TRUE(c.test(0));
  EXPECT_FALSE(c.test(64));
  EXPECT_TRUE(c.test(129));
  EXPECT_EQ(c.count(), 2u);
  EXPECT_EQ(Gf2Vector::from_bools(c.to_bools()), c);
}
