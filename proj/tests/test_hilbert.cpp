#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qlat/hilbert.hpp"

using namespace qlat;

TEST(Sector, SmallDimensions) {
  EXPECT_EQ(SpinBasisSector(4, 2).dimension(), 6U);
  const SpinBasisSector allup(12, 0);
  ASSERT_EQ(allup.dimension(), 1U);
  EXPECT_EQ(allup.state(0), 0U);
}

TEST(Sector, HalfFilledTwelveMatchesFactorialBinomial) {
  EXPECT_EQ(SpinBasisSector(12, 6).dimension(), oracle::binomial_by_factorials(12, 6));
  EXPECT_EQ(SpinBasisSector(12, 6).dimension(), 924U);
}

TEST(Sector, BinomialTableMatchesFactorials) {
  for (int m = 0; m <= 20; ++m) {
    for (int k = 0; k <= m; ++k) EXPECT_EQ(binomial(m, k), oracle::binomial_by_factorials(m, k)) << m << " " << k;
  }
}

TEST(Sector, RejectsOutOfRange) {
  EXPECT_THROW(SpinBasisSector(0, 0), DomainError);
  EXPECT_THROW(SpinBasisSector(33, 1), DomainError);
  EXPECT_THROW(SpinBasisSector(4, 5), DomainError);
  EXPECT_THROW(SpinBasisSector(4, -1), DomainError);
}

TEST(Sector, StatesAscendWithFixedPopcountAndRoundTrip) {
  for (int L = 1; L <= 12; ++L) {
    for (int n = 0; n <= L; ++n) {
      const SpinBasisSector s(L, n);
      ASSERT_EQ(s.dimension(), binomial(L, n));
      for (std::size_t k = 0; k < s.dimension(); ++k) {
        EXPECT_EQ(std::popcount(s.state(k)), n);
        EXPECT_LT(s.state(k), Bits{1} << L);
        if (k > 0) {
          EXPECT_LT(s.state(k - 1), s.state(k));
        }
        ASSERT_EQ(s.index_of(s.state(k)), k);
      }
    }
  }
}

TEST(Sector, IndexOfRejectsForeignConfigurations) {
  const SpinBasisSector s(6, 3);
  EXPECT_FALSE(s.index_of(0b000011).has_value());
  EXPECT_FALSE(s.index_of(0b1000111).has_value());
  EXPECT_FALSE(s.contains(0b1111));
  EXPECT_TRUE(s.contains(0b101010));
}

TEST(Sector, AllSectorsCoverTheFullSpaceOnce) {
  for (int L = 1; L <= 16; ++L) {
    std::vector<Bits> all;
    for (int n = 0; n <= L; ++n) {
      const SpinBasisSector s(L, n);
      all.insert(all.end(), s.states().begin(), s.states().end());
    }
    ASSERT_EQ(all.size(), std::size_t{1} << L);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
    EXPECT_EQ(all.back(), (Bits{1} << L) - 1);
  }
}

TEST(Sector, SpinFlipIsABijectionOntoTheComplementSector) {
  for (int L = 1; L <= 10; ++L) {
    for (int n = 0; n <= L; ++n) {
      const SpinBasisSector s(L, n);
      const SpinBasisSector t(L, L - n);
      std::set<Bits> image;
      for (Bits c : s.states()) {
        const Bits f = spin_flip(c, L);
        ASSERT_TRUE(t.contains(f));
        image.insert(f);
      }
      EXPECT_EQ(image.size(), t.dimension());
    }
  }
}

TEST(Sector, ReflectIsAnInvolutionPreservingPopcount) {
  for (Bits c = 0; c < (Bits{1} << 9); ++c) {
    EXPECT_EQ(reflect(reflect(c, 9), 9), c);
    EXPECT_EQ(std::popcount(reflect(c, 9)), std::popcount(c));
  }
  EXPECT_EQ(reflect(0b001, 3), 0b100U);
}

TEST(SectorDimensions, PascalRows) {
  EXPECT_EQ(sector_dimensions(2), (std::vector<std::uint64_t>{1, 2, 1}));
  EXPECT_EQ(sector_dimensions(4), (std::vector<std::uint64_t>{1, 4, 6, 4, 1}));
  const auto d12 = sector_dimensions(12);
  EXPECT_EQ(std::accumulate(d12.begin(), d12.end(), std::uint64_t{0}), 4096U);
  EXPECT_THROW(sector_dimensions(0), DomainError);
}

TEST(Ladder, LoweringDownsOneSite) {
  const SpinConfiguration up{0, 3};
  const auto lowered = apply_lowering(up, 2);
  ASSERT_TRUE(lowered.has_value());
  EXPECT_EQ(lowered->bits, 0b010U);
  EXPECT_TRUE(lowered->is_down(2));
  EXPECT_EQ(lowered->down_count(), 1);
  EXPECT_FALSE(apply_lowering(*lowered, 2).has_value());
  EXPECT_THROW(apply_lowering(up, 4), DomainError);
  EXPECT_THROW(apply_lowering(up, 0), DomainError);
}

TEST(Ladder, RaisingUndoesLowering) {
  const SpinConfiguration c{0b101, 3};
  EXPECT_FALSE(apply_raising(c, 2).has_value());
  const auto r = apply_raising(c, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->bits, 0b001U);
  EXPECT_EQ(apply_lowering(*r, 3)->bits, c.bits);
  EXPECT_THROW(apply_raising(c, 4), DomainError);
}
