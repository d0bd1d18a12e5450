#include <cmath>

#include <gtest/gtest.h>

#include "qlat/droplet.hpp"

using namespace qlat;

namespace {

constexpr double kDelta = 2.125;
constexpr double kQ = 0.25;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Amplitude of a single down spin at site s: q^{b+1-s} on a kink [., b], q^{s+1-a} on an antikink [a, .].
double single_down_kink(int b, int s, double q) { return std::pow(q, b + 1 - s); }
double single_down_antikink(int a, int s, double q) { return std::pow(q, s + 1 - a); }

}  // namespace

TEST(KinkState, ThreeSiteOneDownAmplitudes) {
  const auto k = kink_state(1, 3, 1, kQ);
  const auto ak = antikink_state(1, 3, 1, kQ);
  const std::vector<double> kraw{1.0 / 64, 1.0 / 16, 1.0 / 4};
  const std::vector<double> akraw{1.0 / 4, 1.0 / 16, 1.0 / 64};
  const double nk = norm(kraw), nak = norm(akraw);
  // sector (3, 1) lists down spins at sites 1, 2, 3 in order
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(k[i], kraw[i] / nk, 1e-15);
    EXPECT_NEAR(ak[i], akraw[i] / nak, 1e-15);
    EXPECT_DOUBLE_EQ(kink_coefficient(KinkKind::Kink, 3, Bits{1} << i, kQ), kraw[i]);
    EXPECT_DOUBLE_EQ(kink_coefficient(KinkKind::Antikink, 3, Bits{1} << i, kQ), akraw[i]);
  }
}

TEST(KinkState, TrivialCases) {
  EXPECT_EQ(kink_state(1, 5, 0, kQ), std::vector<double>{1.0});
  EXPECT_EQ(antikink_state(2, 4, 0, kQ), std::vector<double>{1.0});
  EXPECT_EQ(kink_state(1, 1, 1, kQ), std::vector<double>{1.0});
  EXPECT_THROW(kink_state(3, 2, 0, kQ), DomainError);
  EXPECT_THROW(kink_state(1, 3, 4, kQ), DomainError);
  EXPECT_THROW(antikink_state(1, 3, 1, 1.0), DomainError);
}

TEST(KinkState, ReflectionExchangesKinkAndAntikink) {
  for (int len = 1; len <= 10; ++len) {
    for (int n = 0; n <= len; ++n) {
      const SpinBasisSector s(len, n);
      const auto k = kink_state(3, 2 + len, n, 0.4);
      const auto ak = antikink_state(3, 2 + len, n, 0.4);
      for (std::size_t i = 0; i < s.dimension(); ++i) {
        EXPECT_NEAR(ak[i], k[s.index_unchecked(reflect(s.state(i), len))], 1e-14);
      }
    }
  }
}

TEST(KinkState, DeepStatesDoNotUnderflow) {
  const auto k = kink_state(1, 30, 15, 0.01);
  EXPECT_NEAR(norm(k), 1.0, 1e-12);
  for (double v : k) EXPECT_TRUE(std::isfinite(v));
}

TEST(KinkAnnihilation, ZeroModesOfTheKinkHamiltonian) {
  EXPECT_LE(kink_annihilation_check(10, 3, kDelta), 1e-10);
  EXPECT_LE(kink_annihilation_check(10, 0, kDelta), 1e-12);
  for (int L = 2; L <= 12; ++L) {
    for (int n = 0; n <= L; ++n) {
      for (double d : {1.25, 2.125, 5.0}) {
        const double k = kink_annihilation_check(L, n, d);
        EXPECT_LE(k, 1e-10);
        EXPECT_NEAR(antikink_annihilation_check(L, n, d), k, 1e-12);
      }
    }
  }
}

TEST(KinkAnnihilation, WrongSignConventionIsNotAZeroMode) {
  // The kink state is not annihilated by the antikink operator.
  const SpinBasisSector s(8, 3);
  const auto h = build_chain_hamiltonian(8, kDelta, BoundarySign::Minus, BoundarySign::Plus, s);
  EXPECT_GT(norm(h.multiply(kink_state(1, 8, 3, kQ))), 1e-3);
}

TEST(DropletState, MatchesDirectTensorExpansion) {
  // (L=4, n=2, x=2): one down on [1,2] (kink) times one down on [3,4] (antikink).
  const auto xi = droplet_state(4, 2, 2, kQ);
  const SpinBasisSector s(4, 2);
  ASSERT_EQ(xi.size(), 6U);
  std::vector<double> ref(6, 0.0);
  double nn = 0.0;
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 3; s2 <= 4; ++s2) {
      const Bits c = (Bits{1} << (s1 - 1)) | (Bits{1} << (s2 - 1));
      const double amp = single_down_kink(2, s1, kQ) * single_down_antikink(3, s2, kQ);
      ref[*s.index_of(c)] = amp;
      nn += amp * amp;
    }
  }
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(xi[i], ref[i] / std::sqrt(nn), 1e-15);
  // the leading configuration has both downs adjacent to the cut
  EXPECT_NEAR(droplet_state_raw(4, 2, 2, kQ)[*s.index_of(0b0110)], kQ * kQ, 1e-17);
}

TEST(DropletState, EndpointSectors) {
  for (int L : {1, 4, 7}) {
    const auto down = droplet_state(L, L, L / 2, kQ);
    ASSERT_EQ(down.size(), 1U);
    EXPECT_EQ(down[0], 1.0);
  }
  for (int x = 0; x <= 12; ++x) EXPECT_EQ(droplet_state(12, 0, x, kQ), std::vector<double>{1.0});
  EXPECT_THROW(droplet_state(6, 4, 1, kQ), DomainError);
  EXPECT_THROW(droplet_state(6, 4, 5, kQ), DomainError);
}

TEST(DropletState, SupportRespectsTheCut) {
  const int L = 10, n = 5;
  const SpinBasisSector s(L, n);
  for (int x : droplet_centers(L, n)) {
    const auto xi = droplet_state(L, n, x, kQ);
    const Bits left_mask = (Bits{1} << x) - 1;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
      const bool consistent = std::popcount(s.state(i) & left_mask) == n / 2;
      if (consistent) {
        EXPECT_GT(xi[i], 0.0);
      } else {
        EXPECT_EQ(xi[i], 0.0);
      }
    }
  }
}

TEST(DropletSubspace, RankIsLMinusNPlusOne) {
  const DropletFamily f = droplet_subspace(12, 5, kQ);
  EXPECT_EQ(f.centers.size(), 8U);
  EXPECT_EQ(f.basis.rank(), 8U);
  const DropletFamily one = droplet_subspace(3, 3, kQ);
  EXPECT_EQ(one.basis.rank(), 1U);
  for (int L = 1; L <= 10; ++L) {
    for (int n = 0; n <= L; ++n) EXPECT_EQ(droplet_subspace(L, n, kQ).basis.rank(), droplet_subspace_dimension(L, n));
  }
  EXPECT_EQ(droplet_subspace_dimension(12, 0), 1U);
}

TEST(DropletSubspace, GramSpectrumRegression) {
  const DropletFamily f = droplet_subspace(8, 4, kQ);
  const auto g = gram_spectrum(f.raw_vectors);
  ASSERT_EQ(g.size(), 5U);
  EXPECT_GT(g.front(), 0.0);
  EXPECT_NEAR(g.front(), 6.3812838667036883e-08, 1e-20);
  EXPECT_NEAR(g.back(), 6.8590686363530031e-08, 1e-20);
}

TEST(DropletSubspace, RankDeficiencyIsReported) {
  try {
    droplet_subspace(8, 4, kQ, 1.5);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.gram_spectrum().size(), 5U);
  }
}

TEST(DropletMultiplet, FullSectorGivesZeroWindow) {
  const auto r = verify_theorem(7, 7, kDelta);
  EXPECT_EQ(r.multiplet_size, 1U);
  EXPECT_EQ(r.window_halfwidth, 0.0);
  EXPECT_EQ(r.subspace_distance, 0.0);
  EXPECT_FALSE(r.gap_value.has_value());
}

TEST(DropletMultiplet, HalfFilledTwelveRegression) {
  const auto r = verify_theorem(12, 6, kDelta);
  const double q = r.q;
  EXPECT_NEAR(q, 0.25, 1e-15);
  EXPECT_EQ(r.multiplet_size, 7U);
  EXPECT_LE(r.window_halfwidth, 10 * std::pow(q, 6));
  EXPECT_LE(r.subspace_distance, 10 * std::pow(q, 3));
  EXPECT_NEAR(r.window_halfwidth, 0.00039605796953451344, 1e-12);
  EXPECT_NEAR(r.subspace_distance, 0.0056986442429941813, 1e-9);
  EXPECT_NEAR(*r.gap_value, 0.54941207182953278, 1e-10);
  EXPECT_FALSE(r.degenerate_cut);
  EXPECT_NEAR(r.gamma_ref, 9.0 / 17.0, 1e-15);
}

TEST(DropletMultiplet, WindowShrinksGeometrically) {
  const auto r4 = verify_theorem(12, 4, kDelta);
  const auto r6 = verify_theorem(12, 6, kDelta);
  EXPECT_LE(r6.window_halfwidth / r4.window_halfwidth, 10 * kQ * kQ);
}

TEST(DropletMultiplet, WindowAndDistanceDecreaseWithN) {
  double prev_window = 1.0, prev_distance = 1.0;
  for (int n = 3; n <= 9; ++n) {
    const auto r = verify_theorem(12, n, kDelta);
    EXPECT_LE(r.window_halfwidth, prev_window) << n;
    if (n >= 4 && n <= 8) {
      EXPECT_LT(r.subspace_distance, prev_distance) << n;
    }
    prev_window = r.window_halfwidth;
    prev_distance = r.subspace_distance;
  }
}

TEST(DropletMultiplet, EndpointEnergies) {
  const double A = boundary_field_amplitude(kDelta);
  EXPECT_NEAR(verify_theorem(12, 0, kDelta).eigenvalues[0], -A, 1e-12);
  EXPECT_NEAR(verify_theorem(12, 12, kDelta).eigenvalues[0], A, 1e-12);
}

TEST(DropletMultiplet, GapApproachesReferenceFromAbove) {
  const double gamma = droplet_gap_reference(kDelta);
  for (int m : {2, 3}) {
    double prev = 1.0;
    for (int n = 5; n <= 11; ++n) {
      const double gap = *verify_theorem(n + m, n, kDelta).gap_value;
      EXPECT_GT(gap, gamma);
      EXPECT_LT(gap, prev) << "L-n=" << m << " n=" << n;
      prev = gap;
    }
  }
}
