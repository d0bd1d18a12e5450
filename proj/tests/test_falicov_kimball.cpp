#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qlat/falicov_kimball.hpp"

using namespace qlat;

namespace {

std::shared_ptr<const LatticeSpec> shared(LatticeSpec l) { return std::make_shared<const LatticeSpec>(std::move(l)); }

IonConfiguration two_site(std::vector<std::uint8_t> w) { return {shared(make_chain(2)), std::move(w)}; }

IonConfiguration random_neutral(const std::shared_ptr<const LatticeSpec>& lat, std::mt19937_64& rng) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(lat->site_count()), 0);
  std::fill(w.begin(), w.begin() + lat->site_count() / 2, 1);
  std::shuffle(w.begin(), w.end(), rng);
  return {lat, w};
}

}  // namespace

TEST(IonConfiguration, Validation) {
  EXPECT_THROW(two_site({1}), DomainError);
  EXPECT_THROW(two_site({1, 2}), DomainError);
  EXPECT_THROW(IonConfiguration(nullptr, {}), DomainError);
  EXPECT_EQ(two_site({1, 0}).ion_count(), 1);
}

TEST(IonConfiguration, StaggeredField) {
  auto lat = shared(make_box({4, 4}, true));
  const auto even = checkerboard(lat, 0);
  const auto odd = checkerboard(lat, 1);
  for (int s : even.staggered_field()) EXPECT_EQ(s, 1);
  for (int s : odd.staggered_field()) EXPECT_EQ(s, -1);
  EXPECT_EQ(even.complement().occupancy(), odd.occupancy());
  EXPECT_EQ(even.ion_count(), 8);
  EXPECT_EQ(configuration_from_mask(lat, even.mask()).occupancy(), even.occupancy());
}

TEST(OneBody, TwoSiteTranscription) {
  const double U = 3.0;
  const Eigen::MatrixXd h = one_body_matrix(two_site({1, 0}), U);
  Eigen::Matrix2d ref;
  ref << 2 * U, -1, -1, 0;
  EXPECT_EQ(Eigen::MatrixXd(ref), h);
  const auto free = single_particle_levels(two_site({1, 0}), 0.0);
  EXPECT_NEAR(free[0], -1.0, 1e-15);
  EXPECT_NEAR(free[1], 1.0, 1e-15);
}

TEST(OneBody, TwoSiteGroundEnergyClosedForm) {
  for (double U : {0.5, 2.0, 4.0, 10.0}) {
    EXPECT_NEAR(electron_ground_energy(two_site({1, 0}), U, 1), U - std::sqrt(U * U + 1), 1e-13);
  }
  EXPECT_NEAR(electron_ground_energy(two_site({1, 0}), 4.0, 1), -0.1231056256, 1e-10);
}

TEST(OneBody, ElectronCountEdges) {
  auto lat = shared(make_box({4, 4}, true));
  std::mt19937_64 rng(5);
  const auto cfg = random_neutral(lat, rng);
  EXPECT_EQ(electron_ground_energy(cfg, 8.0, 0), 0.0);
  EXPECT_NEAR(electron_ground_energy(cfg, 8.0, 16), 2 * 8.0 * cfg.ion_count(), 1e-10);
  EXPECT_THROW(electron_ground_energy(cfg, 8.0, 17), DomainError);
  EXPECT_THROW(electron_ground_energy(cfg, 8.0, -1), DomainError);
}

TEST(OneBody, HoppingSpectrumOfRings) {
  for (int N : {5, 6, 9}) {
    auto lat = shared(make_chain(N, true));
    const auto levels = single_particle_levels(IonConfiguration(lat, std::vector<std::uint8_t>(N, 0)), 8.0);
    std::vector<double> ref;
    for (int k = 0; k < N; ++k) ref.push_back(-2.0 * std::cos(2.0 * M_PI * k / N));
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < N; ++k) EXPECT_NEAR(levels[static_cast<std::size_t>(k)], ref[static_cast<std::size_t>(k)], 1e-10);
  }
}

TEST(OneBody, HoppingSpectrumOfTorus) {
  auto lat = shared(make_box({4, 6}, true));
  const auto levels = single_particle_levels(IonConfiguration(lat, std::vector<std::uint8_t>(24, 0)), 1.0);
  std::vector<double> ref;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 6; ++b) ref.push_back(-2 * std::cos(2 * M_PI * a / 4) - 2 * std::cos(2 * M_PI * b / 6));
  }
  std::sort(ref.begin(), ref.end());
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(levels[k], ref[k], 1e-10);
}

TEST(ParticleHole, ComplementHasTheSameGroundEnergy) {
  std::mt19937_64 rng(42);
  for (const auto& l : {make_box({4, 4}, true), make_box({2, 2, 2}, true), make_box({3, 4}, false)}) {
    auto lat = shared(l);
    for (int t = 0; t < 50; ++t) {
      const auto cfg = random_neutral(lat, rng);
      const int ne = lat->site_count() / 2;
      EXPECT_NEAR(electron_ground_energy(cfg, 8.0, ne), electron_ground_energy(cfg.complement(), 8.0, ne), 1e-9);
    }
  }
}

TEST(FreeEnergy, SingleEmptySite) {
  auto lat = shared(make_chain(1));
  const IonConfiguration cfg(lat, {0});
  for (double beta : {0.1, 1.0, 7.0}) EXPECT_NEAR(electron_free_energy(cfg, 8.0, beta, 0.0), -std::log(2.0) / beta, 1e-15);
  EXPECT_THROW(electron_free_energy(cfg, 8.0, 0.0, 0.0), DomainError);
}

TEST(FreeEnergy, ZeroTemperatureLimit) {
  auto lat = shared(make_box({4, 4}, true));
  const auto cfg = checkerboard(lat, 0);
  const double U = 2.0, mu = 1.7;
  const auto levels = single_particle_levels(cfg, U);
  double ref = 0.0;
  for (double e : levels) {
    ASSERT_GT(std::abs(e - mu), 1e-2);
    if (e < mu) ref += e - mu;
  }
  EXPECT_NEAR(electron_free_energy(cfg, U, 1e4, mu), ref, 1e-8);
}

TEST(FreeEnergy, MonotoneInLevelsAndTemperatureEnvelope) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> levels(12);
    for (double& e : levels) e = u(rng);
    const double f = free_energy_from_levels(levels, 1.0, 0.0);
    EXPECT_TRUE(std::isfinite(f));
    auto lower = levels;
    lower[static_cast<std::size_t>(t % 12)] -= 0.5;
    EXPECT_LT(free_energy_from_levels(lower, 1.0, 0.0), f);
    for (double b1 : {0.5, 1.0, 3.0}) {
      const double b2 = 2.5 * b1;
      EXPECT_GE(free_energy_from_levels(levels, b1, 0.0),
                free_energy_from_levels(levels, b2, 0.0) - std::log(2.0) * 12 / b1);
    }
  }
}

TEST(Checkerboard, FourByFourPeriodicSelectsTheCheckerboards) {
  const auto rep = checkerboard_check(make_box({4, 4}, true), 8.0);
  EXPECT_EQ(rep.configurations_scanned, 12870U);
  EXPECT_TRUE(rep.argmin_is_checkerboards);
  ASSERT_EQ(rep.argmin.size(), 2U);
  EXPECT_NEAR(rep.checkerboard_energies[0], rep.checkerboard_energies[1], 1e-12);
  EXPECT_NEAR(rep.min_energy, -1.929116914940444, 1e-12);
  EXPECT_GT(rep.second_energy - rep.min_energy, 0.1);
}

TEST(Checkerboard, TwoByTwoOpenRegression) {
  const auto rep = checkerboard_check(make_box({2, 2}, false), 8.0);
  EXPECT_EQ(rep.configurations_scanned, 6U);
  EXPECT_EQ(rep.argmin, (std::vector<Bits>{6, 9}));
  EXPECT_TRUE(rep.argmin_is_checkerboards);
  EXPECT_NEAR(rep.min_energy, -0.24621125123532109, 1e-13);
  EXPECT_NEAR(rep.second_energy, -0.12451549659710226, 1e-13);
}

TEST(Checkerboard, Refusals) {
  EXPECT_THROW(checkerboard_check(make_chain(5, true), 8.0), DomainError);
  EXPECT_THROW(checkerboard_check(make_box({6, 4}, true), 8.0), DomainError);
  EXPECT_THROW(checkerboard_check(make_box({2, 2}, false), 0.0), DomainError);
}

TEST(Coupling, LeadingOrderOnTheTorus) {
  const LatticeSpec torus = make_box({8, 8}, true);
  const auto j8 = effective_coupling_estimate(torus, 8.0);
  const auto j32 = effective_coupling_estimate(torus, 32.0);
  EXPECT_EQ(j32.pair_bonds, 6);
  EXPECT_GE(j32.four_U_J, 0.8);
  EXPECT_LE(j32.four_U_J, 1.2);
  EXPECT_LT(std::abs(j32.four_U_J - 1), std::abs(j8.four_U_J - 1));
  EXPECT_FALSE(j32.warning.has_value());
  for (double U : {2.0, 3.0, 5.0, 16.0}) EXPECT_GT(effective_coupling_estimate(torus, U).J, 0.0);
}

TEST(Coupling, RefusalsAndWarnings) {
  EXPECT_THROW(effective_coupling_estimate(make_box({4, 4}, true), 1.5), DomainError);
  EXPECT_THROW(effective_coupling_estimate(make_chain(5, true), 8.0), DomainError);
  EXPECT_TRUE(effective_coupling_estimate(make_box({2, 4}, false), 8.0).warning.has_value());
}

TEST(Metropolis, InfiniteTemperatureIsUnbiased) {
  const LatticeSpec lat = make_box({4, 4}, true);
  MetropolisOptions o;
  o.beta = 0.0;
  o.sweeps = 100000;
  o.seed = 3;
  const auto st = metropolis_ions(lat, o);
  EXPECT_EQ(st.acceptance, 1.0);
  for (int x = 0; x < 16; ++x) {
    EXPECT_LE(std::abs(st.mean_s[static_cast<std::size_t>(x)]), 5 * st.stderr_s[static_cast<std::size_t>(x)] + 1e-12);
  }
}

TEST(Metropolis, SeedDeterminism) {
  const LatticeSpec lat = make_box({4, 4}, true);
  MetropolisOptions o;
  o.beta = 2.0;
  o.sweeps = 200;
  o.seed = 17;
  const auto a = metropolis_ions(lat, o);
  const auto b = metropolis_ions(lat, o);
  EXPECT_EQ(a.mean_s, b.mean_s);
  EXPECT_EQ(a.stderr_s, b.stderr_s);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.final_occupancy, b.final_occupancy);
  EXPECT_DOUBLE_EQ(a.mu, 8.0);
}

TEST(Metropolis, ConservesIonNumberAndPins) {
  const LatticeSpec lat = make_box({4, 4}, false);
  MetropolisOptions o;
  o.beta = 1.0;
  o.sweeps = 50;
  o.pinning = {{0, 1}, {3, -1}};
  const auto st = metropolis_ions(lat, o);
  EXPECT_EQ(std::count(st.final_occupancy.begin(), st.final_occupancy.end(), 1), 8);
  EXPECT_EQ(st.mean_s[0], 1.0);
  EXPECT_EQ(st.mean_s[3], -1.0);
  EXPECT_EQ(st.stderr_s[0], 0.0);
}

TEST(Metropolis, Refusals) {
  MetropolisOptions o;
  o.pinning = {{5, 1}};
  EXPECT_THROW(metropolis_ions(make_box({4, 4}, false), o), DomainError);
  EXPECT_THROW(metropolis_ions(make_box({3, 3}, false), {}), DomainError);
  MetropolisOptions all_plus;
  for (int x = 0; x < 4; ++x) all_plus.pinning[x] = 1;
  EXPECT_NO_THROW(metropolis_ions(make_box({2, 2}, false), all_plus));
  MetropolisOptions neg;
  neg.beta = -1.0;
  EXPECT_THROW(metropolis_ions(make_box({2, 2}, false), neg), DomainError);
}

TEST(Pinning111, PlaneAndSides) {
  const LatticeSpec cube = make_box({4, 4, 4}, false);
  EXPECT_EQ(plane_111_level(cube), 4);
  const auto pin = pinning_111(cube);
  EXPECT_EQ(pin.size(), 47U);
  for (const auto& [x, s] : pin) {
    EXPECT_TRUE(cube.on_boundary(x));
    EXPECT_EQ(s, side_of_111_plane(cube, x));
    EXPECT_NE(s, 0);
  }
  EXPECT_EQ(side_of_111_plane(cube, 0), -1);
  EXPECT_EQ(side_of_111_plane(cube, 63), 1);
}

TEST(Pinning111, LowTemperatureProfileFollowsThePlane) {
  const LatticeSpec cube = make_box({4, 4, 4}, false);
  MetropolisOptions o;
  o.U = 8.0;
  o.beta = 20.0;
  o.sweeps = 1000;
  o.seed = 7;
  o.pinning = pinning_111(cube);
  const auto st = metropolis_ions(cube, o);
  int off_plane = 0, agree = 0;
  for (int x = 0; x < cube.site_count(); ++x) {
    const int side = side_of_111_plane(cube, x);
    if (o.pinning.count(x) || side == 0) continue;
    ++off_plane;
    if (st.mean_s[static_cast<std::size_t>(x)] * side > 0) ++agree;
  }
  EXPECT_EQ(off_plane, 5);
  EXPECT_GE(agree, 0.9 * off_plane);
}
