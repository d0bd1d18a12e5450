#pragma once

// Spinless Falicov-Kimball model
//
//   H = - sum_{<x,y>} c+_x c_y + 2U sum_x W(x) c+_x c_x
//
// For a fixed ion field W the electrons are free, so every quantity below
// comes from the spectrum of the one-body matrix h = -adjacency + 2U diag(W).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlat/errors.hpp"
#include "qlat/hilbert.hpp"
#include "qlat/lattice.hpp"

namespace qlat {

inline constexpr int kMaxFermionSites = 4096;
inline constexpr int kMaxCheckerboardSites = 20;
inline constexpr int kMaxMetropolisSites = 512;

/// Ion occupancy W(x) in {0,1} on a lattice. The staggered spin
/// s_x = (-1)^{|x|} (2W(x) - 1) is always derived, never stored.
class IonConfiguration {
 public:
  IonConfiguration(std::shared_ptr<const LatticeSpec> lattice, std::vector<std::uint8_t> occupancy)
      : lattice_(std::move(lattice)), occupancy_(std::move(occupancy)) {
    if (!lattice_) throw DomainError("IonConfiguration: null lattice");
    if (static_cast<int>(occupancy_.size()) != lattice_->site_count()) {
      throw DomainError("IonConfiguration: occupancy has " + std::to_string(occupancy_.size()) + " entries, lattice has " +
                        std::to_string(lattice_->site_count()) + " sites");
    }
    for (auto w : occupancy_) {
      if (w > 1) throw DomainError("IonConfiguration: occupancy must be 0 or 1");
    }
  }

  const LatticeSpec& lattice() const noexcept { return *lattice_; }
  const std::shared_ptr<const LatticeSpec>& lattice_ptr() const noexcept { return lattice_; }
  const std::vector<std::uint8_t>& occupancy() const noexcept { return occupancy_; }
  int site_count() const noexcept { return static_cast<int>(occupancy_.size()); }
  int ion_count() const noexcept { return std::accumulate(occupancy_.begin(), occupancy_.end(), 0); }

  int spin(int site) const {
    const int w = occupancy_.at(static_cast<std::size_t>(site));
    return (lattice_->parity(site) ? -1 : 1) * (2 * w - 1);
  }

  std::vector<int> staggered_field() const {
    std::vector<int> s(occupancy_.size());
    for (int x = 0; x < site_count(); ++x) s[static_cast<std::size_t>(x)] = spin(x);
    return s;
  }

  /// W -> 1 - W.
  IonConfiguration complement() const {
    std::vector<std::uint8_t> w(occupancy_.size());
    std::transform(occupancy_.begin(), occupancy_.end(), w.begin(), [](std::uint8_t v) { return std::uint8_t(1 - v); });
    return {lattice_, std::move(w)};
  }

  /// Occupancy as a bit mask (site x -> bit x); valid for up to 64 sites.
  Bits mask() const {
    Bits m = 0;
    for (int x = 0; x < site_count() && x < 64; ++x) {
      if (occupancy_[static_cast<std::size_t>(x)]) m |= Bits{1} << x;
    }
    return m;
  }

 private:
  std::shared_ptr<const LatticeSpec> lattice_;
  std::vector<std::uint8_t> occupancy_;
};

inline IonConfiguration configuration_from_mask(std::shared_ptr<const LatticeSpec> lattice, Bits mask) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(lattice->site_count()));
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = static_cast<std::uint8_t>((mask >> x) & 1U);
  return {std::move(lattice), std::move(w)};
}

/// Ions on every site of coordinate parity `parity`.
inline IonConfiguration checkerboard(std::shared_ptr<const LatticeSpec> lattice, int parity = 0) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(lattice->site_count()));
  for (int x = 0; x < lattice->site_count(); ++x) w[static_cast<std::size_t>(x)] = lattice->parity(x) == parity;
  return {std::move(lattice), std::move(w)};
}

inline Eigen::MatrixXd one_body_matrix(const IonConfiguration& config, double U) {
  const int n = config.site_count();
  if (n > kMaxFermionSites) throw CapExceeded("one_body_matrix: " + std::to_string(n) + " sites exceeds cap");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : config.lattice().edges) {
    h(e.a, e.b) = -1.0;
    h(e.b, e.a) = -1.0;
  }
  for (int x = 0; x < n; ++x) h(x, x) = 2.0 * U * config.occupancy()[static_cast<std::size_t>(x)];
  return h;
}

inline std::vector<double> single_particle_levels(const IonConfiguration& config, double U) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_body_matrix(config, U), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// -(1/beta) sum_i ln(1 + exp(-beta (e_i - mu))), evaluated as a softplus so
/// large beta falls back to -max(0, mu - e_i) without overflow.
inline double free_energy_from_levels(const std::vector<double>& levels, double beta, double mu) {
  if (!(beta > 0.0)) throw DomainError("electron_free_energy: beta must be positive");
  double total = 0.0;
  for (double e : levels) {
    const double z = -beta * (e - mu);
    total += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  }
  return -total / beta;
}

/// Sum of the ne lowest levels.
inline double ground_energy_from_levels(const std::vector<double>& levels, int ne) {
  if (ne < 0 || ne > static_cast<int>(levels.size())) {
    throw DomainError("electron_ground_energy: N_e=" + std::to_string(ne) + " outside [0, " +
                      std::to_string(levels.size()) + "]");
  }
  double s = 0.0;
  for (int i = 0; i < ne; ++i) s += levels[static_cast<std::size_t>(i)];
  return s;
}

struct FreeFermionResult {
  std::vector<double> single_particle_levels;
  double U = 0.0;
  int electron_count = 0;

  double ground_energy_at(int ne) const { return ground_energy_from_levels(single_particle_levels, ne); }
  double ground_energy() const { return ground_energy_at(electron_count); }
  double free_energy(double beta, double mu) const { return free_energy_from_levels(single_particle_levels, beta, mu); }
};

/// Levels of one ion configuration, with the half-filled electron count.
inline FreeFermionResult solve_free_fermions(const IonConfiguration& config, double U) {
  return {single_particle_levels(config, U), U, config.site_count() / 2};
}

inline double electron_ground_energy(const IonConfiguration& config, double U, int ne) {
  if (ne < 0 || ne > config.site_count()) {
    throw DomainError("electron_ground_energy: N_e=" + std::to_string(ne) + " outside [0, " +
                      std::to_string(config.site_count()) + "]");
  }
  return ground_energy_from_levels(single_particle_levels(config, U), ne);
}

inline double electron_free_energy(const IonConfiguration& config, double U, double beta, double mu) {
  return free_energy_from_levels(single_particle_levels(config, U), beta, mu);
}

struct CheckerboardReport {
  int sites = 0;
  double U = 0.0;
  std::uint64_t configurations_scanned = 0;
  double min_energy = 0.0;
  double second_energy = 0.0;        // lowest energy outside the argmin set
  std::vector<Bits> argmin;          // ascending masks
  std::array<Bits, 2> checkerboards{};
  std::array<double, 2> checkerboard_energies{};
  bool argmin_is_checkerboards = false;
};

/// Exhaustive scan of all neutral ion configurations (sum W = N/2) at
/// N_e = N/2. Configurations within `tie_tol` of the minimum form the
/// argmin set, whatever they are.
inline CheckerboardReport checkerboard_check(const LatticeSpec& lattice, double U, double tie_tol = 1e-9) {
  lattice.validate();
  const int n = lattice.site_count();
  if (n % 2 != 0 || n < 2 || n > kMaxCheckerboardSites) {
    throw DomainError("checkerboard_check: need an even site count in [2, " + std::to_string(kMaxCheckerboardSites) +
                      "], got " + std::to_string(n));
  }
  if (!(U > 0.0)) throw DomainError("checkerboard_check: U must be positive");
  const auto coloring = lattice.bipartition();
  if (!coloring) throw DomainError("checkerboard_check: lattice is not bipartite");

  auto lat = std::make_shared<const LatticeSpec>(lattice);
  CheckerboardReport rep;
  rep.sites = n;
  rep.U = U;
  for (int c = 0; c < 2; ++c) {
    Bits m = 0;
    for (int x = 0; x < n; ++x) {
      if ((*coloring)[static_cast<std::size_t>(x)] == c) m |= Bits{1} << x;
    }
    rep.checkerboards[static_cast<std::size_t>(c)] = m;
  }

  const SpinBasisSector configs(n, n / 2);
  std::vector<double> energies(configs.dimension());
  for (std::size_t i = 0; i < configs.dimension(); ++i) {
    energies[i] = electron_ground_energy(configuration_from_mask(lat, configs.state(i)), U, n / 2);
  }
  rep.configurations_scanned = configs.dimension();
  rep.min_energy = *std::min_element(energies.begin(), energies.end());
  rep.second_energy = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (energies[i] - rep.min_energy <= tie_tol) {
      rep.argmin.push_back(configs.state(i));
    } else {
      rep.second_energy = std::min(rep.second_energy, energies[i]);
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    const auto idx = configs.index_of(rep.checkerboards[c]);
    rep.checkerboard_energies[c] = idx ? energies[*idx] : std::numeric_limits<double>::quiet_NaN();
  }
  std::array<Bits, 2> cb = rep.checkerboards;
  std::sort(cb.begin(), cb.end());
  rep.argmin_is_checkerboards = rep.argmin.size() == 2 && rep.argmin[0] == cb[0] && rep.argmin[1] == cb[1];
  return rep;
}

struct CouplingEstimate {
  double U = 0.0;
  double J = 0.0;
  double four_U_J = 0.0;
  double delta_E = 0.0;
  int pair_bonds = 0;          // bonds joining the flipped pair to the rest
  int moved_from = 0;
  int moved_to = 0;
  std::optional<std::string> warning;
};

/// Leading Ising coupling of the staggered spins, read off from one move.
///
/// Protocol: start from the checkerboard with ions on even sites; move the
/// ion at site 0 to its lowest-indexed neighbor. Both s variables flip, which
/// breaks the pair_bonds = deg(x0) + deg(x1) - 2 bonds between the pair and
/// the rest. In -J sum s_x s_y that costs 2 J pair_bonds, so
/// J = dE / (2 pair_bonds) with dE the N/2-electron ground-energy difference.
inline CouplingEstimate effective_coupling_estimate(const LatticeSpec& lattice, double U) {
  lattice.validate();
  if (!(U >= 2.0)) throw DomainError("effective_coupling_estimate: requires U >= 2");
  if (!lattice.parity_bipartite()) throw DomainError("effective_coupling_estimate: lattice is not parity-bipartite");
  const int n = lattice.site_count();
  if (n % 2 != 0) throw DomainError("effective_coupling_estimate: odd site count");
  const auto nb = lattice.neighbors();
  if (nb.at(0).empty()) throw DomainError("effective_coupling_estimate: site 0 has no neighbor");

  auto lat = std::make_shared<const LatticeSpec>(lattice);
  const IonConfiguration base = checkerboard(lat, lattice.parity(0));
  std::vector<std::uint8_t> moved = base.occupancy();
  const int x0 = 0;
  const int x1 = nb[0].front();
  moved[static_cast<std::size_t>(x0)] = 0;
  moved[static_cast<std::size_t>(x1)] = 1;
  const IonConfiguration flipped(lat, std::move(moved));

  CouplingEstimate est;
  est.U = U;
  est.moved_from = x0;
  est.moved_to = x1;
  const auto deg = lattice.degrees();
  est.pair_bonds = deg[static_cast<std::size_t>(x0)] + deg[static_cast<std::size_t>(x1)] - 2;
  est.delta_E = electron_ground_energy(flipped, U, n / 2) - electron_ground_energy(base, U, n / 2);
  est.J = est.delta_E / (2.0 * est.pair_bonds);
  est.four_U_J = 4.0 * U * est.J;

  const int d = lattice.dimension();
  for (int k = 0; k < d; ++k) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& c : lattice.sites) {
      lo = std::min(lo, c[static_cast<std::size_t>(k)]);
      hi = std::max(hi, c[static_cast<std::size_t>(k)]);
    }
    if (hi - lo + 1 < 4) {
      est.warning = "lattice has fewer than 4 sites along axis " + std::to_string(k) + "; flip is not bulk-like";
      break;
    }
  }
  return est;
}

struct MetropolisOptions {
  double U = 8.0;
  /// beta = 0 accepts every proposal.
  double beta = 1.0;
  /// Chemical potential; nullopt means mu = U.
  std::optional<double> mu;
  std::uint64_t sweeps = 1000;
  /// Sweeps discarded before measuring; nullopt means sweeps / 10.
  std::optional<std::uint64_t> burn_in;
  std::uint64_t seed = 1;
  /// Frozen s values on boundary sites.
  std::map<int, int> pinning;
  int batches = 20;
};

struct MetropolisStats {
  std::vector<double> mean_s;
  std::vector<double> stderr_s;
  double acceptance = 0.0;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t measured_sweeps = 0;
  double mu = 0.0;
  std::vector<std::uint8_t> final_occupancy;
};

/// Integer level k0 of the 111 interface plane sum(x) = k0 through the
/// middle of the lattice's bounding box (rounded down).
inline int plane_111_level(const LatticeSpec& lattice) {
  const int d = lattice.dimension();
  int twice_center = 0;
  for (int k = 0; k < d; ++k) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& c : lattice.sites) {
      lo = std::min(lo, c[static_cast<std::size_t>(k)]);
      hi = std::max(hi, c[static_cast<std::size_t>(k)]);
    }
    twice_center += lo + hi;
  }
  return twice_center >= 0 ? twice_center / 2 : -((-twice_center + 1) / 2);
}

/// Side of the 111 plane a site lies on: +1 above, -1 below, 0 on it.
inline int side_of_111_plane(const LatticeSpec& lattice, int site) {
  int sum = 0;
  for (int c : lattice.sites.at(static_cast<std::size_t>(site))) sum += c;
  const int k0 = plane_111_level(lattice);
  return (sum > k0) - (sum < k0);
}

/// 111 boundary condition: every boundary site off the interface plane is
/// pinned to s = side_of_111_plane. Sites on the plane stay free; a perfect
/// s-interface leaves that plane as the only layer whose ion density is not
/// fixed by the two checkerboards, so pinning it would break neutrality.
inline std::map<int, int> pinning_111(const LatticeSpec& lattice) {
  std::map<int, int> pin;
  for (int x = 0; x < lattice.site_count(); ++x) {
    if (!lattice.on_boundary(x)) continue;
    const int side = side_of_111_plane(lattice, x);
    if (side != 0) pin[x] = side;
  }
  return pin;
}

/// Canonical Metropolis chain over neutral ion configurations.
///
/// A proposal swaps a random unpinned ion with a random unpinned vacancy and
/// is accepted with probability min(1, exp(-beta dF)), F being the electron
/// free energy at (beta, mu). A sweep is one proposal per unpinned site.
/// Statistics of s_x use batch means over the measured sweeps.
inline MetropolisStats metropolis_ions(const LatticeSpec& lattice, const MetropolisOptions& opt) {
  lattice.validate();
  const int n = lattice.site_count();
  if (n > kMaxMetropolisSites) throw CapExceeded("metropolis_ions: lattice exceeds " + std::to_string(kMaxMetropolisSites) + " sites");
  if (n % 2 != 0) throw DomainError("metropolis_ions: neutral half filling needs an even site count");
  if (opt.sweeps < 1) throw DomainError("metropolis_ions: sweeps must be >= 1");
  if (opt.beta < 0.0) throw DomainError("metropolis_ions: beta must be >= 0");
  if (opt.batches < 1) throw DomainError("metropolis_ions: batches must be >= 1");

  auto lat = std::make_shared<const LatticeSpec>(lattice);
  const double mu = opt.mu.value_or(opt.U);

  std::vector<std::uint8_t> w(static_cast<std::size_t>(n), 0);
  std::vector<bool> pinned(static_cast<std::size_t>(n), false);
  int pinned_ions = 0;
  for (const auto& [site, s] : opt.pinning) {
    if (site < 0 || site >= n) throw DomainError("metropolis_ions: pinning on unknown site " + std::to_string(site));
    if (!lattice.on_boundary(site)) {
      throw DomainError("metropolis_ions: pinning on non-boundary site " + std::to_string(site));
    }
    if (s != 1 && s != -1) throw DomainError("metropolis_ions: pinned s must be +1 or -1");
    pinned[static_cast<std::size_t>(site)] = true;
    // s = (-1)^{|x|} (2W - 1)  =>  W = (1 + s (-1)^{|x|}) / 2
    const int sign = lattice.parity(site) ? -1 : 1;
    const int wx = (1 + s * sign) / 2;
    w[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(wx);
    pinned_ions += wx;
  }

  std::vector<int> free_sites;
  for (int x = 0; x < n; ++x) {
    if (!pinned[static_cast<std::size_t>(x)]) free_sites.push_back(x);
  }
  const int ions_needed = n / 2 - pinned_ions;
  if (ions_needed < 0 || ions_needed > static_cast<int>(free_sites.size())) {
    throw DomainError("metropolis_ions: pinning leaves no neutral configuration (" + std::to_string(ions_needed) +
                      " ions for " + std::to_string(free_sites.size()) + " free sites)");
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<int> order = free_sites;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> ions, holes;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (static_cast<int>(i) < ions_needed) {
      w[static_cast<std::size_t>(order[i])] = 1;
      ions.push_back(order[i]);
    } else {
      holes.push_back(order[i]);
    }
  }

  auto energy = [&](const std::vector<std::uint8_t>& occ) {
    return electron_free_energy(IonConfiguration(lat, occ), opt.U, opt.beta, mu);
  };
  const bool infinite_temperature = opt.beta == 0.0;
  double current = infinite_temperature ? 0.0 : energy(w);

  const std::uint64_t burn = opt.burn_in.value_or(opt.sweeps / 10);
  const std::uint64_t per_sweep = std::max<std::size_t>(free_sites.size(), 1);
  const std::uint64_t measured = opt.sweeps;
  const std::uint64_t nbatch = std::min<std::uint64_t>(static_cast<std::uint64_t>(opt.batches), measured);
  std::vector<std::vector<double>> batch_sum(nbatch, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<std::uint64_t> batch_count(nbatch, 0);

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  MetropolisStats st;
  st.mu = mu;
  for (std::uint64_t sweep = 0; sweep < burn + measured; ++sweep) {
    for (std::uint64_t p = 0; p < per_sweep; ++p) {
      if (ions.empty() || holes.empty()) break;
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, ions.size() - 1)(rng);
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, holes.size() - 1)(rng);
      ++st.proposals;
      const int a = ions[i];
      const int b = holes[j];
      w[static_cast<std::size_t>(a)] = 0;
      w[static_cast<std::size_t>(b)] = 1;
      bool accept = true;
      double proposed = current;
      if (!infinite_temperature) {
        proposed = energy(w);
        const double d = proposed - current;
        accept = d <= 0.0 || uni(rng) < std::exp(-opt.beta * d);
      }
      if (accept) {
        ++st.accepted;
        current = proposed;
        ions[i] = b;
        holes[j] = a;
      } else {
        w[static_cast<std::size_t>(a)] = 1;
        w[static_cast<std::size_t>(b)] = 0;
      }
    }
    if (sweep >= burn) {
      const std::uint64_t m = sweep - burn;
      const std::uint64_t b = m * nbatch / measured;
      for (int x = 0; x < n; ++x) {
        const int sign = lattice.parity(x) ? -1 : 1;
        batch_sum[b][static_cast<std::size_t>(x)] += sign * (2 * w[static_cast<std::size_t>(x)] - 1);
      }
      ++batch_count[b];
    }
  }

  st.measured_sweeps = measured;
  st.acceptance = st.proposals ? static_cast<double>(st.accepted) / static_cast<double>(st.proposals) : 0.0;
  st.mean_s.assign(static_cast<std::size_t>(n), 0.0);
  st.stderr_s.assign(static_cast<std::size_t>(n), 0.0);
  for (int x = 0; x < n; ++x) {
    std::vector<double> means;
    double total = 0.0;
    for (std::uint64_t b = 0; b < nbatch; ++b) {
      total += batch_sum[b][static_cast<std::size_t>(x)];
      means.push_back(batch_sum[b][static_cast<std::size_t>(x)] / static_cast<double>(batch_count[b]));
    }
    const double mean = total / static_cast<double>(measured);
    st.mean_s[static_cast<std::size_t>(x)] = mean;
    if (nbatch > 1) {
      double var = 0.0;
      for (double v : means) var += (v - mean) * (v - mean);
      var /= static_cast<double>(nbatch - 1);
      st.stderr_s[static_cast<std::size_t>(x)] = std::sqrt(var / static_cast<double>(nbatch));
    }
  }
  st.final_occupancy = w;
  return st;
}

}  // namespace qlat
