#pragma once

// Fixed-magnetization sectors of the spin-1/2 chain.
//
// A configuration of L spins is an L-bit pattern; bit x set means the spin at
// site x+1 points down. Sector (L, n) holds every pattern with exactly n set
// bits, listed in ascending integer order.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlat/errors.hpp"

namespace qlat {

using Bits = std::uint64_t;

/// Largest chain length accepted by sector enumeration.
inline constexpr int kMaxSites = 32;

namespace detail {

inline constexpr auto kBinomial = [] {
  std::array<std::array<std::uint64_t, 65>, 65> c{};
  for (int m = 0; m <= 64; ++m) {
    c[m][0] = 1;
    for (int k = 1; k <= m; ++k) c[m][k] = c[m - 1][k - 1] + (k <= m - 1 ? c[m - 1][k] : 0);
  }
  return c;
}();

/// Next larger integer with the same popcount (Gosper's hack).
constexpr Bits next_same_popcount(Bits v) noexcept {
  const Bits t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace detail

/// C(m, k) for 0 <= m <= 64, zero when k is out of range.
constexpr std::uint64_t binomial(int m, int k) noexcept {
  if (m < 0 || m > 64 || k < 0 || k > m) return 0;
  return detail::kBinomial[m][k];
}

struct SpinConfiguration {
  Bits bits = 0;
  int sites = 0;

  int down_count() const noexcept { return std::popcount(bits); }
  /// Site numbering is 1-based, matching the interval [1, L].
  bool is_down(int site) const noexcept { return (bits >> (site - 1)) & 1U; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;
};

/// S^- at `site`: flips an up spin down, or annihilates the state (nullopt).
inline std::optional<SpinConfiguration> apply_lowering(SpinConfiguration config, int site) {
  if (site < 1 || site > config.sites) {
    throw DomainError("apply_lowering: site " + std::to_string(site) + " outside [1, " +
                      std::to_string(config.sites) + "]");
  }
  const Bits mask = Bits{1} << (site - 1);
  if (config.bits & mask) return std::nullopt;
  config.bits |= mask;
  return config;
}

/// S^+ at `site`, the adjoint of apply_lowering.
inline std::optional<SpinConfiguration> apply_raising(SpinConfiguration config, int site) {
  if (site < 1 || site > config.sites) {
    throw DomainError("apply_raising: site " + std::to_string(site) + " outside [1, " +
                      std::to_string(config.sites) + "]");
  }
  const Bits mask = Bits{1} << (site - 1);
  if (!(config.bits & mask)) return std::nullopt;
  config.bits &= ~mask;
  return config;
}

/// Basis of the sector with `down_count` down spins among `site_count` sites.
///
/// Immutable once built. index_of() ranks a pattern in the colexicographic
/// number system, which coincides with ascending integer order for a fixed
/// popcount, so lookups need no hash table and cost O(n).
class SpinBasisSector {
 public:
  SpinBasisSector(int site_count, int down_count) : sites_(site_count), down_(down_count) {
    if (site_count < 1 || site_count > kMaxSites) {
      throw DomainError("enumerate_sector: L=" + std::to_string(site_count) + " outside [1, " +
                        std::to_string(kMaxSites) + "]");
    }
    if (down_count < 0 || down_count > site_count) {
      throw DomainError("enumerate_sector: (L, n) = (" + std::to_string(site_count) + ", " +
                        std::to_string(down_count) + ") has n outside [0, L]");
    }
    const std::uint64_t dim = binomial(site_count, down_count);
    states_.reserve(dim);
    Bits v = (down_count == 0) ? 0 : ((Bits{1} << down_count) - 1);
    for (std::uint64_t k = 0; k < dim; ++k) {
      states_.push_back(v);
      if (down_count > 0 && k + 1 < dim) v = detail::next_same_popcount(v);
    }
  }

  int site_count() const noexcept { return sites_; }
  int down_count() const noexcept { return down_; }
  std::size_t dimension() const noexcept { return states_.size(); }
  const std::vector<Bits>& states() const noexcept { return states_; }
  Bits state(std::size_t k) const { return states_.at(k); }

  bool contains(Bits config) const noexcept {
    return std::popcount(config) == down_ && (sites_ == 64 || (config >> sites_) == 0);
  }

  /// Position of `config` in states(); nullopt when it lies outside the sector.
  std::optional<std::size_t> index_of(Bits config) const noexcept {
    if (!contains(config)) return std::nullopt;
    std::size_t rank = 0;
    int i = 1;
    while (config) {
      const int p = std::countr_zero(config);
      rank += binomial(p, i++);
      config &= config - 1;
    }
    return rank;
  }

  /// Index lookup for callers that already know the pattern belongs here.
  std::size_t index_unchecked(Bits config) const noexcept {
    std::size_t rank = 0;
    int i = 1;
    while (config) {
      rank += binomial(std::countr_zero(config), i++);
      config &= config - 1;
    }
    return rank;
  }

 private:
  int sites_;
  int down_;
  std::vector<Bits> states_;
};

inline SpinBasisSector enumerate_sector(int site_count, int down_count) {
  return SpinBasisSector(site_count, down_count);
}

/// Sector dimensions for n = 0..L; they sum to 2^L.
inline std::vector<std::uint64_t> sector_dimensions(int site_count) {
  if (site_count < 1 || site_count > kMaxSites) {
    throw DomainError("sector_dimensions: L=" + std::to_string(site_count) + " outside [1, " +
                      std::to_string(kMaxSites) + "]");
  }
  std::vector<std::uint64_t> dims;
  for (int n = 0; n <= site_count; ++n) dims.push_back(binomial(site_count, n));
  return dims;
}

/// Complement of all L bits (global spin flip).
constexpr Bits spin_flip(Bits config, int site_count) noexcept {
  const Bits all = site_count >= 64 ? ~Bits{0} : ((Bits{1} << site_count) - 1);
  return ~config & all;
}

/// Site relabeling x -> L+1-x.
constexpr Bits reflect(Bits config, int site_count) noexcept {
  Bits out = 0;
  for (int x = 0; x < site_count; ++x) {
    if ((config >> x) & 1U) out |= Bits{1} << (site_count - 1 - x);
  }
  return out;
}

}  // namespace qlat
