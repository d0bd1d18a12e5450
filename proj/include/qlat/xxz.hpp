#pragma once

// Sector matrices of the easy-axis XXZ Hamiltonian
//
//   H = - sum_bonds [ (1/Delta)(S1 S1 + S2 S2) + (S3 S3 - 1/4) ] + sum_x f_x S3_x
//
// on open chains (with boundary fields +-A(Delta) at the two ends) and on
// general finite lattices with arbitrary S3 site fields.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qlat/errors.hpp"
#include "qlat/hilbert.hpp"
#include "qlat/lattice.hpp"
#include "qlat/sparse.hpp"

namespace qlat {

/// Anisotropy Delta > 1 together with q in (0,1), Delta = (q + 1/q)/2.
struct AnisotropyParam {
  double delta = 0.0;
  double q = 0.0;
};

inline AnisotropyParam make_anisotropy_from_delta(double delta) {
  if (!(delta > 1.0)) {
    throw DomainError("anisotropy: Delta=" + format_double(delta) + " is not in the easy-axis regime Delta > 1");
  }
  // delta - sqrt(delta^2 - 1) loses digits for large delta; 1/(delta + sqrt(...)) does not.
  const double q = 1.0 / (delta + std::sqrt((delta - 1.0) * (delta + 1.0)));
  return {delta, q};
}

inline AnisotropyParam make_anisotropy_from_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("anisotropy: q=" + format_double(q) + " outside (0, 1)");
  return {(q + 1.0 / q) / 2.0, q};
}

/// A(Delta) = sqrt(1 - Delta^-2) / 2.
inline double boundary_field_amplitude(double delta) {
  if (!(delta > 1.0)) throw DomainError("boundary_field_amplitude: requires Delta > 1");
  return 0.5 * std::sqrt((1.0 - 1.0 / delta) * (1.0 + 1.0 / delta));
}

/// Gap above the droplet multiplet, 1 - 1/Delta.
inline double droplet_gap_reference(double delta) {
  if (!(delta > 1.0)) throw DomainError("droplet_gap_reference: requires Delta > 1");
  return 1.0 - 1.0 / delta;
}

/// Boundary sign pair for the chain builder: (+,+), (+,-), (-,+), (-,-).
enum class BoundarySign : int { Plus = 1, Minus = -1 };

namespace detail {

/// Shared kernel of both builders. `bonds` holds pairs of bit positions,
/// `fields[x]` multiplies S3 at bit x. With `bond_constant` each bond carries
/// the -1/4 shift so aligned bonds cost nothing.
inline SparseOperator assemble_xxz(const SpinBasisSector& sector, const std::vector<std::pair<int, int>>& bonds,
                                   const std::vector<double>& fields, double delta, bool bond_constant) {
  const double hop = -1.0 / (2.0 * delta);
  const std::size_t dim = sector.dimension();
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Bits c = sector.state(i);
    int anti = 0;
    auto& row = rows[i];
    for (const auto& [a, b] : bonds) {
      const bool da = (c >> a) & 1U;
      const bool db = (c >> b) & 1U;
      if (da != db) {
        ++anti;
        const Bits swapped = c ^ ((Bits{1} << a) | (Bits{1} << b));
        row.emplace_back(sector.index_unchecked(swapped), hop);
      }
    }
    const int aligned = static_cast<int>(bonds.size()) - anti;
    double diag = bond_constant ? 0.5 * anti : 0.25 * anti - 0.25 * aligned;
    for (std::size_t x = 0; x < fields.size(); ++x) {
      if (fields[x] != 0.0) diag += fields[x] * (((c >> x) & 1U) ? -0.5 : 0.5);
    }
    row.emplace_back(i, diag);
  }
  return SparseOperator::from_rows(std::move(rows), {sector.site_count(), sector.down_count()});
}

}  // namespace detail

/// Open XXZ chain on [1, L] with boundary term -A(Delta)(left*S3_1 + right*S3_L).
///
/// (+,+) is the droplet Hamiltonian; (+,-) and (-,+) are the kink and
/// antikink Hamiltonians whose ground states are the q-weighted kink states.
inline SparseOperator build_chain_hamiltonian(int L, double delta, BoundarySign left, BoundarySign right,
                                              const SpinBasisSector& sector) {
  if (L < 2) throw DomainError("build_chain_hamiltonian: L=" + std::to_string(L) + " < 2");
  if (sector.site_count() != L) {
    throw DomainError("build_chain_hamiltonian: sector has " + std::to_string(sector.site_count()) +
                      " sites, expected L=" + std::to_string(L));
  }
  const double amp = boundary_field_amplitude(delta);
  std::vector<std::pair<int, int>> bonds;
  for (int x = 0; x + 1 < L; ++x) bonds.emplace_back(x, x + 1);
  std::vector<double> fields(static_cast<std::size_t>(L), 0.0);
  fields.front() = -amp * static_cast<int>(left);
  fields.back() = -amp * static_cast<int>(right);
  return detail::assemble_xxz(sector, bonds, fields, delta, true);
}

struct LatticeBuildOptions {
  /// Include the -1/4 per bond; off reproduces the unshifted bulk form.
  bool bond_constant = true;
};

/// XXZ Hamiltonian on a finite lattice; each unordered edge counted once and
/// lattice.boundary_fields added as sum_x f_x S3_x.
inline SparseOperator build_lattice_hamiltonian(const LatticeSpec& lattice, double delta,
                                                const SpinBasisSector& sector, LatticeBuildOptions opts = {}) {
  lattice.validate();
  if (!(delta > 1.0)) throw DomainError("build_lattice_hamiltonian: requires Delta > 1");
  if (sector.site_count() != lattice.site_count()) {
    throw DomainError("build_lattice_hamiltonian: sector has " + std::to_string(sector.site_count()) +
                      " sites, lattice has " + std::to_string(lattice.site_count()));
  }
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(lattice.edges.size());
  for (const auto& e : lattice.edges) bonds.emplace_back(e.a, e.b);
  std::vector<double> fields(static_cast<std::size_t>(lattice.site_count()), 0.0);
  for (const auto& [site, f] : lattice.boundary_fields) fields[static_cast<std::size_t>(site)] = f;
  return detail::assemble_xxz(sector, bonds, fields, delta, opts.bond_constant);
}

}  // namespace qlat
