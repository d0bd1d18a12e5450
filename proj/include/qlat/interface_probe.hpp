#pragma once

// Diagonal-interface probes of the XXZ model on small 2D strips.
//
// A W x H strip carries, for every bond oriented along +x or +y, the chain
// kink boundary term -A(Delta)(S3_tail - S3_head). Summed over the strip
// these telescope into S3 fields on the boundary only:
//
//   f_x = -A(Delta) * (outgoing bonds - incoming bonds)
//
// which pushes up spins to the lower-left corner and down spins to the
// upper-right, favoring an interface along the 11 diagonal. A width-1 strip
// is exactly the (+,-) kink chain. Gaps are measured inside one fixed-n
// sector; the strip width stands in for the interface extent only
// qualitatively.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qlat/eigensolve.hpp"
#include "qlat/errors.hpp"
#include "qlat/hilbert.hpp"
#include "qlat/lattice.hpp"
#include "qlat/xxz.hpp"

namespace qlat {

/// Largest strip (in sites) accepted by build_scenario.
inline constexpr int kMaxInterfaceSites = 24;

struct Rational {
  long num = 1;
  long den = 2;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Accepts "p/q" or a plain integer.
  static Rational parse(const std::string& text) {
    Rational r;
    const auto slash = text.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        r.num = std::stol(text, &used);
        if (used != text.size()) throw DomainError("");
        r.den = 1;
      } else {
        r.num = std::stol(text.substr(0, slash), &used);
        if (used != slash) throw DomainError("");
        const std::string rest = text.substr(slash + 1);
        r.den = std::stol(rest, &used);
        if (used != rest.size()) throw DomainError("");
      }
    } catch (const std::exception&) {
      throw DomainError("filling: cannot parse '" + text + "' as p/q");
    }
    if (r.den <= 0) throw DomainError("filling: denominator must be positive");
    return r;
  }
};

struct ScenarioOptions {
  bool periodic_transverse = false;
  /// Flip every field sign (down spins pushed to the lower-left instead).
  bool reverse_fields = false;
  /// Override the sector; nullopt uses round(filling * sites).
  std::optional<int> sector_n;
};

struct InterfaceScenario {
  LatticeSpec lattice;
  int width = 0;
  int height = 0;
  double delta = 0.0;
  int sector_n = 0;
  bool periodic_transverse = false;
};

inline InterfaceScenario build_scenario(int width, int height, double delta, Rational filling,
                                        const ScenarioOptions& opts = {}) {
  if (width < 1 || height < 1) throw DomainError("build_scenario: width and height must be positive");
  if (width * height > kMaxInterfaceSites) {
    throw CapExceeded("build_scenario: " + std::to_string(width) + "x" + std::to_string(height) + " = " +
                      std::to_string(width * height) + " sites exceeds the cap of " +
                      std::to_string(kMaxInterfaceSites));
  }
  if (filling.num < 0 || filling.num > filling.den) throw DomainError("build_scenario: filling outside [0, 1]");
  const double amp = boundary_field_amplitude(delta);

  InterfaceScenario sc;
  sc.width = width;
  sc.height = height;
  sc.delta = delta;
  sc.periodic_transverse = opts.periodic_transverse;
  sc.lattice = make_box({width, height}, std::vector<bool>{opts.periodic_transverse, false});

  // make_box emits every edge as (tail, head) along +x or +y.
  std::vector<int> net(static_cast<std::size_t>(sc.lattice.site_count()), 0);
  for (const auto& e : sc.lattice.edges) {
    ++net[static_cast<std::size_t>(e.a)];
    --net[static_cast<std::size_t>(e.b)];
  }
  const double sign = opts.reverse_fields ? -1.0 : 1.0;
  for (int s = 0; s < sc.lattice.site_count(); ++s) {
    if (net[static_cast<std::size_t>(s)] != 0) sc.lattice.boundary_fields[s] = -sign * amp * net[static_cast<std::size_t>(s)];
  }

  const long sites = width * height;
  const long n = opts.sector_n ? *opts.sector_n : (2 * filling.num * sites + filling.den) / (2 * filling.den);
  if (n < 0 || n > sites) throw DomainError("build_scenario: sector n=" + std::to_string(n) + " outside [0, sites]");
  sc.sector_n = static_cast<int>(n);
  return sc;
}

inline SparseOperator scenario_hamiltonian(const InterfaceScenario& sc) {
  const SpinBasisSector sector(sc.lattice.site_count(), sc.sector_n);
  return build_lattice_hamiltonian(sc.lattice, sc.delta, sector);
}

struct InterfaceGap {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap = 0.0;
  SolveMethod method = SolveMethod::Dense;
  double residual = 0.0;
};

/// Two lowest levels of the scenario Hamiltonian in its sector.
inline InterfaceGap interface_gap(const InterfaceScenario& sc, const SolverBudget& budget = {}) {
  const SparseOperator h = scenario_hamiltonian(sc);
  if (h.dim() < 2) {
    throw DomainError("interface_gap: sector n=" + std::to_string(sc.sector_n) + " of " +
                      std::to_string(sc.lattice.site_count()) + " sites holds a single state");
  }
  const SpectralResult res = solve_lowest(h, 2, budget);
  InterfaceGap g;
  g.lambda1 = res.eigenvalues[0];
  g.lambda2 = res.eigenvalues[1];
  g.gap = g.lambda2 - g.lambda1;
  g.method = res.method;
  g.residual = res.max_residual();
  return g;
}

struct GapRow {
  double delta = 0.0;
  int width = 0;
  int height = 0;
  int n = 0;
  std::optional<InterfaceGap> result;
  std::string error;  // empty on success
};

/// One row per (delta, width) in input order; failures are kept in-row.
inline std::vector<GapRow> gap_scan(const std::vector<double>& deltas, const std::vector<int>& widths, int height,
                                    Rational filling, const ScenarioOptions& opts = {},
                                    const SolverBudget& budget = {}) {
  std::vector<GapRow> rows;
  for (double d : deltas) {
    for (int w : widths) {
      GapRow row;
      row.delta = d;
      row.width = w;
      row.height = height;
      try {
        const InterfaceScenario sc = build_scenario(w, height, d, filling, opts);
        row.n = sc.sector_n;
        row.result = interface_gap(sc, budget);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace qlat
