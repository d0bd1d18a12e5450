#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qlat/errors.hpp"

namespace qlat {

using Coord = std::vector<int>;

struct Edge {
  int a = 0;
  int b = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A finite set of sites in Z^d (d = 1..3) with nearest-neighbor edges and an
/// optional per-site S^3 field.
///
/// Sites are addressed by their position in `sites`. `periodic_extent[k] > 0`
/// marks axis k as wrapped with that period, so an edge may join coordinates
/// 0 and extent-1 along that axis.
struct LatticeSpec {
  std::vector<Coord> sites;
  std::vector<Edge> edges;
  std::map<int, double> boundary_fields;
  std::vector<int> periodic_extent;

  int site_count() const noexcept { return static_cast<int>(sites.size()); }
  int dimension() const noexcept { return sites.empty() ? 0 : static_cast<int>(sites.front().size()); }

  double field(int site) const {
    auto it = boundary_fields.find(site);
    return it == boundary_fields.end() ? 0.0 : it->second;
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(sites.size(), 0);
    for (const auto& e : edges) {
      ++deg[e.a];
      ++deg[e.b];
    }
    return deg;
  }

  std::vector<std::vector<int>> neighbors() const {
    std::vector<std::vector<int>> nb(sites.size());
    for (const auto& e : edges) {
      nb[e.a].push_back(e.b);
      nb[e.b].push_back(e.a);
    }
    for (auto& v : nb) std::sort(v.begin(), v.end());
    return nb;
  }

  /// Coordinate-sum parity |x| mod 2.
  int parity(int site) const {
    int s = 0;
    for (int c : sites.at(site)) s += c;
    return ((s % 2) + 2) % 2;
  }

  /// Checks the structural invariants; throws DomainError on the first violation.
  void validate() const {
    const int d = dimension();
    if (d < 1 || d > 3) throw DomainError("lattice: dimension must be 1, 2 or 3");
    for (const auto& c : sites) {
      if (static_cast<int>(c.size()) != d) throw DomainError("lattice: inconsistent coordinate dimension");
    }
    if (!periodic_extent.empty() && static_cast<int>(periodic_extent.size()) != d) {
      throw DomainError("lattice: periodic_extent must have one entry per axis");
    }
    std::set<Edge> seen;
    for (const auto& e : edges) {
      if (e.a < 0 || e.b < 0 || e.a >= site_count() || e.b >= site_count()) {
        throw DomainError("lattice: dangling edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
      }
      if (e.a == e.b) throw DomainError("lattice: self loop at site " + std::to_string(e.a));
      const Edge key{std::min(e.a, e.b), std::max(e.a, e.b)};
      if (!seen.insert(key).second) {
        throw DomainError("lattice: duplicate edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
      }
      if (!unit_distance(sites[e.a], sites[e.b])) {
        throw DomainError("lattice: edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                          ") does not join nearest neighbors");
      }
    }
    for (const auto& [s, v] : boundary_fields) {
      if (s < 0 || s >= site_count()) throw DomainError("lattice: field on unknown site " + std::to_string(s));
    }
  }

  /// Two-coloring by BFS; nullopt when the edge graph has an odd cycle.
  std::optional<std::vector<int>> bipartition() const {
    std::vector<int> color(sites.size(), -1);
    const auto nb = neighbors();
    for (int start = 0; start < site_count(); ++start) {
      if (color[start] >= 0) continue;
      color[start] = 0;
      std::queue<int> todo;
      todo.push(start);
      while (!todo.empty()) {
        const int v = todo.front();
        todo.pop();
        for (int w : nb[v]) {
          if (color[w] < 0) {
            color[w] = 1 - color[v];
            todo.push(w);
          } else if (color[w] == color[v]) {
            return std::nullopt;
          }
        }
      }
    }
    return color;
  }

  /// True when every edge joins sites of opposite coordinate parity, so the
  /// coordinate parity is itself a valid bipartition.
  bool parity_bipartite() const {
    return std::all_of(edges.begin(), edges.end(),
                       [&](const Edge& e) { return parity(e.a) != parity(e.b); });
  }

  /// True when `site` has fewer neighbors than the infinite Z^d lattice.
  bool on_boundary(int site) const { return degrees().at(site) < 2 * dimension(); }

 private:
  bool unit_distance(const Coord& x, const Coord& y) const {
    int total = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      int diff = std::abs(x[k] - y[k]);
      if (!periodic_extent.empty() && periodic_extent[k] > 0) {
        diff %= periodic_extent[k];
        diff = std::min(diff, periodic_extent[k] - diff);
      }
      total += diff;
      if (total > 1) return false;
    }
    return total == 1;
  }
};

/// Open chain with sites 0..length-1 at coordinates (0), (1), ...
inline LatticeSpec make_chain(int length, bool periodic = false) {
  if (length < 1) throw DomainError("make_chain: length must be positive");
  LatticeSpec lat;
  for (int x = 0; x < length; ++x) lat.sites.push_back({x});
  for (int x = 0; x + 1 < length; ++x) lat.edges.push_back({x, x + 1});
  if (periodic) {
    lat.periodic_extent = {length};
    if (length > 2) lat.edges.push_back({0, length - 1});
  }
  return lat;
}

/// Hypercubic box with the given extents. Sites are ordered with the first
/// axis fastest: index = x0 + e0*(x1 + e1*x2). Wrapped edges are added along
/// periodic axes with extent > 2; extent-2 wraps coincide with open edges and
/// are not duplicated.
inline LatticeSpec make_box(const std::vector<int>& extents, const std::vector<bool>& periodic) {
  const int d = static_cast<int>(extents.size());
  if (d < 1 || d > 3) throw DomainError("make_box: dimension must be 1, 2 or 3");
  if (static_cast<int>(periodic.size()) != d) throw DomainError("make_box: one periodic flag per axis");
  for (int e : extents) {
    if (e < 1) throw DomainError("make_box: extents must be positive");
  }
  LatticeSpec lat;
  int total = 1;
  for (int e : extents) total *= e;
  auto index = [&](const Coord& c) {
    int idx = 0;
    for (int k = d - 1; k >= 0; --k) idx = idx * extents[k] + c[k];
    return idx;
  };
  for (int i = 0; i < total; ++i) {
    Coord c(d);
    int r = i;
    for (int k = 0; k < d; ++k) {
      c[k] = r % extents[k];
      r /= extents[k];
    }
    lat.sites.push_back(c);
  }
  lat.periodic_extent.assign(d, 0);
  for (int k = 0; k < d; ++k) {
    if (periodic[k]) lat.periodic_extent[k] = extents[k];
  }
  for (int i = 0; i < total; ++i) {
    for (int k = 0; k < d; ++k) {
      Coord c = lat.sites[i];
      if (c[k] + 1 < extents[k]) {
        ++c[k];
        lat.edges.push_back({i, index(c)});
      } else if (periodic[k] && extents[k] > 2) {
        c[k] = 0;
        lat.edges.push_back({i, index(c)});
      }
    }
  }
  return lat;
}

inline LatticeSpec make_box(const std::vector<int>& extents, bool periodic) {
  return make_box(extents, std::vector<bool>(extents.size(), periodic));
}

}  // namespace qlat
