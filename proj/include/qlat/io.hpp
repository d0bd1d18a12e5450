#pragma once

// CSV and JSON records for spectra, droplet reports, gap tables and sampler
// output. Floats in CSV use 17 significant digits; nlohmann::json writes the
// shortest round-trip form. Neither carries timestamps.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlat/droplet.hpp"
#include "qlat/eigensolve.hpp"
#include "qlat/falicov_kimball.hpp"
#include "qlat/interface_probe.hpp"
#include "qlat/sparse.hpp"

namespace qlat {

using json = nlohmann::ordered_json;

/// Matrix-element convention of the XXZ builders, attached to spectra.
inline constexpr const char* kBondConvention =
    "unordered nearest-neighbor pairs counted once; bond energy -[(1/Delta)(S1S1+S2S2) + S3S3 - 1/4]";

inline json spectral_record(const SpectralResult& r, double delta) {
  json j;
  j["L"] = r.sector_tag.sites;
  j["n"] = r.sector_tag.down;
  j["delta"] = delta;
  j["method"] = to_string(r.method);
  j["eigenvalues"] = r.eigenvalues;
  j["residuals"] = r.residual_norms;
  return j;
}

inline json theorem_record(const TheoremReport& r) {
  json j;
  j["L"] = r.L;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["q"] = r.q;
  j["A"] = r.amplitude;
  j["multiplet_size"] = r.multiplet_size;
  j["window_halfwidth"] = r.window_halfwidth;
  j["gap_value"] = r.gap_value ? json(*r.gap_value) : json(nullptr);
  j["gamma_ref"] = r.gamma_ref;
  j["subspace_distance"] = r.subspace_distance;
  j["degenerate_cut"] = r.degenerate_cut;
  j["method"] = to_string(r.method);
  j["max_residual"] = r.max_residual;
  j["eigenvalues"] = r.eigenvalues;
  return j;
}

/// Header "n,k,eigenvalue"; k counts from 1.
inline void write_level_csv_header(std::ostream& os) { os << "n,k,eigenvalue\n"; }

inline void write_level_rows(std::ostream& os, int n, const std::vector<double>& eigenvalues) {
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    os << n << ',' << (k + 1) << ',' << format_double(eigenvalues[k]) << '\n';
  }
}

inline void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows) {
  os << "delta,width,height,n,lambda1,lambda2,gap,method,residual,error\n";
  for (const auto& r : rows) {
    os << format_double(r.delta) << ',' << r.width << ',' << r.height << ',' << r.n << ',';
    if (r.result) {
      os << format_double(r.result->lambda1) << ',' << format_double(r.result->lambda2) << ','
         << format_double(r.result->gap) << ',' << to_string(r.result->method) << ','
         << format_double(r.result->residual) << ",\n";
    } else {
      std::string err = r.error;
      for (char& c : err) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << ",,,,," << err << '\n';
    }
  }
}

inline json checkerboard_record(const CheckerboardReport& r, const LatticeSpec& lattice) {
  auto occupancy = [&](Bits m) {
    std::string s;
    for (int x = 0; x < lattice.site_count(); ++x) s += ((m >> x) & 1U) ? '1' : '0';
    return s;
  };
  json j;
  j["sites"] = r.sites;
  j["U"] = r.U;
  j["configurations_scanned"] = r.configurations_scanned;
  j["min_energy"] = r.min_energy;
  j["second_energy"] = r.second_energy;
  json argmin = json::array();
  for (Bits m : r.argmin) argmin.push_back(occupancy(m));
  j["argmin"] = argmin;
  j["checkerboards"] = {occupancy(r.checkerboards[0]), occupancy(r.checkerboards[1])};
  j["checkerboard_energies"] = {r.checkerboard_energies[0], r.checkerboard_energies[1]};
  j["checkerboard_split"] = std::abs(r.checkerboard_energies[0] - r.checkerboard_energies[1]);
  j["argmin_is_checkerboards"] = r.argmin_is_checkerboards;
  return j;
}

inline void write_coupling_csv(std::ostream& os, const std::vector<CouplingEstimate>& rows) {
  os << "U,J_est,four_U_J,delta_E,pair_bonds,warning\n";
  for (const auto& r : rows) {
    os << format_double(r.U) << ',' << format_double(r.J) << ',' << format_double(r.four_U_J) << ','
       << format_double(r.delta_E) << ',' << r.pair_bonds << ',' << (r.warning ? *r.warning : "") << '\n';
  }
}

/// One row per site: coordinates, <s_x>, standard error, pinned flag.
inline void write_sampler_csv(std::ostream& os, const LatticeSpec& lattice, const MetropolisStats& st,
                              const std::map<int, int>& pinning) {
  const int d = lattice.dimension();
  for (int k = 0; k < d; ++k) os << 'x' << (k + 1) << ',';
  os << "mean_s,stderr,pinned\n";
  for (int x = 0; x < lattice.site_count(); ++x) {
    for (int c : lattice.sites[static_cast<std::size_t>(x)]) os << c << ',';
    os << format_double(st.mean_s[static_cast<std::size_t>(x)]) << ','
       << format_double(st.stderr_s[static_cast<std::size_t>(x)]) << ',' << (pinning.count(x) ? 1 : 0) << '\n';
  }
}

}  // namespace qlat
