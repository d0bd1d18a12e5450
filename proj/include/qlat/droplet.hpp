#pragma once

// Kink, antikink and droplet states of the XXZ chain, the droplet subspace
// K_{L,n}, and the numerical comparison of the droplet multiplet of H^{++}
// against it.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlat/eigensolve.hpp"
#include "qlat/errors.hpp"
#include "qlat/hilbert.hpp"
#include "qlat/xxz.hpp"

namespace qlat {

/// Which end of the interval the down spins are pushed to.
enum class KinkKind {
  Kink,      // up on the left, down on the right: weight q^{sum (b+1-x_k)}
  Antikink,  // down on the left, up on the right: weight q^{sum (x_k+1-a)}
};

/// Exponent of q carried by a configuration of the interval [a, a+len-1];
/// `bits` are relative to a.
inline int kink_exponent(KinkKind kind, int len, Bits bits) {
  int e = 0;
  while (bits) {
    const int p = std::countr_zero(bits);
    e += (kind == KinkKind::Kink) ? (len - p) : (p + 1);
    bits &= bits - 1;
  }
  return e;
}

/// Unnormalized coefficient of `bits` in the kink or antikink state on an
/// interval of length `len`, exactly as the q-weighted sum defines it.
inline double kink_coefficient(KinkKind kind, int len, Bits bits, double q) {
  return std::pow(q, kink_exponent(kind, len, bits));
}

namespace detail {

inline void check_interval(int a, int b, int n, double q, const char* who) {
  if (a > b) throw DomainError(std::string(who) + ": empty interval [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  if (n < 0 || n > b - a + 1) {
    throw DomainError(std::string(who) + ": n=" + std::to_string(n) + " outside [0, " + std::to_string(b - a + 1) + "]");
  }
  if (!(q > 0.0 && q < 1.0)) throw DomainError(std::string(who) + ": q outside (0, 1)");
}

/// Coefficients on sector (len, n), scaled by q^{-min exponent} so the
/// largest is 1 and deep configurations do not underflow.
inline std::vector<double> kink_vector_scaled(KinkKind kind, int len, int n, double q) {
  const SpinBasisSector sector(len, n);
  const int e0 = n * (n + 1) / 2;
  std::vector<double> v(sector.dimension());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(q, kink_exponent(kind, len, sector.state(i)) - e0);
  return v;
}

inline void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : v) x *= inv;
}

}  // namespace detail

/// Unit-norm kink state psi^{+-}_{[a,b]}(n) in the (b-a+1, n) sector basis.
inline std::vector<double> kink_state(int a, int b, int n, double q) {
  detail::check_interval(a, b, n, q, "kink_state");
  auto v = detail::kink_vector_scaled(KinkKind::Kink, b - a + 1, n, q);
  detail::normalize(v);
  return v;
}

/// Unit-norm antikink state psi^{-+}_{[a,b]}(n) in the (b-a+1, n) sector basis.
inline std::vector<double> antikink_state(int a, int b, int n, double q) {
  detail::check_interval(a, b, n, q, "antikink_state");
  auto v = detail::kink_vector_scaled(KinkKind::Antikink, b - a + 1, n, q);
  detail::normalize(v);
  return v;
}

/// Admissible droplet centers floor(n/2) <= x <= L - ceil(n/2).
inline std::vector<int> droplet_centers(int L, int n) {
  std::vector<int> xs;
  for (int x = n / 2; x <= L - (n - n / 2); ++x) xs.push_back(x);
  return xs;
}

namespace detail {

inline std::vector<double> droplet_vector(int L, int n, int x, double q, bool raw) {
  if (L < 1 || n < 0 || n > L) {
    throw DomainError("droplet_state: (L, n) = (" + std::to_string(L) + ", " + std::to_string(n) + ") invalid");
  }
  if (!(q > 0.0 && q < 1.0)) throw DomainError("droplet_state: q outside (0, 1)");
  const int nl = n / 2;
  const int nr = n - nl;
  if (x < nl || x > L - nr) {
    throw DomainError("droplet_state: center x=" + std::to_string(x) + " outside [" + std::to_string(nl) + ", " +
                      std::to_string(L - nr) + "]");
  }
  // Left factor lives on bits [0, x), right factor on bits [x, L).
  std::vector<Bits> left_cfg{0}, right_cfg{0};
  std::vector<double> left_amp{1.0}, right_amp{1.0};
  if (x > 0) {
    const SpinBasisSector s(x, nl);
    left_cfg = s.states();
    left_amp = kink_vector_scaled(KinkKind::Kink, x, nl, q);
  }
  if (L - x > 0) {
    const SpinBasisSector s(L - x, nr);
    right_cfg = s.states();
    right_amp = kink_vector_scaled(KinkKind::Antikink, L - x, nr, q);
  }
  const SpinBasisSector full(L, n);
  std::vector<double> out(full.dimension(), 0.0);
  for (std::size_t i = 0; i < left_cfg.size(); ++i) {
    for (std::size_t j = 0; j < right_cfg.size(); ++j) {
      const Bits c = left_cfg[i] | (right_cfg[j] << x);
      out[full.index_unchecked(c)] = left_amp[i] * right_amp[j];
    }
  }
  if (raw) {
    const double scale = std::pow(q, nl * (nl + 1) / 2 + nr * (nr + 1) / 2);
    for (double& v : out) v *= scale;
  } else {
    normalize(out);
  }
  return out;
}

}  // namespace detail

/// Unit-norm droplet state xi_{L,n}(x): a kink on [1,x] carrying floor(n/2)
/// down spins times an antikink on [x+1,L] carrying ceil(n/2), in the (L, n)
/// sector basis.
inline std::vector<double> droplet_state(int L, int n, int x, double q) {
  return detail::droplet_vector(L, n, x, q, false);
}

/// Same state with the unnormalized q-power coefficients.
inline std::vector<double> droplet_state_raw(int L, int n, int x, double q) {
  return detail::droplet_vector(L, n, x, q, true);
}

/// Raised when the droplet vectors fail to span L-n+1 dimensions.
class RankDeficiencyError : public DomainError {
 public:
  RankDeficiencyError(const std::string& what, std::vector<double> gram_spectrum)
      : DomainError(what), gram_spectrum_(std::move(gram_spectrum)) {}
  const std::vector<double>& gram_spectrum() const noexcept { return gram_spectrum_; }

 private:
  std::vector<double> gram_spectrum_;
};

struct DropletFamily {
  int L = 0;
  int n = 0;
  double q = 0.0;
  std::vector<int> centers;
  std::vector<std::vector<double>> raw_vectors;
  SubspaceBasis basis;
};

/// Expected dim K_{L,n}: L-n+1, except n = 0 where every center yields the
/// same all-up state.
inline std::size_t droplet_subspace_dimension(int L, int n) {
  return n == 0 ? 1 : static_cast<std::size_t>(L - n + 1);
}

/// Eigenvalues of the Gram matrix of `vectors`, ascending.
inline std::vector<double> gram_spectrum(const std::vector<std::vector<double>>& vectors) {
  const auto k = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      const auto& a = vectors[static_cast<std::size_t>(i)];
      const auto& b = vectors[static_cast<std::size_t>(j)];
      for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
      g(i, j) = g(j, i) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + k};
}

inline DropletFamily droplet_subspace(int L, int n, double q, double rank_tol = 1e-10) {
  DropletFamily fam;
  fam.L = L;
  fam.n = n;
  fam.q = q;
  fam.centers = droplet_centers(L, n);
  std::vector<std::vector<double>> unit;
  for (int x : fam.centers) {
    fam.raw_vectors.push_back(droplet_state_raw(L, n, x, q));
    unit.push_back(droplet_state(L, n, x, q));
  }
  fam.basis = orthonormalize(unit, rank_tol);
  const std::size_t expected = droplet_subspace_dimension(L, n);
  if (fam.basis.rank() != expected) {
    auto spec = gram_spectrum(unit);
    std::string msg = "droplet_subspace: (L, n) = (" + std::to_string(L) + ", " + std::to_string(n) + ") spans rank " +
                      std::to_string(fam.basis.rank()) + ", expected " + std::to_string(expected) + "; Gram spectrum:";
    for (double g : spec) msg += " " + format_double(g);
    throw RankDeficiencyError(msg, std::move(spec));
  }
  return fam;
}

/// Measured counterparts of the droplet statements for one (L, n, Delta).
struct TheoremReport {
  int L = 0;
  int n = 0;
  double delta = 0.0;
  double q = 0.0;
  double amplitude = 0.0;             // A(Delta)
  std::size_t multiplet_size = 0;     // min(L-n+1, sector dim)
  double window_halfwidth = 0.0;      // max_k |lambda(k) - A|, k <= multiplet_size
  std::optional<double> gap_value;    // lambda(multiplet_size + 1) - A
  double subspace_distance = 0.0;     // ||Proj(K) - Proj(H^{multiplet})||
  double gamma_ref = 0.0;             // 1 - 1/Delta
  bool degenerate_cut = false;
  SolveMethod method = SolveMethod::Dense;
  double max_residual = 0.0;
  std::vector<double> eigenvalues;    // the lowest multiplet_size (+1) levels
};

/// Diagonalizes H^{++} on sector (L, n) and compares its lowest L-n+1
/// eigenpairs with A(Delta), the gap reference, and the droplet subspace.
inline TheoremReport verify_theorem(int L, int n, double delta, const SolverBudget& budget = {}) {
  const AnisotropyParam an = make_anisotropy_from_delta(delta);
  const SpinBasisSector sector(L, n);
  const SparseOperator h = build_chain_hamiltonian(L, delta, BoundarySign::Plus, BoundarySign::Plus, sector);

  TheoremReport rep;
  rep.L = L;
  rep.n = n;
  rep.delta = delta;
  rep.q = an.q;
  rep.amplitude = boundary_field_amplitude(delta);
  rep.gamma_ref = droplet_gap_reference(delta);
  rep.multiplet_size = std::min<std::size_t>(static_cast<std::size_t>(L - n + 1), sector.dimension());

  const std::size_t want = std::min(rep.multiplet_size + 1, sector.dimension());
  SpectralResult spec = solve_lowest(h, want, budget);
  rep.method = spec.method;
  rep.max_residual = spec.max_residual();
  rep.eigenvalues = spec.eigenvalues;

  for (std::size_t k = 0; k < rep.multiplet_size; ++k) {
    rep.window_halfwidth = std::max(rep.window_halfwidth, std::abs(spec.eigenvalues[k] - rep.amplitude));
  }
  if (spec.eigenvalues.size() > rep.multiplet_size) {
    rep.gap_value = spec.eigenvalues[rep.multiplet_size] - rep.amplitude;
  }
  rep.degenerate_cut = is_degenerate_cut(spec.eigenvalues, rep.multiplet_size);

  const DropletFamily fam = droplet_subspace(L, n, an.q);
  rep.subspace_distance = projection_distance(fam.basis, spectral_subspace(spec, rep.multiplet_size));
  return rep;
}

/// ||H^{+-} psi^{+-}_{[1,L]}(n)|| with H^{+-} the (+,-) chain Hamiltonian.
inline double kink_annihilation_check(int L, int n, double delta) {
  const AnisotropyParam an = make_anisotropy_from_delta(delta);
  const SpinBasisSector sector(L, n);
  const auto h = build_chain_hamiltonian(L, delta, BoundarySign::Plus, BoundarySign::Minus, sector);
  const auto psi = kink_state(1, L, n, an.q);
  const auto out = h.multiply(psi);
  double s = 0.0;
  for (double v : out) s += v * v;
  return std::sqrt(s);
}

/// ||H^{-+} psi^{-+}_{[1,L]}(n)||, the mirror image of kink_annihilation_check.
inline double antikink_annihilation_check(int L, int n, double delta) {
  const AnisotropyParam an = make_anisotropy_from_delta(delta);
  const SpinBasisSector sector(L, n);
  const auto h = build_chain_hamiltonian(L, delta, BoundarySign::Minus, BoundarySign::Plus, sector);
  const auto psi = antikink_state(1, L, n, an.q);
  const auto out = h.multiply(psi);
  double s = 0.0;
  for (double v : out) s += v * v;
  return std::sqrt(s);
}

}  // namespace qlat
