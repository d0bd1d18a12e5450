#pragma once

// Spectra of sparse symmetric operators and subspace comparison.
//
// full_spectrum() is the dense oracle (Eigen's symmetric QR). lowest_k() is a
// thick-restart Lanczos iteration with full reorthogonalization, used for
// sectors beyond the dense cap. Both fix eigenvector phases so that the
// largest-magnitude component is positive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlat/errors.hpp"
#include "qlat/sparse.hpp"

namespace qlat {

enum class SolveMethod { Dense, Lanczos };

inline const char* to_string(SolveMethod m) { return m == SolveMethod::Dense ? "dense" : "lanczos"; }

struct SpectralResult {
  std::vector<double> eigenvalues;           // ascending
  std::optional<Eigen::MatrixXd> eigenvectors;  // columns aligned with eigenvalues
  SolveMethod method = SolveMethod::Dense;
  std::vector<double> residual_norms;        // ||H v - lambda v||, empty without vectors
  SectorTag sector_tag{};
  std::size_t iterations = 0;                // matvecs for Lanczos, 0 for dense

  double max_residual() const {
    return residual_norms.empty() ? 0.0 : *std::max_element(residual_norms.begin(), residual_norms.end());
  }
};

/// Orthonormal columns spanning a subspace of R^dim_ambient.
struct SubspaceBasis {
  std::size_t dim_ambient = 0;
  Eigen::MatrixXd vectors;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
};

inline constexpr std::size_t kDefaultDenseCap = 4096;
inline constexpr double kDegenerateCutTol = 1e-12;

namespace detail {

inline void fix_phase(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v.size() > 0 && v(best) < 0) v = -v;
}

inline std::vector<double> residuals(const SparseOperator& op, const Eigen::MatrixXd& vecs,
                                     const std::vector<double>& vals) {
  std::vector<double> out;
  out.reserve(vals.size());
  std::vector<double> x(op.dim()), y(op.dim());
  for (std::size_t k = 0; k < vals.size(); ++k) {
    Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) = vecs.col(static_cast<Eigen::Index>(k));
    op.multiply(x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - vals[k] * x[i];
      s += r * r;
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

}  // namespace detail

/// Every eigenvalue of `op`, ascending; eigenvectors on request.
inline SpectralResult full_spectrum(const SparseOperator& op, bool want_vectors,
                                    std::size_t dense_cap = kDefaultDenseCap) {
  if (op.dim() > dense_cap) {
    throw CapExceeded("full_spectrum: dimension " + std::to_string(op.dim()) + " exceeds dense cap " +
                      std::to_string(dense_cap) + "; use lowest_k");
  }
  SpectralResult res;
  res.method = SolveMethod::Dense;
  res.sector_tag = op.tag();
  if (op.dim() == 0) return res;
  const Eigen::MatrixXd dense = op.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, want_vectors ? Eigen::ComputeEigenvectors
                                                                        : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("full_spectrum: dense eigensolver failed", {});
  res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  if (want_vectors) {
    Eigen::MatrixXd vecs = es.eigenvectors();
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) detail::fix_phase(vecs.col(k));
    res.residual_norms = detail::residuals(op, vecs, res.eigenvalues);
    res.eigenvectors = std::move(vecs);
  }
  return res;
}

struct LanczosOptions {
  /// Krylov basis size before a thick restart; 0 picks max(2k + 20, 40).
  std::size_t basis_size = 0;
  /// Ritz vectors retained at restart; 0 picks k + (basis_size - k) / 2.
  std::size_t keep = 0;
};

/// Lowest `k` eigenpairs by thick-restart Lanczos with full
/// reorthogonalization (two classical Gram-Schmidt passes per step).
///
/// The start vector is drawn from a mt19937_64 seeded with `seed`; the
/// arithmetic order is fixed, so equal seeds give bitwise-equal results.
/// `max_iter` bounds the number of matrix-vector products. Convergence is
/// judged on true residuals ||H v - lambda v|| <= tol.
inline SpectralResult lowest_k(const SparseOperator& op, std::size_t k, double tol, std::size_t max_iter,
                               std::uint64_t seed, LanczosOptions opts = {}) {
  const std::size_t n = op.dim();
  if (k < 1 || k >= n) {
    throw DomainError("lowest_k: need 1 <= k < dim, got k=" + std::to_string(k) + ", dim=" + std::to_string(n));
  }
  if (!(tol > 0.0)) throw DomainError("lowest_k: tol must be positive");

  std::size_t m = opts.basis_size ? opts.basis_size : std::max<std::size_t>(2 * k + 20, 40);
  m = std::min(m, n);
  if (m <= k) m = std::min(n, k + 1);
  std::size_t keep = opts.keep ? opts.keep : k + (m - k) / 2;
  keep = std::clamp<std::size_t>(keep, k, m - 1);

  const auto N = static_cast<Eigen::Index>(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd v(N);
    for (Eigen::Index i = 0; i < N; ++i) v(i) = uni(rng);
    return v;
  };

  Eigen::MatrixXd V(N, static_cast<Eigen::Index>(m));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  {
    Eigen::VectorXd v0 = random_vector();
    V.col(0) = v0 / v0.norm();
  }

  std::vector<double> x(n), y(n);
  Eigen::VectorXd w(N);
  Eigen::VectorXd residual_vec(N);
  double beta_last = 0.0;
  std::size_t start = 0;
  std::size_t matvecs = 0;
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  const double scale = 1.0 + op.one_norm();

  while (true) {
    for (std::size_t j = start; j < m; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      Eigen::Map<Eigen::VectorXd>(x.data(), N) = V.col(J);
      op.multiply(x, y);
      ++matvecs;
      w = Eigen::Map<const Eigen::VectorXd>(y.data(), N);
      auto basis = V.leftCols(J + 1);
      Eigen::VectorXd h = basis.transpose() * w;
      w.noalias() -= basis * h;
      Eigen::VectorXd h2 = basis.transpose() * w;
      w.noalias() -= basis * h2;
      h += h2;
      for (Eigen::Index i = 0; i <= J; ++i) {
        H(i, J) = h(i);
        H(J, i) = h(i);
      }
      double beta = w.norm();
      const bool breakdown = beta <= 1e-12 * scale;
      if (j + 1 < m) {
        if (breakdown) {
          // Invariant subspace reached: continue from a fresh direction.
          Eigen::VectorXd r = random_vector();
          for (int pass = 0; pass < 2; ++pass) r.noalias() -= basis * (basis.transpose() * r);
          V.col(J + 1) = r / r.norm();
        } else {
          V.col(J + 1) = w / beta;
        }
      } else {
        beta_last = breakdown ? 0.0 : beta;
        if (!breakdown) residual_vec = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& Y = es.eigenvectors();
    const auto M = static_cast<Eigen::Index>(m);

    bool estimates_ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      const double est = beta_last * std::abs(Y(M - 1, static_cast<Eigen::Index>(i)));
      if (est > tol) estimates_ok = false;
    }

    if (estimates_ok || matvecs >= max_iter) {
      Eigen::MatrixXd ritz = V * Y.leftCols(static_cast<Eigen::Index>(k));
      std::vector<double> vals(theta.data(), theta.data() + k);
      for (Eigen::Index c = 0; c < ritz.cols(); ++c) {
        ritz.col(c).normalize();
        detail::fix_phase(ritz.col(c));
      }
      auto res = detail::residuals(op, ritz, vals);
      for (std::size_t i = 0; i < k; ++i) best[i] = std::min(best[i], res[i]);
      const bool ok = std::all_of(res.begin(), res.end(), [&](double r) { return r <= tol; });
      if (ok) {
        SpectralResult out;
        out.eigenvalues = std::move(vals);
        out.eigenvectors = std::move(ritz);
        out.residual_norms = std::move(res);
        out.method = SolveMethod::Lanczos;
        out.sector_tag = op.tag();
        out.iterations = matvecs;
        return out;
      }
      if (matvecs >= max_iter) {
        throw ConvergenceError("lowest_k: no convergence within " + std::to_string(max_iter) +
                                   " matrix-vector products (k=" + std::to_string(k) +
                                   ", dim=" + std::to_string(n) + ")",
                               best);
      }
    }

    // Thick restart: keep the lowest `keep` Ritz vectors plus the residual direction.
    const auto K = static_cast<Eigen::Index>(keep);
    Eigen::MatrixXd kept = V * Y.leftCols(K);
    V.leftCols(K) = kept;
    H.setZero();
    for (Eigen::Index i = 0; i < K; ++i) H(i, i) = theta(i);
    if (beta_last > 0.0) {
      V.col(K) = residual_vec;
    } else {
      Eigen::VectorXd r = random_vector();
      auto basis = V.leftCols(K);
      for (int pass = 0; pass < 2; ++pass) r.noalias() -= basis * (basis.transpose() * r);
      V.col(K) = r / r.norm();
    }
    start = keep;
  }
}

/// Dense when the dimension fits under `dense_cap`, Lanczos otherwise.
struct SolverBudget {
  std::size_t dense_cap = kDefaultDenseCap;
  double tol = 1e-9;
  std::size_t max_iter = 20000;
  std::uint64_t seed = 12345;
};

/// Lowest `k` eigenpairs with vectors; k >= dim returns the whole spectrum
/// densely whatever the cap.
inline SpectralResult solve_lowest(const SparseOperator& op, std::size_t k, const SolverBudget& budget = {}) {
  if (op.dim() <= budget.dense_cap || k >= op.dim()) {
    SpectralResult full = full_spectrum(op, true, std::max(budget.dense_cap, op.dim()));
    const auto keep = std::min(k, full.eigenvalues.size());
    full.eigenvalues.resize(keep);
    full.residual_norms.resize(keep);
    full.eigenvectors = Eigen::MatrixXd(full.eigenvectors->leftCols(static_cast<Eigen::Index>(keep)));
    return full;
  }
  return lowest_k(op, std::min(k, op.dim() - 1), budget.tol, budget.max_iter, budget.seed);
}

/// True when eigenvalues k-1 and k (0-based) are closer than kDegenerateCutTol,
/// i.e. a spectral projection onto the first k vectors is ill-posed.
inline bool is_degenerate_cut(const std::vector<double>& eigenvalues, std::size_t k) {
  if (k == 0 || k >= eigenvalues.size()) return false;
  return std::abs(eigenvalues[k] - eigenvalues[k - 1]) < kDegenerateCutTol;
}

/// Orthonormal basis of span(columns) by modified Gram-Schmidt with one
/// reorthogonalization pass. A column is dropped when the part of it outside
/// the span of earlier columns is below rank_tol relative to its own norm.
inline SubspaceBasis orthonormalize(const Eigen::MatrixXd& columns, double rank_tol = 1e-10) {
  if (columns.cols() == 0) throw DomainError("orthonormalize: empty vector list");
  std::vector<Eigen::VectorXd> kept;
  bool any_nonzero = false;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::VectorXd v = columns.col(c);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    any_nonzero = true;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : kept) v -= u.dot(v) * u;
    }
    const double rest = v.norm();
    if (rest < rank_tol * norm0) continue;
    kept.push_back(v / rest);
  }
  if (!any_nonzero) throw DomainError("orthonormalize: all input vectors are zero");
  SubspaceBasis out;
  out.dim_ambient = static_cast<std::size_t>(columns.rows());
  out.vectors.resize(columns.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.vectors.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

inline SubspaceBasis orthonormalize(const std::vector<std::vector<double>>& vectors, double rank_tol = 1e-10) {
  if (vectors.empty()) throw DomainError("orthonormalize: empty vector list");
  const std::size_t dim = vectors.front().size();
  Eigen::MatrixXd cols(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t c = 0; c < vectors.size(); ++c) {
    if (vectors[c].size() != dim) throw DomainError("orthonormalize: inconsistent ambient dimension");
    cols.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXd>(vectors[c].data(), static_cast<Eigen::Index>(dim));
  }
  return orthonormalize(cols, rank_tol);
}

namespace detail {

/// ||(I - Q Q^T) P||_2 for orthonormal P, Q, formed from the explicit
/// residual matrix so that small values keep their relative accuracy.
inline double one_sided_distance(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  if (P.cols() == 0) return 0.0;
  if (P.cols() > Q.cols()) return 1.0;
  const Eigen::MatrixXd E = P - Q * (Q.transpose() * P);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(E.transpose() * E, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

/// ||Proj(P) - Proj(Q)|| in operator norm, i.e. the sine of the largest
/// principal angle; 1 whenever the dimensions differ.
inline double projection_distance(const SubspaceBasis& P, const SubspaceBasis& Q) {
  if (P.dim_ambient != Q.dim_ambient) {
    throw DomainError("projection_distance: ambient dimensions " + std::to_string(P.dim_ambient) + " and " +
                      std::to_string(Q.dim_ambient) + " differ");
  }
  const double d = std::max(detail::one_sided_distance(P.vectors, Q.vectors),
                            detail::one_sided_distance(Q.vectors, P.vectors));
  return std::min(d, 1.0);
}

/// Basis made of the first `count` eigenvectors of a result.
inline SubspaceBasis spectral_subspace(const SpectralResult& res, std::size_t count) {
  if (!res.eigenvectors) throw DomainError("spectral_subspace: result carries no eigenvectors");
  if (count > static_cast<std::size_t>(res.eigenvectors->cols())) {
    throw DomainError("spectral_subspace: requested " + std::to_string(count) + " vectors, have " +
                      std::to_string(res.eigenvectors->cols()));
  }
  SubspaceBasis b;
  b.dim_ambient = static_cast<std::size_t>(res.eigenvectors->rows());
  b.vectors = res.eigenvectors->leftCols(static_cast<Eigen::Index>(count));
  return b;
}

}  // namespace qlat
