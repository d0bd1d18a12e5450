#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qlat/errors.hpp"

namespace qlat {

/// Provenance of an operator: the (L, n) sector it acts on.
struct SectorTag {
  int sites = 0;
  int down = 0;

  friend bool operator==(const SectorTag&, const SectorTag&) = default;
};

/// Real symmetric matrix in row-compressed form.
///
/// Column indices inside each row are strictly increasing and no stored value
/// is zero, so two operators with the same entries have identical storage.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Builds from per-row (column, value) lists. Entries are sorted, duplicates
  /// summed, and zeros dropped.
  static SparseOperator from_rows(std::vector<std::vector<std::pair<std::size_t, double>>> rows, SectorTag tag) {
    SparseOperator op;
    op.dim_ = rows.size();
    op.tag_ = tag;
    op.row_ptr_.assign(1, 0);
    op.row_ptr_.reserve(op.dim_ + 1);
    for (auto& row : rows) {
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < row.size();) {
        std::size_t col = row[k].first;
        double v = row[k].second;
        std::size_t j = k + 1;
        for (; j < row.size() && row[j].first == col; ++j) v += row[j].second;
        if (col >= op.dim_) throw DomainError("SparseOperator: column index out of range");
        if (v != 0.0) {
          op.cols_.push_back(col);
          op.vals_.push_back(v);
        }
        k = j;
      }
      op.row_ptr_.push_back(op.cols_.size());
      row.clear();
      row.shrink_to_fit();
    }
    return op;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return vals_.size(); }
  const SectorTag& tag() const noexcept { return tag_; }
  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& cols() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return vals_; }

  /// Entry (i, j); zero when not stored.
  double at(std::size_t i, std::size_t j) const {
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i));
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i + 1));
    auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
  }

  /// y = A x, summed row by row in column order.
  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) throw DomainError("SparseOperator::multiply: size mismatch");
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
      y[i] = acc;
    }
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(dim_);
    multiply(x, y);
    return y;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[k])) = vals_[k];
      }
    }
    return m;
  }

  /// Bitwise symmetry of stored entries.
  bool is_symmetric() const {
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (at(cols_[k], i) != vals_[k]) return false;
      }
    }
    return true;
  }

  /// Max absolute column sum; equals the max row sum for symmetric input.
  double one_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(vals_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
    return t;
  }

  friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

 private:
  std::size_t dim_ = 0;
  SectorTag tag_{};
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

/// 17 significant digits: lossless for binary64.
inline std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

/// Triplet text format: header "dim nnz", then one "row col value" line per
/// stored entry in row-major order, values with 17 significant digits.
inline void write_triplets(std::ostream& os, const SparseOperator& op) {
  os << op.dim() << ' ' << op.nnz() << '\n';
  for (std::size_t i = 0; i < op.dim(); ++i) {
    for (std::size_t k = op.row_ptr()[i]; k < op.row_ptr()[i + 1]; ++k) {
      os << i << ' ' << op.cols()[k] << ' ' << format_double(op.values()[k]) << '\n';
    }
  }
}

inline SparseOperator read_triplets(std::istream& is, SectorTag tag = {}) {
  std::size_t dim = 0, nnz = 0;
  if (!(is >> dim >> nnz)) throw DomainError("read_triplets: missing 'dim nnz' header");
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(dim);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(is >> r >> c >> v)) throw DomainError("read_triplets: truncated entry list");
    if (r >= dim || c >= dim) throw DomainError("read_triplets: index out of range");
    rows[r].emplace_back(c, v);
  }
  return SparseOperator::from_rows(std::move(rows), tag);
}

}  // namespace qlat
