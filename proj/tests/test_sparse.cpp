#include <sstream>

#include <gtest/gtest.h>

#include "qlat/sparse.hpp"

using namespace qlat;

namespace {

SparseOperator small_operator() {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(3);
  rows[0] = {{0, 2.0}, {1, -1.0}};
  rows[1] = {{1, 2.0}, {0, -1.0}, {2, -0.5}, {1, 0.5}};
  rows[2] = {{2, 1.0}, {1, -0.5}, {0, 0.0}};
  return SparseOperator::from_rows(rows, {3, 1});
}

}  // namespace

TEST(Sparse, FromRowsSortsMergesAndDropsZeros) {
  const SparseOperator op = small_operator();
  EXPECT_EQ(op.dim(), 3U);
  EXPECT_EQ(op.nnz(), 7U);
  EXPECT_EQ(op.at(1, 1), 2.5);
  EXPECT_EQ(op.at(2, 0), 0.0);
  EXPECT_EQ(op.row_ptr(), (std::vector<std::size_t>{0, 2, 5, 7}));
  EXPECT_TRUE(op.is_symmetric());
  EXPECT_DOUBLE_EQ(op.trace(), 5.5);
  EXPECT_DOUBLE_EQ(op.one_norm(), 4.0);
}

TEST(Sparse, MultiplyMatchesDense) {
  const SparseOperator op = small_operator();
  const std::vector<double> x{1.0, -2.0, 3.0};
  const auto y = op.multiply(x);
  const Eigen::VectorXd ref = op.to_dense() * Eigen::Map<const Eigen::VectorXd>(x.data(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(y[static_cast<std::size_t>(i)], ref(i));
}

TEST(Sparse, DetectsAsymmetry) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(2);
  rows[0] = {{1, 1.0}};
  rows[1] = {{0, 1.0 + 1e-15}};
  EXPECT_FALSE(SparseOperator::from_rows(rows, {}).is_symmetric());
}

TEST(Sparse, TripletRoundTripIsExact) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(2);
  rows[0] = {{0, 0.1}, {1, -1.0 / 3.0}};
  rows[1] = {{0, -1.0 / 3.0}, {1, 1e-300}};
  const SparseOperator op = SparseOperator::from_rows(rows, {2, 1});
  std::stringstream ss;
  write_triplets(ss, op);
  EXPECT_EQ(ss.str().substr(0, 4), "2 4\n");
  const SparseOperator back = read_triplets(ss, {2, 1});
  EXPECT_TRUE(back == op);
}

TEST(Sparse, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 15.0 / 34.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}
