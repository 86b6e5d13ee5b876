#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmlp/cur.hpp"
#include "qmlp/rng.hpp"

using namespace qmlp;

namespace {

FeatureMatrix from_matrix(const Eigen::MatrixXd& m) {
  FeatureMatrix x;
  x.values = m;
  return x;
}

FeatureMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return from_matrix(m);
}

std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("importance scores on a hand-solved diagonal matrix") {
  // X = diag(3, 1): top right singular vector is e1 -> scores (1, 0)
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  Eigen::VectorXd s = importance_scores(from_matrix(m), 1);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("identical columns get equal scores") {
  Eigen::MatrixXd m(3, 3);
  m.col(0) << 1, 2, 3;
  m.col(1) << 1, 2, 3;
  m.col(2) << 0.5, -1, 0.25;
  Eigen::VectorXd s = importance_scores(from_matrix(m), 1);
  CHECK(s[0] == doctest::Approx(s[1]).epsilon(1e-12));
}

TEST_CASE("scores of all singular vectors sum to k") {
  FeatureMatrix x = random_matrix(6, 6, 42);
  const int k = 6;
  Eigen::VectorXd s = importance_scores(x, k);
  CHECK(s.sum() == doctest::Approx(static_cast<double>(k)).epsilon(1e-10));
  CHECK_THROWS_AS(importance_scores(x, 7), std::invalid_argument);
  CHECK_THROWS_AS(importance_scores(x, 0), std::invalid_argument);
}

TEST_CASE("orthogonalization removes the pivot direction") {
  FeatureMatrix x = random_matrix(8, 5, 7);
  FeatureMatrix y = orthogonalize_against(x, 2);
  const Eigen::VectorXd pivot = x.values.col(2);
  CHECK(y.values.col(2).norm() == 0.0);
  for (int j = 0; j < 5; ++j) {
    if (j == 2) continue;
    CHECK(std::abs(pivot.dot(y.values.col(j))) <=
          1e-10 * std::max(1.0, pivot.norm() * y.values.col(j).norm()));
  }

  // a column orthogonal to the pivot is unchanged
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 2);
  m.col(0) << 1, 0, 0, 0;
  m.col(1) << 0, 1, 1, 0;
  FeatureMatrix z = orthogonalize_against(from_matrix(m), 0);
  CHECK((z.values.col(1) - m.col(1)).norm() == 0.0);

  // a column equal to the pivot becomes zero
  Eigen::MatrixXd m2(3, 2);
  m2.col(0) << 1, 2, 3;
  m2.col(1) << 1, 2, 3;
  FeatureMatrix z2 = orthogonalize_against(from_matrix(m2), 0);
  CHECK(z2.values.col(1).norm() <= 1e-14);

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
  zero.col(1) << 1, 1, 1;
  CHECK_THROWS_AS(orthogonalize_against(from_matrix(zero), 0), std::invalid_argument);
}

TEST_CASE("select_columns on the identity picks everything, eps -> 0") {
  FeatureMatrix x = from_matrix(Eigen::MatrixXd::Identity(3, 3));
  SelectionResult r = select_columns(x, 3, 1);
  REQUIRE(r.indices.size() == 3);
  CHECK(r.indices[0] == 0);  // degenerate scores resolved by lowest index
  CHECK(r.eps_trace.back() < 1e-12);
}

TEST_CASE("rank-1 matrix is exhausted after one pick") {
  Eigen::VectorXd a(4), b(3);
  a << 1, -2, 0.5, 3;
  b << 2, 1, -1;
  FeatureMatrix x = from_matrix(a * b.transpose());
  SelectionResult r = select_columns(x, 3, 1);
  CHECK(r.eps_trace[0] < 1e-12);
  // after the first pick the orthogonalized residual vanishes
  CHECK(r.exhausted);
  CHECK(r.indices.size() == 1);
}

TEST_CASE("full selection reconstructs exactly; trace non-increasing") {
  FeatureMatrix x = random_matrix(7, 5, 99);
  SelectionResult r = select_columns(x, 5, 1);
  REQUIRE(!r.eps_trace.empty());
  for (std::size_t i = 1; i < r.eps_trace.size(); ++i) {
    CHECK(r.eps_trace[i] <= r.eps_trace[i - 1] + 1e-12);
  }
  CHECK(r.eps_trace.back() < 1e-10);

  // indices unique
  std::vector<int> idx = r.indices;
  std::sort(idx.begin(), idx.end());
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
}

TEST_CASE("cur_error conventions and low-rank reconstruction") {
  FeatureMatrix x = random_matrix(6, 4, 3);
  CHECK(cur_error(x, iota(4), iota(6)) < 1e-12);
  CHECK(cur_error(x, {}, iota(6)) == 1.0);
  CHECK(cur_error(x, iota(4), {}) == 1.0);
  CHECK_THROWS_AS(cur_error(from_matrix(Eigen::MatrixXd::Zero(2, 2)), {0}, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cur_error(x, {0, 0}, iota(6)), std::invalid_argument);
  CHECK_THROWS_AS(cur_error(x, {9}, iota(6)), std::out_of_range);

  // rank-2 matrix with two well-chosen columns/rows reconstructs
  Eigen::MatrixXd a(5, 2), b(2, 4);
  Rng rng(11);
  for (int i = 0; i < 5; ++i) {
    a(i, 0) = rng.normal();
    a(i, 1) = rng.normal();
  }
  for (int j = 0; j < 4; ++j) {
    b(0, j) = rng.normal();
    b(1, j) = rng.normal();
  }
  FeatureMatrix low = from_matrix(a * b);
  CHECK(cur_error(low, {0, 1}, {0, 1}) < 1e-10);
}

TEST_CASE("row selection is column selection of the transpose") {
  FeatureMatrix x = random_matrix(6, 4, 21);
  SelectionResult rows = select_rows(x, 3, 1);
  SelectionResult cols = select_columns(x.transposed(), 3, 1);
  CHECK(rows.indices == cols.indices);
  for (std::size_t i = 0; i < rows.eps_trace.size(); ++i) {
    CHECK(rows.eps_trace[i] == doctest::Approx(cols.eps_trace[i]).epsilon(1e-12));
  }
}

TEST_CASE("duplicate rows: one per family before the residual vanishes") {
  Eigen::MatrixXd m(4, 3);
  m.row(0) << 1, 0, 2;
  m.row(1) << 1, 0, 2;  // duplicate of row 0
  m.row(2) << 0, 1, -1;
  m.row(3) << 0, 1, -1;  // duplicate of row 2
  SelectionResult r = select_rows(from_matrix(m), 4, 1);
  CHECK(r.exhausted);
  REQUIRE(r.indices.size() == 2);
  // at most one member of each duplicate family
  auto fam = [](int i) { return i / 2; };
  CHECK(fam(r.indices[0]) != fam(r.indices[1]));
  CHECK(r.eps_trace.back() < 1e-10);
}

TEST_CASE("single dominant row wins against brute force") {
  Rng rng(13);
  Eigen::MatrixXd m(5, 4);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = 0.05 * rng.normal();
  }
  m.row(3) << 5, -4, 3, 2;  // dominant
  FeatureMatrix x = from_matrix(m);

  SelectionResult r = select_rows(x, 1, 1);
  REQUIRE(r.indices.size() == 1);

  // brute-force oracle: the row whose single-row CUR minimizes the error
  int best = -1;
  double best_eps = 2.0;
  for (int i = 0; i < 5; ++i) {
    double eps = cur_error(x, iota(4), {i});
    if (eps < best_eps) {
      best_eps = eps;
      best = i;
    }
  }
  CHECK(best == 3);
  CHECK(r.indices[0] == best);
}

TEST_CASE("first pick matches the argmax of the importance scores") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    FeatureMatrix x = random_matrix(8, 6, seed);
    Eigen::VectorXd s = importance_scores(x, 1);
    int argmax = 0;
    for (int c = 1; c < 6; ++c) {
      if (s[c] > s[argmax]) argmax = c;
    }
    SelectionResult r = select_columns(x, 1, 1);
    CHECK(r.indices[0] == argmax);
  }
}
