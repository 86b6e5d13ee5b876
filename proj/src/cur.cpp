#include "qmlp/cur.hpp"

#include <Eigen/SVD>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qmlp {

namespace {

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(m.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = m.col(idx[j]);
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = m.row(idx[i]);
  return out;
}

void check_indices(const std::vector<int>& idx, int bound, const char* what) {
  std::vector<bool> seen(bound, false);
  for (int i : idx) {
    if (i < 0 || i >= bound) throw std::out_of_range(std::string(what) + " index out of range");
    if (seen[i]) throw std::invalid_argument(std::string(what) + " indices must be unique");
    seen[i] = true;
  }
}

}  // namespace

FeatureMatrix FeatureMatrix::transposed() const {
  FeatureMatrix t;
  t.values = values.transpose();
  t.row_tags = col_tags;
  t.col_tags = row_tags;
  return t;
}

void FeatureMatrix::validate() const {
  if (!values.allFinite()) throw std::invalid_argument("feature matrix: non-finite entries");
  if (!row_tags.empty() && static_cast<int>(row_tags.size()) != rows()) {
    throw std::invalid_argument("feature matrix: row tag count mismatch");
  }
  if (!col_tags.empty() && static_cast<int>(col_tags.size()) != cols()) {
    throw std::invalid_argument("feature matrix: column tag count mismatch");
  }
}

Eigen::VectorXd importance_scores(const FeatureMatrix& x, int k) {
  x.validate();
  const int kmax = static_cast<int>(std::min(x.values.rows(), x.values.cols()));
  if (k < 1 || k > kmax) {
    throw std::invalid_argument("importance scores: k must be in [1, min(rows, cols)]");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.values, Eigen::ComputeThinV);
  const auto& v = svd.matrixV();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(x.cols());
  for (int j = 0; j < k; ++j) scores += v.col(j).cwiseAbs2();
  return scores;
}

FeatureMatrix orthogonalize_against(const FeatureMatrix& x, int l) {
  x.validate();
  if (l < 0 || l >= x.cols()) throw std::out_of_range("orthogonalize: pivot out of range");
  const Eigen::VectorXd pivot = x.values.col(l);
  const double n2 = pivot.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("orthogonalize: zero-norm pivot column");

  FeatureMatrix out = x;
  for (int j = 0; j < x.cols(); ++j) {
    if (j == l) continue;
    out.values.col(j) -= pivot * (pivot.dot(x.values.col(j)) / n2);
  }
  out.values.col(l).setZero();
  return out;
}

SelectionResult select_columns(const FeatureMatrix& x, int n_target, int k,
                               std::optional<double> epsilon_stop) {
  x.validate();
  if (n_target < 0 || n_target > x.cols()) {
    throw std::invalid_argument("select_columns: n_target outside [0, cols]");
  }

  SelectionResult result;
  result.k = k;
  std::vector<int> all_rows(x.rows());
  for (int i = 0; i < x.rows(); ++i) all_rows[i] = i;

  FeatureMatrix residual = x;
  while (static_cast<int>(result.indices.size()) < n_target) {
    if (residual.values.norm() <= 1e-14 * std::max(1.0, x.values.norm())) {
      result.exhausted = true;
      break;
    }
    Eigen::VectorXd scores = importance_scores(residual, k);
    int best = 0;
    for (int c = 1; c < residual.cols(); ++c) {
      if (scores[c] > scores[best]) best = c;  // strict: lowest index wins ties
    }
    result.indices.push_back(best);
    if (!x.col_tags.empty()) result.tags.push_back(x.col_tags[best]);
    result.eps_trace.push_back(cur_error(x, result.indices, all_rows));
    if (epsilon_stop && result.eps_trace.back() < *epsilon_stop) break;
    residual = orthogonalize_against(residual, best);
  }
  return result;
}

SelectionResult select_rows(const FeatureMatrix& x, int n_target, int k,
                            std::optional<double> epsilon_stop) {
  return select_columns(x.transposed(), n_target, k, epsilon_stop);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  const double cutoff = std::max(m.rows(), m.cols()) * sv(0) * 1e-12;
  Eigen::VectorXd inv = sv;
  for (int i = 0; i < sv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double cur_error(const FeatureMatrix& x, const std::vector<int>& col_indices,
                 const std::vector<int>& row_indices) {
  x.validate();
  const double xnorm = x.values.norm();
  if (xnorm == 0.0) throw std::invalid_argument("cur_error: zero matrix");
  check_indices(col_indices, x.cols(), "column");
  check_indices(row_indices, x.rows(), "row");
  if (col_indices.empty() || row_indices.empty()) return 1.0;  // CUR == 0 by convention

  Eigen::MatrixXd c = take_columns(x.values, col_indices);
  Eigen::MatrixXd r = take_rows(x.values, row_indices);
  Eigen::MatrixXd u = pseudo_inverse(c) * x.values * pseudo_inverse(r);
  return (x.values - c * u * r).norm() / xnorm;
}

FeatureMatrix build_feature_matrix(const Dataset& data, const DescriptorSet& set,
                                   const std::string& element) {
  if (data.empty()) throw std::invalid_argument("feature matrix: empty dataset");
  if (!set.scaled()) throw std::logic_error("feature matrix: descriptor scaling not fitted");

  const int n_func = set.n_active(element);
  FeatureMatrix x;
  x.values.setZero(data.size(), n_func);
  for (int i = 0; i < data.size(); ++i) {
    const auto& s = data.structures[i];
    DescriptorOutput out = compute_descriptors(s, set, true, false);
    int count = 0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_func);
    for (int a = 0; a < s.n_atoms(); ++a) {
      if (s.species[a] != element) continue;
      acc += out.values[a];
      ++count;
    }
    if (count == 0) {
      throw std::runtime_error("feature matrix: structure " + std::to_string(i) +
                               " has no atom of element " + element);
    }
    x.values.row(i) = (acc / count).transpose();
    x.row_tags.push_back("structure_" + std::to_string(i));
  }
  // column tags name the function kind and its position in the element list
  const auto& fns = set.functions_for(element);
  const auto& st = set.stats.at(element);
  for (std::size_t f = 0; f < fns.size(); ++f) {
    if (st[f].constant) continue;
    x.col_tags.push_back((fns[f].kind == SymmetryFunction::Kind::Radial ? "G2_" : "G3_") +
                         element + "_" + std::to_string(f));
  }
  x.validate();
  return x;
}

void write_selection_csv(const SelectionResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "pick_order,index,tag,epsilon_after\n";
  char buf[40];
  for (std::size_t i = 0; i < result.indices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", result.eps_trace[i]);
    out << i << "," << result.indices[i] << ","
        << (i < result.tags.size() ? result.tags[i] : "") << "," << buf << "\n";
  }
}

}  // namespace qmlp
