#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "qmlp/structure.hpp"
#include "qmlp/symfunc.hpp"

namespace qmlp {

/// Dense feature matrix X(i, j) = value of candidate function j on
/// configuration i, with identity tags for both axes.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_tags;
  std::vector<std::string> col_tags;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  FeatureMatrix transposed() const;
  void validate() const;
};

/// Greedy CUR selection output: picked indices in pick order, the relative
/// reconstruction error after each pick, and the k used for scoring.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<std::string> tags;
  std::vector<double> eps_trace;
  int k = 1;
  bool exhausted = false;  // residual vanished before n_target picks
};

/// Column importance scores pi_c = sum_{j<=k} (v_c^(j))^2 from the top k
/// right singular vectors. Requires 1 <= k <= min(rows, cols).
Eigen::VectorXd importance_scores(const FeatureMatrix& x, int k);

/// Removes the component along column l from every other column; column l is
/// zeroed. The pivot column must have nonzero norm.
FeatureMatrix orthogonalize_against(const FeatureMatrix& x, int l);

/// Greedy column selection: score, pick the max (lowest index wins ties),
/// orthogonalize, repeat until n_target picks, the optional error threshold
/// is reached, or the residual matrix vanishes (reported via `exhausted`).
SelectionResult select_columns(const FeatureMatrix& x, int n_target, int k = 1,
                               std::optional<double> epsilon_stop = std::nullopt);

/// Row selection == column selection on the transpose.
SelectionResult select_rows(const FeatureMatrix& x, int n_target, int k = 1,
                            std::optional<double> epsilon_stop = std::nullopt);

/// Relative Frobenius reconstruction error ||X - C U R||_F / ||X||_F with
/// U = C^+ X R^+. An empty selection is defined to have error 1.
double cur_error(const FeatureMatrix& x, const std::vector<int>& col_indices,
                 const std::vector<int>& row_indices);

/// Moore-Penrose pseudoinverse via SVD with singular-value threshold
/// max(M, N) * sigma_max * 1e-12.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m);

/// Builds the configuration-by-function feature matrix from scaled
/// descriptors of the given element: entry (i, j) is the mean of scaled
/// function j over the atoms of that element in structure i.
FeatureMatrix build_feature_matrix(const Dataset& data, const DescriptorSet& set,
                                   const std::string& element);

/// CSV dump: pick_order,index,tag,epsilon_after
void write_selection_csv(const SelectionResult& result, const std::string& path);

}  // namespace qmlp
