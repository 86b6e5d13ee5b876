#pragma once

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qmlp/structure.hpp"

namespace qmlp {

struct CutoffSpec {
  double r_c = 0.0;  // Bohr
  void validate() const;
};

/// tanh^3(1 - r/r_c) for r <= r_c, 0 beyond; value and first derivative both
/// vanish at the cutoff.
double cutoff_value(double r, const CutoffSpec& spec);
double cutoff_derivative(double r, const CutoffSpec& spec);

/// Radial (two-body) or angular (three-body) atom-centered symmetry function.
struct SymmetryFunction {
  enum class Kind { Radial, Angular };

  Kind kind = Kind::Radial;
  double eta = 0.0;  // 1/Bohr^2
  double r_s = 0.0;  // Bohr, radial only
  int lambda = 1;    // angular only, +1 or -1
  double zeta = 1.0; // angular only
  CutoffSpec cutoff;
  std::string neighbor_a;  // radial: the neighbor element
  std::string neighbor_b;  // angular: second element of the unordered pair

  void validate() const;
};

/// Min/max/mean of one symmetry function over a fitting dataset. Functions
/// whose range collapses are flagged constant and dropped from scaled output.
struct ScaleStats {
  double g_min = 0.0;
  double g_max = 0.0;
  double g_mean = 0.0;
  bool constant = false;
};

/// Per-element ordered function lists plus (after fit_scaling) their scaling
/// statistics. Scaled descriptors are (G - <G>)/(G_max - G_min), which maps
/// the fitting data into [-1, 1].
struct DescriptorSet {
  std::map<std::string, std::vector<SymmetryFunction>> functions;
  std::map<std::string, std::vector<ScaleStats>> stats;

  bool scaled() const { return !stats.empty(); }
  const std::vector<SymmetryFunction>& functions_for(const std::string& element) const;

  /// Raw function count for an element.
  int n_functions(const std::string& element) const;
  /// Count surviving the constant-function filter (== n_functions before fit).
  int n_active(const std::string& element) const;

  std::vector<std::string> elements() const;
  void validate() const;

  void save(const std::string& path) const;
  void save(std::ostream& out) const;
  static DescriptorSet load(const std::string& path);
  static DescriptorSet load(std::istream& in, const std::string& name = "<stream>");
};

/// Values and Cartesian gradients of every (active) symmetry function for
/// every atom of one structure. gradients[i] has one row per function of atom
/// i and 3*n_atoms columns (x,y,z of every atom of the structure).
struct DescriptorOutput {
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::MatrixXd> gradients;
};

/// Evaluates descriptors (and analytic gradients when requested). With
/// scaled=true the set must have fitted statistics; constant functions are
/// dropped and gradients carry the 1/(G_max - G_min) factor.
DescriptorOutput compute_descriptors(const Structure& s, const DescriptorSet& set,
                                     bool scaled, bool with_gradients = true);

/// Radial parameter shells: set 1 centers Gaussians on the central atom with
/// widths eta_m = (n^(m/n)/r_c)^2, m = 0..n; set 2 places shifted Gaussians
/// at R_s,m = r_c/n^(m/n), m = 0..n-1, with widths from the spacing of
/// consecutive shifts. Returns 2n+1 functions without element tags.
std::vector<SymmetryFunction> generate_radial_params(int n, double r_c);

/// Angular parameters: Cartesian product of n_eta+1 widths (same width
/// formula), lambda in {-1,+1} and the given zeta list (must be non-empty,
/// duplicates rejected).
std::vector<SymmetryFunction> generate_angular_params(int n_eta, const std::vector<double>& zetas,
                                                      double r_c);

/// Instantiates a candidate descriptor set for the given elements: for every
/// center element, radial functions per neighbor element and angular
/// functions per unordered neighbor pair.
DescriptorSet build_descriptor_set(const std::vector<std::string>& elements, int n_radial,
                                   int n_eta_angular, const std::vector<double>& zetas,
                                   double r_c);

/// Computes per-function scaling statistics over all atoms of the matching
/// element. Throws if an element of the set never occurs in the dataset.
DescriptorSet fit_scaling(const Dataset& data, const DescriptorSet& set);

}  // namespace qmlp
