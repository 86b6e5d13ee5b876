#include "qmlp/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qmlp {

namespace {

bool range_is_constant(double g_min, double g_max) {
  double scale = std::max({1.0, std::abs(g_min), std::abs(g_max)});
  return (g_max - g_min) <= 1e-13 * scale;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Pairwise geometry of one structure: distances and displacement vectors.
struct PairTable {
  int n;
  Eigen::MatrixXd dist;
  std::vector<Eigen::Vector3d> disp;  // disp[i*n+j] = R_j - R_i

  explicit PairTable(const Structure& s) : n(s.n_atoms()), dist(n, n), disp(n * n) {
    for (int i = 0; i < n; ++i) {
      dist(i, i) = 0.0;
      disp[i * n + i].setZero();
      for (int j = i + 1; j < n; ++j) {
        Eigen::Vector3d d = s.positions[j] - s.positions[i];
        double r = d.norm();
        if (r < 1e-10) {
          throw std::domain_error("descriptors: coincident atoms " + std::to_string(i) + "/" +
                                  std::to_string(j));
        }
        dist(i, j) = dist(j, i) = r;
        disp[i * n + j] = d;
        disp[j * n + i] = -d;
      }
    }
  }
};

void eval_radial(const Structure& s, const PairTable& pairs, int center,
                 const SymmetryFunction& sf, double& value, Eigen::MatrixXd* grad, int row) {
  const int n = pairs.n;
  const double rc = sf.cutoff.r_c;
  for (int j = 0; j < n; ++j) {
    if (j == center || s.species[j] != sf.neighbor_a) continue;
    double r = pairs.dist(center, j);
    if (r > rc) continue;
    double fc = cutoff_value(r, sf.cutoff);
    double gauss = std::exp(-sf.eta * (r - sf.r_s) * (r - sf.r_s));
    value += gauss * fc;
    if (grad) {
      double dfc = cutoff_derivative(r, sf.cutoff);
      double dr = gauss * (-2.0 * sf.eta * (r - sf.r_s) * fc + dfc);
      Eigen::Vector3d g = dr * pairs.disp[center * n + j] / r;
      grad->block<1, 3>(row, 3 * j) += g.transpose();
      grad->block<1, 3>(row, 3 * center) -= g.transpose();
    }
  }
}

void eval_angular(const Structure& s, const PairTable& pairs, int center,
                  const SymmetryFunction& sf, double& value, Eigen::MatrixXd* grad, int row) {
  const int n = pairs.n;
  const double rc = sf.cutoff.r_c;
  const double pref = std::pow(2.0, 1.0 - sf.zeta) * 2.0;  // ordered pair sum = 2 * (j<k)

  for (int j = 0; j < n; ++j) {
    if (j == center) continue;
    double r1 = pairs.dist(center, j);
    if (r1 > rc) continue;
    for (int k = j + 1; k < n; ++k) {
      if (k == center) continue;
      bool match = (s.species[j] == sf.neighbor_a && s.species[k] == sf.neighbor_b) ||
                   (s.species[j] == sf.neighbor_b && s.species[k] == sf.neighbor_a);
      if (!match) continue;
      double r2 = pairs.dist(center, k);
      double r3 = pairs.dist(j, k);
      if (r2 > rc || r3 > rc) continue;

      const Eigen::Vector3d& u = pairs.disp[center * n + j];
      const Eigen::Vector3d& v = pairs.disp[center * n + k];
      const Eigen::Vector3d& w = pairs.disp[j * n + k];

      double c = std::clamp(u.dot(v) / (r1 * r2), -1.0, 1.0);
      double base = 1.0 + sf.lambda * c;
      double ang = base > 0.0 ? std::pow(base, sf.zeta) : 0.0;
      double gauss = std::exp(-sf.eta * (r1 * r1 + r2 * r2 + r3 * r3));
      double f1 = cutoff_value(r1, sf.cutoff);
      double f2 = cutoff_value(r2, sf.cutoff);
      double f3 = cutoff_value(r3, sf.cutoff);
      double fc = f1 * f2 * f3;
      value += pref * ang * gauss * fc;

      if (!grad) continue;

      // d(ang)/dc; the base == 0 point only occurs where ang vanishes
      double dang;
      if (base > 0.0) {
        dang = sf.lambda * sf.zeta * std::pow(base, sf.zeta - 1.0);
      } else {
        dang = (sf.zeta == 1.0) ? sf.lambda * sf.zeta : 0.0;
      }
      Eigen::Vector3d dc_du = (v / (r1 * r2) - c * u / (r1 * r1));
      Eigen::Vector3d dc_dv = (u / (r1 * r2) - c * v / (r2 * r2));

      double df1 = cutoff_derivative(r1, sf.cutoff);
      double df2 = cutoff_derivative(r2, sf.cutoff);
      double df3 = cutoff_derivative(r3, sf.cutoff);

      Eigen::Vector3d gu = pref * (dang * dc_du * gauss * fc +
                                   ang * (-2.0 * sf.eta) * gauss * u * fc +
                                   ang * gauss * df1 * (u / r1) * f2 * f3);
      Eigen::Vector3d gv = pref * (dang * dc_dv * gauss * fc +
                                   ang * (-2.0 * sf.eta) * gauss * v * fc +
                                   ang * gauss * f1 * df2 * (v / r2) * f3);
      Eigen::Vector3d gw = pref * (ang * (-2.0 * sf.eta) * gauss * w * fc +
                                   ang * gauss * f1 * f2 * df3 * (w / r3));

      grad->block<1, 3>(row, 3 * j) += (gu - gw).transpose();
      grad->block<1, 3>(row, 3 * k) += (gv + gw).transpose();
      grad->block<1, 3>(row, 3 * center) -= (gu + gv).transpose();
    }
  }
}

}  // namespace

void CutoffSpec::validate() const {
  if (!(r_c > 0.0)) throw std::invalid_argument("cutoff: r_c must be positive");
}

double cutoff_value(double r, const CutoffSpec& spec) {
  if (r > spec.r_c) return 0.0;
  double t = std::tanh(1.0 - r / spec.r_c);
  return t * t * t;
}

double cutoff_derivative(double r, const CutoffSpec& spec) {
  if (r > spec.r_c) return 0.0;
  double t = std::tanh(1.0 - r / spec.r_c);
  return -3.0 * t * t * (1.0 - t * t) / spec.r_c;
}

void SymmetryFunction::validate() const {
  cutoff.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("symmetry function: eta must be positive");
  if (kind == Kind::Radial) {
    if (r_s < 0.0 || r_s > cutoff.r_c) {
      throw std::invalid_argument("symmetry function: r_s outside [0, r_c]");
    }
    if (neighbor_a.empty()) throw std::invalid_argument("symmetry function: missing element");
  } else {
    if (lambda != 1 && lambda != -1) {
      throw std::invalid_argument("symmetry function: lambda must be +1 or -1");
    }
    if (!(zeta > 0.0)) throw std::invalid_argument("symmetry function: zeta must be positive");
    if (neighbor_a.empty() || neighbor_b.empty()) {
      throw std::invalid_argument("symmetry function: missing element pair");
    }
  }
}

const std::vector<SymmetryFunction>& DescriptorSet::functions_for(
    const std::string& element) const {
  auto it = functions.find(element);
  if (it == functions.end()) {
    throw std::invalid_argument("descriptor set: unknown element '" + element + "'");
  }
  return it->second;
}

int DescriptorSet::n_functions(const std::string& element) const {
  return static_cast<int>(functions_for(element).size());
}

int DescriptorSet::n_active(const std::string& element) const {
  auto it = stats.find(element);
  if (it == stats.end()) return n_functions(element);
  int n = 0;
  for (const auto& st : it->second) {
    if (!st.constant) ++n;
  }
  return n;
}

std::vector<std::string> DescriptorSet::elements() const {
  std::vector<std::string> out;
  for (const auto& [e, fns] : functions) out.push_back(e);
  return out;
}

void DescriptorSet::validate() const {
  if (functions.empty()) throw std::invalid_argument("descriptor set: empty");
  for (const auto& [e, fns] : functions) {
    if (fns.empty()) throw std::invalid_argument("descriptor set: no functions for " + e);
    for (const auto& f : fns) f.validate();
    auto it = stats.find(e);
    if (it != stats.end() && it->second.size() != fns.size()) {
      throw std::invalid_argument("descriptor set: stats size mismatch for " + e);
    }
  }
}

DescriptorOutput compute_descriptors(const Structure& s, const DescriptorSet& set, bool scaled,
                                     bool with_gradients) {
  s.validate();
  set.validate();
  if (scaled && !set.scaled()) {
    throw std::logic_error("descriptors: scaling requested but not fitted");
  }
  PairTable pairs(s);
  const int n = s.n_atoms();

  DescriptorOutput out;
  out.values.resize(n);
  if (with_gradients) out.gradients.resize(n);

  for (int i = 0; i < n; ++i) {
    const auto& fns = set.functions_for(s.species[i]);
    const std::vector<ScaleStats>* st = nullptr;
    if (scaled) st = &set.stats.at(s.species[i]);

    int n_out = scaled ? set.n_active(s.species[i]) : static_cast<int>(fns.size());
    out.values[i].setZero(n_out);
    Eigen::MatrixXd* grad = nullptr;
    if (with_gradients) {
      out.gradients[i].setZero(n_out, 3 * n);
      grad = &out.gradients[i];
    }

    int row = 0;
    for (std::size_t f = 0; f < fns.size(); ++f) {
      if (scaled && (*st)[f].constant) continue;
      double value = 0.0;
      if (fns[f].kind == SymmetryFunction::Kind::Radial) {
        eval_radial(s, pairs, i, fns[f], value, grad, row);
      } else {
        eval_angular(s, pairs, i, fns[f], value, grad, row);
      }
      if (scaled) {
        const auto& sc = (*st)[f];
        double range = sc.g_max - sc.g_min;
        value = (value - sc.g_mean) / range;
        if (grad) grad->row(row) /= range;
      }
      out.values[i][row] = value;
      ++row;
    }
  }
  return out;
}

std::vector<SymmetryFunction> generate_radial_params(int n, double r_c) {
  if (n < 2) throw std::invalid_argument("radial params: n must be >= 2");
  CutoffSpec cut{r_c};
  cut.validate();
  std::vector<SymmetryFunction> out;

  for (int m = 0; m <= n; ++m) {
    SymmetryFunction sf;
    sf.kind = SymmetryFunction::Kind::Radial;
    sf.cutoff = cut;
    sf.r_s = 0.0;
    double w = std::pow(static_cast<double>(n), static_cast<double>(m) / n) / r_c;
    sf.eta = w * w;
    out.push_back(sf);
  }

  auto shift = [&](int m) { return r_c / std::pow(static_cast<double>(n), static_cast<double>(m) / n); };
  for (int m = 0; m < n; ++m) {
    SymmetryFunction sf;
    sf.kind = SymmetryFunction::Kind::Radial;
    sf.cutoff = cut;
    sf.r_s = shift(m);
    double d = shift(n - m) - shift(n - m - 1);
    sf.eta = 1.0 / (d * d);
    out.push_back(sf);
  }
  return out;
}

std::vector<SymmetryFunction> generate_angular_params(int n_eta, const std::vector<double>& zetas,
                                                      double r_c) {
  if (zetas.empty()) throw std::invalid_argument("angular params: empty zeta list");
  std::set<double> uniq(zetas.begin(), zetas.end());
  if (uniq.size() != zetas.size()) {
    throw std::invalid_argument("angular params: duplicate zeta entries");
  }
  if (n_eta < 0) throw std::invalid_argument("angular params: n_eta must be >= 0");
  CutoffSpec cut{r_c};
  cut.validate();

  std::vector<SymmetryFunction> out;
  for (int m = 0; m <= n_eta; ++m) {
    double w = n_eta > 0
                   ? std::pow(static_cast<double>(n_eta), static_cast<double>(m) / n_eta) / r_c
                   : 1.0 / r_c;
    for (int lambda : {-1, 1}) {
      for (double zeta : zetas) {
        SymmetryFunction sf;
        sf.kind = SymmetryFunction::Kind::Angular;
        sf.cutoff = cut;
        sf.eta = w * w;
        sf.lambda = lambda;
        sf.zeta = zeta;
        out.push_back(sf);
      }
    }
  }
  return out;
}

DescriptorSet build_descriptor_set(const std::vector<std::string>& elements, int n_radial,
                                   int n_eta_angular, const std::vector<double>& zetas,
                                   double r_c) {
  if (elements.empty()) throw std::invalid_argument("descriptor set: no elements");
  std::vector<std::string> elems(elements);
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

  auto radial = generate_radial_params(n_radial, r_c);
  auto angular = generate_angular_params(n_eta_angular, zetas, r_c);

  DescriptorSet set;
  for (const auto& center : elems) {
    auto& fns = set.functions[center];
    for (const auto& nb : elems) {
      for (auto sf : radial) {
        sf.neighbor_a = nb;
        fns.push_back(sf);
      }
    }
    for (std::size_t a = 0; a < elems.size(); ++a) {
      for (std::size_t b = a; b < elems.size(); ++b) {
        for (auto sf : angular) {
          sf.neighbor_a = elems[a];
          sf.neighbor_b = elems[b];
          fns.push_back(sf);
        }
      }
    }
  }
  set.validate();
  return set;
}

DescriptorSet fit_scaling(const Dataset& data, const DescriptorSet& set) {
  if (data.empty()) throw std::invalid_argument("fit_scaling: empty dataset");
  set.validate();

  DescriptorSet out = set;
  out.stats.clear();

  std::map<std::string, std::vector<ScaleStats>> stats;
  std::map<std::string, long> counts;
  for (const auto& [e, fns] : set.functions) {
    stats[e].assign(fns.size(), ScaleStats{});
    counts[e] = 0;
  }

  for (const auto& s : data.structures) {
    DescriptorOutput d = compute_descriptors(s, set, /*scaled=*/false, /*with_gradients=*/false);
    for (int i = 0; i < s.n_atoms(); ++i) {
      auto& st = stats.at(s.species[i]);
      long& cnt = counts.at(s.species[i]);
      for (int f = 0; f < d.values[i].size(); ++f) {
        double g = d.values[i][f];
        if (cnt == 0) {
          st[f].g_min = st[f].g_max = g;
          st[f].g_mean = 0.0;
        } else {
          st[f].g_min = std::min(st[f].g_min, g);
          st[f].g_max = std::max(st[f].g_max, g);
        }
        st[f].g_mean += g;
      }
      ++cnt;
    }
  }

  for (auto& [e, st] : stats) {
    if (counts[e] == 0) {
      throw std::runtime_error("fit_scaling: element '" + e + "' absent from dataset");
    }
    for (auto& s : st) {
      s.g_mean /= counts[e];
      s.constant = range_is_constant(s.g_min, s.g_max);
    }
  }
  out.stats = std::move(stats);
  return out;
}

void DescriptorSet::save(std::ostream& out) const {
  validate();
  for (const auto& [e, fns] : functions) {
    for (const auto& f : fns) {
      if (f.kind == SymmetryFunction::Kind::Radial) {
        out << "G2 " << e << " " << f.neighbor_a << " " << fmt17(f.eta) << " " << fmt17(f.r_s)
            << " " << fmt17(f.cutoff.r_c) << "\n";
      } else {
        out << "G3 " << e << " " << f.neighbor_a << " " << f.neighbor_b << " " << fmt17(f.eta)
            << " " << f.lambda << " " << fmt17(f.zeta) << " " << fmt17(f.cutoff.r_c) << "\n";
      }
    }
  }
  if (!stats.empty()) {
    int index = 0;
    for (const auto& [e, fns] : functions) {
      const auto& st = stats.at(e);
      for (std::size_t f = 0; f < fns.size(); ++f) {
        out << "scale " << index++ << " " << fmt17(st[f].g_min) << " " << fmt17(st[f].g_max)
            << " " << fmt17(st[f].g_mean) << "\n";
      }
    }
  }
}

void DescriptorSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save(out);
}

DescriptorSet DescriptorSet::load(std::istream& in, const std::string& name) {
  DescriptorSet set;
  std::vector<std::pair<std::string, int>> order;  // (element, local index) per global line
  std::map<std::string, std::size_t> filled;
  std::string line;
  int lineno = 0;
  bool has_scale = false;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    auto fail = [&](const std::string& what) -> void {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + what);
    };
    if (key == "G2") {
      SymmetryFunction sf;
      sf.kind = SymmetryFunction::Kind::Radial;
      std::string center;
      if (!(ss >> center >> sf.neighbor_a >> sf.eta >> sf.r_s >> sf.cutoff.r_c)) {
        fail("malformed G2 line");
      }
      order.emplace_back(center, static_cast<int>(set.functions[center].size()));
      set.functions[center].push_back(sf);
    } else if (key == "G3") {
      SymmetryFunction sf;
      sf.kind = SymmetryFunction::Kind::Angular;
      std::string center;
      if (!(ss >> center >> sf.neighbor_a >> sf.neighbor_b >> sf.eta >> sf.lambda >> sf.zeta >>
            sf.cutoff.r_c)) {
        fail("malformed G3 line");
      }
      order.emplace_back(center, static_cast<int>(set.functions[center].size()));
      set.functions[center].push_back(sf);
    } else if (key == "scale") {
      int index;
      ScaleStats st;
      if (!(ss >> index >> st.g_min >> st.g_max >> st.g_mean)) fail("malformed scale line");
      if (index < 0 || index >= static_cast<int>(order.size())) fail("scale index out of range");
      const auto& [elem, local] = order[index];
      auto& sv = set.stats[elem];
      sv.resize(set.functions[elem].size());
      st.constant = range_is_constant(st.g_min, st.g_max);
      sv[local] = st;
      ++filled[elem];
      has_scale = true;
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }
  if (has_scale) {
    for (const auto& [e, fns] : set.functions) {
      if (filled[e] != fns.size()) {
        throw std::runtime_error(name + ": incomplete scaling statistics for element " + e);
      }
    }
  }
  set.validate();
  return set;
}

DescriptorSet DescriptorSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open descriptor file: " + path);
  return load(in, path);
}

}  // namespace qmlp
