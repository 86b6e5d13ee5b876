#include "qmlp/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qmlp/metrics.hpp"

namespace qmlp {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

MlpArchitecture MlpArchitecture::for_descriptors(const DescriptorSet& set,
                                                 std::vector<int> hidden) {
  MlpArchitecture arch;
  arch.hidden = std::move(hidden);
  for (const auto& e : set.elements()) arch.input_width[e] = set.n_active(e);
  arch.validate();
  return arch;
}

void MlpArchitecture::validate() const {
  if (input_width.empty()) throw std::invalid_argument("architecture: no elements");
  for (const auto& [e, w] : input_width) {
    if (w < 1) throw std::invalid_argument("architecture: input width must be >= 1 for " + e);
  }
  if (hidden.empty()) throw std::invalid_argument("architecture: need at least one hidden layer");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("architecture: hidden width must be >= 1");
  }
  if (activation != "tanh") {
    throw std::invalid_argument("architecture: unsupported activation '" + activation + "'");
  }
}

long MlpModel::n_params() const {
  long n = 0;
  for (const auto& [e, net] : nets) n += net.n_params();
  return n;
}

long MlpModel::param_offset(const std::string& element) const {
  long off = 0;
  for (const auto& [e, net] : nets) {
    if (e == element) return off;
    off += net.n_params();
  }
  throw std::invalid_argument("model: unknown element '" + element + "'");
}

Eigen::VectorXd MlpModel::to_flat() const {
  Eigen::VectorXd flat(n_params());
  long pos = 0;
  for (const auto& [e, net] : nets) {
    flat.segment(pos, net.n_params()) = net.to_flat();
    pos += net.n_params();
  }
  return flat;
}

void MlpModel::from_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != n_params()) throw std::invalid_argument("model: flat size mismatch");
  long pos = 0;
  for (auto& [e, net] : nets) {
    net.from_flat(flat.segment(pos, net.n_params()));
    pos += net.n_params();
  }
}

void MlpModel::validate() const {
  arch.validate();
  descriptors.validate();
  norm.validate();
  if (!descriptors.scaled()) throw std::invalid_argument("model: descriptor scaling missing");
  for (const auto& [e, w] : arch.input_width) {
    auto it = nets.find(e);
    if (it == nets.end()) throw std::invalid_argument("model: missing network for " + e);
    it->second.validate();
    if (it->second.input_width() != w) {
      throw std::invalid_argument("model: network width mismatch for " + e);
    }
    if (w != descriptors.n_active(e)) {
      throw std::invalid_argument("model: descriptor count mismatch for " + e);
    }
  }
}

MlpModel init_model(const MlpArchitecture& arch, const DescriptorSet& descriptors,
                    const NormParams& norm, std::uint64_t seed) {
  arch.validate();
  if (!descriptors.scaled()) {
    throw std::invalid_argument("init_model: descriptor scaling not fitted");
  }
  MlpModel model;
  model.arch = arch;
  model.descriptors = descriptors;
  model.norm = norm;
  Rng rng(seed);
  for (const auto& [e, w] : arch.input_width) {
    if (w != descriptors.n_active(e)) {
      throw std::invalid_argument("init_model: input width " + std::to_string(w) +
                                  " != active descriptor count for " + e);
    }
    std::vector<int> widths;
    widths.push_back(w);
    for (int h : arch.hidden) widths.push_back(h);
    widths.push_back(1);
    model.nets.emplace(e, FeedForward::init(widths, rng));
  }
  model.validate();
  return model;
}

double predict_energy(const MlpModel& model, const Structure& s,
                      std::vector<double>* per_atom) {
  DescriptorOutput d = compute_descriptors(s, model.descriptors, true, false);
  const double sigma_e = model.norm.sigma_energy();
  double estar = 0.0;
  if (per_atom) per_atom->assign(s.n_atoms(), 0.0);
  for (int i = 0; i < s.n_atoms(); ++i) {
    auto it = model.nets.find(s.species[i]);
    if (it == model.nets.end()) {
      throw std::invalid_argument("predict: unknown element '" + s.species[i] + "'");
    }
    double ei = it->second.forward(d.values[i]);
    estar += ei;
    if (per_atom) (*per_atom)[i] = sigma_e * ei + model.norm.mean_energy;
  }
  return sigma_e * estar + s.n_atoms() * model.norm.mean_energy;
}

std::vector<Eigen::Vector3d> predict_forces(const MlpModel& model, const Structure& s) {
  DescriptorOutput d = compute_descriptors(s, model.descriptors, true, true);
  const double sigma_e = model.norm.sigma_energy();
  Eigen::VectorXd force = Eigen::VectorXd::Zero(3 * s.n_atoms());
  FeedForward::Trace trace;
  for (int i = 0; i < s.n_atoms(); ++i) {
    auto it = model.nets.find(s.species[i]);
    if (it == model.nets.end()) {
      throw std::invalid_argument("predict: unknown element '" + s.species[i] + "'");
    }
    it->second.forward(d.values[i], trace);
    Eigen::VectorXd g = it->second.input_gradient(trace);
    force.noalias() -= sigma_e * (d.gradients[i].transpose() * g);
  }
  std::vector<Eigen::Vector3d> out(s.n_atoms());
  for (int a = 0; a < s.n_atoms(); ++a) out[a] = force.segment<3>(3 * a);
  return out;
}

LossResult loss_and_gradients(const MlpModel& model, const Dataset& batch,
                              const std::vector<int>& indices, double beta) {
  if (beta < 0.0) throw std::invalid_argument("loss: beta must be >= 0");
  if (indices.empty()) throw std::invalid_argument("loss: empty batch");
  const double inv_cl = 1.0 / model.norm.conv_length;
  const double ce = model.norm.conv_energy;
  const double cf = model.norm.conv_energy / model.norm.conv_length;
  const int m = static_cast<int>(indices.size());

  LossResult result;
  result.gradient = Eigen::VectorXd::Zero(model.n_params());
  FeedForward::Trace trace;

  for (int idx : indices) {
    const Structure& s = batch.structures[idx];
    if (!s.energy) throw std::invalid_argument("loss: structure without energy label");
    if (beta > 0.0 && !s.forces) {
      throw std::invalid_argument("loss: beta > 0 requires force labels");
    }
    DescriptorOutput d = compute_descriptors(s, model.descriptors, true, beta > 0.0);

    // normalized energy residual
    double estar_ref = (*s.energy - s.n_atoms() * model.norm.mean_energy) * ce;
    double estar = 0.0;
    std::vector<FeedForward::Trace> traces(s.n_atoms());
    std::vector<Eigen::VectorXd> input_grads(beta > 0.0 ? s.n_atoms() : 0);
    for (int i = 0; i < s.n_atoms(); ++i) {
      const FeedForward& net = model.nets.at(s.species[i]);
      estar += net.forward(d.values[i], traces[i]);
      if (beta > 0.0) input_grads[i] = net.input_gradient(traces[i]);
    }
    double de = estar - estar_ref;
    result.energy_term += de * de / m;
    for (int i = 0; i < s.n_atoms(); ++i) {
      const FeedForward& net = model.nets.at(s.species[i]);
      net.accumulate_gradient(traces[i], 2.0 * de / m, result.gradient,
                              model.param_offset(s.species[i]));
    }

    if (beta > 0.0) {
      const int n3 = 3 * s.n_atoms();
      // normalized predicted force: F* = -(1/conv_length) sum_i What_i^T g_i
      Eigen::VectorXd fstar = Eigen::VectorXd::Zero(n3);
      for (int i = 0; i < s.n_atoms(); ++i) {
        fstar.noalias() -= inv_cl * (d.gradients[i].transpose() * input_grads[i]);
      }
      Eigen::VectorXd fstar_ref(n3);
      for (int a = 0; a < s.n_atoms(); ++a) {
        fstar_ref.segment<3>(3 * a) = cf * (*s.forces)[a];
      }
      Eigen::VectorXd df = fstar - fstar_ref;
      result.force_term += beta * df.squaredNorm() / (n3 * m);

      // per-atom tangent folds all constants: v_i = -(2 beta)/(n3 m cl) What_i df
      for (int i = 0; i < s.n_atoms(); ++i) {
        Eigen::VectorXd tangent = d.gradients[i] * df;
        tangent *= -2.0 * beta * inv_cl / (n3 * m);
        const FeedForward& net = model.nets.at(s.species[i]);
        net.accumulate_directional_gradient(traces[i], tangent, 1.0, result.gradient,
                                            model.param_offset(s.species[i]));
      }
    }
  }
  result.loss = result.energy_term + result.force_term;
  if (!std::isfinite(result.loss) || !result.gradient.allFinite()) {
    throw std::runtime_error("loss: non-finite loss or gradient");
  }
  return result;
}

LossResult loss_and_gradients(const MlpModel& model, const Dataset& batch, double beta) {
  std::vector<int> idx(batch.size());
  for (int i = 0; i < batch.size(); ++i) idx[i] = i;
  return loss_and_gradients(model, batch, idx, beta);
}

Dataset predict_dataset(const MlpModel& model, const Dataset& data, bool with_forces) {
  Dataset out = data;
  for (auto& s : out.structures) {
    s.energy = predict_energy(model, s);
    if (with_forces) {
      s.forces = predict_forces(model, s);
    } else {
      s.forces.reset();
    }
  }
  return out;
}

EvalResult evaluate(const MlpModel& model, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (!data.all_have_energy()) throw std::invalid_argument("evaluate: missing energy labels");
  const bool forces = data.all_have_forces();
  Dataset pred = predict_dataset(model, data, forces);
  EvalResult r;
  r.rmse_energy = rmse_energy(pred, data);
  if (forces) r.rmse_forces = rmse_forces(pred, data);
  return r;
}

void MlpModel::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "qmlp_model 1\n";
  out << "elements";
  for (const auto& [e, net] : nets) out << " " << e;
  out << "\n";
  out << "hidden";
  for (int h : arch.hidden) out << " " << h;
  out << "\n";
  out << "activation " << arch.activation << "\n";
  out << "norm " << fmt17(norm.mean_energy) << " " << fmt17(norm.conv_energy) << " "
      << fmt17(norm.conv_length) << " " << (norm.has_forces ? 1 : 0) << "\n";
  out << "descriptors_begin\n";
  descriptors.save(out);
  out << "descriptors_end\n";
  Eigen::VectorXd flat = to_flat();
  out << "params " << flat.size() << "\n";
  for (long i = 0; i < flat.size(); ++i) out << fmt17(flat(i)) << "\n";
}

MlpModel MlpModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string line, key;

  auto next = [&](const std::string& expect) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated model file");
    std::istringstream ss(line);
    ss >> key;
    if (key != expect) {
      throw std::runtime_error(path + ": expected '" + expect + "', got '" + key + "'");
    }
    return std::istringstream(line.substr(key.size()));
  };

  next("qmlp_model");
  auto ss = next("elements");
  std::vector<std::string> elems;
  std::string e;
  while (ss >> e) elems.push_back(e);

  ss = next("hidden");
  std::vector<int> hidden;
  int h;
  while (ss >> h) hidden.push_back(h);

  ss = next("activation");
  std::string act;
  ss >> act;

  ss = next("norm");
  NormParams norm;
  int hf = 0;
  ss >> norm.mean_energy >> norm.conv_energy >> norm.conv_length >> hf;
  norm.has_forces = hf != 0;

  next("descriptors_begin");
  std::ostringstream body;
  while (std::getline(in, line)) {
    if (line == "descriptors_end") break;
    body << line << "\n";
  }
  std::istringstream dstream(body.str());
  DescriptorSet descriptors = DescriptorSet::load(dstream, path + " (descriptors)");

  ss = next("params");
  long n = 0;
  ss >> n;
  Eigen::VectorXd flat(n);
  for (long i = 0; i < n; ++i) {
    if (!(in >> flat(i))) throw std::runtime_error(path + ": truncated parameter array");
  }

  MlpArchitecture arch;
  arch.hidden = hidden;
  arch.activation = act;
  for (const auto& el : elems) arch.input_width[el] = descriptors.n_active(el);

  MlpModel model = init_model(arch, descriptors, norm, 0);
  model.from_flat(flat);
  model.validate();
  return model;
}

}  // namespace qmlp
