#include "qmlp/structure_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qmlp {

namespace {

constexpr const char* kNoForcesToken = "no_forces";

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

double to_double(const std::string& s, const std::string& name, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_fail(name, line, "expected a number, got '" + s + "'");
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset parse_structures(std::istream& in, const std::string& name) {
  Dataset data;
  std::string line;
  int lineno = 0;
  bool in_block = false;
  Structure cur;

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0][0] == '#') {
      if (in_block) parse_fail(name, lineno, "'#' comment inside begin/end block");
      continue;
    }
    const std::string& key = toks[0];

    if (key == "begin") {
      if (in_block) parse_fail(name, lineno, "nested 'begin'");
      in_block = true;
      cur = Structure{};
      cur.forces.emplace();
    } else if (!in_block) {
      parse_fail(name, lineno, "'" + key + "' outside begin/end block");
    } else if (key == "comment") {
      auto pos = line.find("comment");
      std::string text = line.substr(pos + 7);
      if (!text.empty() && text[0] == ' ') text = text.substr(1);
      if (!cur.comment.empty()) cur.comment += "\n";
      cur.comment += text;
    } else if (key == "atom") {
      if (toks.size() != 10) {
        parse_fail(name, lineno,
                   "'atom' line must have 10 fields, got " + std::to_string(toks.size()));
      }
      Eigen::Vector3d r(to_double(toks[1], name, lineno), to_double(toks[2], name, lineno),
                        to_double(toks[3], name, lineno));
      // fields 5,6 (per-atom charge and an unused tag) are parsed and ignored
      to_double(toks[5], name, lineno);
      to_double(toks[6], name, lineno);
      Eigen::Vector3d f(to_double(toks[7], name, lineno), to_double(toks[8], name, lineno),
                        to_double(toks[9], name, lineno));
      cur.positions.push_back(r);
      cur.species.push_back(toks[4]);
      cur.forces->push_back(f);
    } else if (key == "energy") {
      if (toks.size() != 2) parse_fail(name, lineno, "'energy' line must have 2 fields");
      cur.energy = to_double(toks[1], name, lineno);
    } else if (key == "charge") {
      if (toks.size() != 2) parse_fail(name, lineno, "'charge' line must have 2 fields");
      to_double(toks[1], name, lineno);
    } else if (key == "end") {
      in_block = false;
      // reserved trailing token marks force columns as placeholders
      auto tpos = cur.comment.rfind(kNoForcesToken);
      if (tpos != std::string::npos && tpos + std::string(kNoForcesToken).size() == cur.comment.size() &&
          (tpos == 0 || cur.comment[tpos - 1] == ' ')) {
        cur.forces.reset();
        cur.comment = cur.comment.substr(0, tpos == 0 ? 0 : tpos - 1);
      }
      try {
        cur.validate();
      } catch (const std::exception& e) {
        parse_fail(name, lineno, e.what());
      }
      data.structures.push_back(std::move(cur));
    } else {
      parse_fail(name, lineno, "unknown keyword '" + key + "'");
    }
  }
  if (in_block) parse_fail(name, lineno, "unterminated block ('end' missing)");
  return data;
}

Dataset parse_structures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open structure file: " + path);
  return parse_structures(in, path);
}

void write_structures(const Dataset& data, std::ostream& out) {
  data.validate();
  for (const auto& s : data.structures) {
    out << "begin\n";
    std::string comment = s.comment;
    if (!s.forces) {
      if (!comment.empty()) comment += " ";
      comment += kNoForcesToken;
    }
    if (!comment.empty()) {
      std::istringstream cs(comment);
      std::string cline;
      while (std::getline(cs, cline)) out << "comment " << cline << "\n";
    }
    for (int i = 0; i < s.n_atoms(); ++i) {
      const auto& r = s.positions[i];
      Eigen::Vector3d f = s.forces ? (*s.forces)[i] : Eigen::Vector3d::Zero();
      out << "atom " << fmt17(r.x()) << " " << fmt17(r.y()) << " " << fmt17(r.z()) << " "
          << s.species[i] << " 0.0 0.0 " << fmt17(f.x()) << " " << fmt17(f.y()) << " "
          << fmt17(f.z()) << "\n";
    }
    if (s.energy) out << "energy " << fmt17(*s.energy) << "\n";
    out << "charge 0.0\n";
    out << "end\n";
  }
}

void write_structures(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_structures(data, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qmlp
