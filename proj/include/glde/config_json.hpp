#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "glde/system.hpp"

namespace glde {

using json = nlohmann::json;

namespace detail {

inline double config_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw config_error(what + ": expected a number");
  return j.get<double>();
}

inline Eigen::MatrixXd config_matrix(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
    throw config_error(what + ": expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw config_error(what + ": row " + std::to_string(r) + " must have " + std::to_string(n) +
                         " entries");
    for (Eigen::Index c = 0; c < n; ++c)
      M(r, c) = config_number(row[c], what + "[" + std::to_string(r) + "]");
  }
  return M;
}

inline Eigen::VectorXd config_vector(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
    throw config_error(what + ": expected " + std::to_string(n) + " entries");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = config_number(j[i], what);
  return v;
}

inline std::vector<double> config_breakpoints(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() < 2) throw config_error(what + ": need at least two breakpoints");
  std::vector<double> bp;
  for (const auto& x : j) bp.push_back(config_number(x, what));
  return bp;
}

inline json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace detail

// Parsed building blocks of a system. Kept separate from GLDESystem so the
// invertibility check can be reported instead of thrown.
struct ParsedConfig {
  Eigen::Index dimension;
  double period;
  BVMatrixFunction A;
  std::optional<RegulatedVectorFunction> f;
};

inline ParsedConfig parse_config(const json& root) {
  if (!root.is_object()) throw config_error("config root must be an object");
  if (!root.contains("dimension") || !root["dimension"].is_number_integer())
    throw config_error("config needs an integer \"dimension\"");
  Eigen::Index n = root["dimension"].get<Eigen::Index>();
  if (n < 1) throw config_error("\"dimension\" must be positive");
  if (!root.contains("period")) throw config_error("config needs a \"period\"");
  double omega = detail::config_number(root["period"], "period");
  if (!(omega > 0.0)) throw config_error("\"period\" must be positive");

  if (!root.contains("A") || !root["A"].is_object())
    throw config_error("config needs an object \"A\"");
  const json& jA = root["A"];
  if (!jA.contains("density") || !jA["density"].is_object())
    throw config_error("A needs an object \"density\"");
  const json& jd = jA["density"];
  if (!jd.contains("breakpoints") || !jd.contains("cells"))
    throw config_error("A.density needs \"breakpoints\" and \"cells\"");
  auto bp = detail::config_breakpoints(jd["breakpoints"], "A.density.breakpoints");
  const json& jcells = jd["cells"];
  if (!jcells.is_array() || jcells.size() + 1 != bp.size())
    throw config_error("A.density.cells must hold one entry per breakpoint interval");
  std::vector<std::vector<Eigen::MatrixXd>> cells;
  for (std::size_t j = 0; j < jcells.size(); ++j) {
    const json& jc = jcells[j];
    if (!jc.is_array() || jc.empty())
      throw config_error("A.density.cells[" + std::to_string(j) +
                         "] must be a nonempty coefficient list");
    std::vector<Eigen::MatrixXd> c;
    for (std::size_t k = 0; k < jc.size(); ++k)
      c.push_back(detail::config_matrix(
          jc[k], n, "A.density.cells[" + std::to_string(j) + "][" + std::to_string(k) + "]"));
    cells.push_back(std::move(c));
  }
  std::vector<MatrixJump> jumpsA;
  if (jA.contains("jumps")) {
    if (!jA["jumps"].is_array()) throw config_error("A.jumps must be an array");
    for (std::size_t j = 0; j < jA["jumps"].size(); ++j) {
      const json& je = jA["jumps"][j];
      std::string what = "A.jumps[" + std::to_string(j) + "]";
      if (!je.is_object() || !je.contains("time") || !je.contains("pre") || !je.contains("post"))
        throw config_error(what + " needs \"time\", \"pre\", \"post\"");
      jumpsA.push_back({detail::config_number(je["time"], what + ".time"),
                        detail::config_matrix(je["pre"], n, what + ".pre"),
                        detail::config_matrix(je["post"], n, what + ".post")});
    }
  }

  std::optional<RegulatedVectorFunction> f;
  if (root.contains("f")) {
    const json& jf = root["f"];
    if (!jf.is_object() || !jf.contains("density") || !jf["density"].is_object())
      throw config_error("f needs an object \"density\"");
    const json& jfd = jf["density"];
    if (!jfd.contains("breakpoints") || !jfd.contains("cells"))
      throw config_error("f.density needs \"breakpoints\" and \"cells\"");
    auto fbp = detail::config_breakpoints(jfd["breakpoints"], "f.density.breakpoints");
    const json& jfc = jfd["cells"];
    if (!jfc.is_array() || jfc.size() + 1 != fbp.size())
      throw config_error("f.density.cells must hold one entry per breakpoint interval");
    std::vector<std::vector<Eigen::VectorXd>> fcells;
    for (std::size_t j = 0; j < jfc.size(); ++j) {
      const json& jc = jfc[j];
      if (!jc.is_array() || jc.empty())
        throw config_error("f.density.cells[" + std::to_string(j) +
                           "] must be a nonempty coefficient list");
      std::vector<Eigen::VectorXd> c;
      for (std::size_t k = 0; k < jc.size(); ++k)
        c.push_back(detail::config_vector(
            jc[k], n, "f.density.cells[" + std::to_string(j) + "][" + std::to_string(k) + "]"));
      fcells.push_back(std::move(c));
    }
    std::vector<VectorJump> jumpsF;
    if (jf.contains("jumps")) {
      if (!jf["jumps"].is_array()) throw config_error("f.jumps must be an array");
      for (std::size_t j = 0; j < jf["jumps"].size(); ++j) {
        const json& je = jf["jumps"][j];
        std::string what = "f.jumps[" + std::to_string(j) + "]";
        if (!je.is_object() || !je.contains("time") || !je.contains("pre") || !je.contains("post"))
          throw config_error(what + " needs \"time\", \"pre\", \"post\"");
        jumpsF.push_back({detail::config_number(je["time"], what + ".time"),
                          detail::config_vector(je["pre"], n, what + ".pre"),
                          detail::config_vector(je["post"], n, what + ".post")});
      }
    }
    Eigen::VectorXd base = Eigen::VectorXd::Zero(n);
    if (jf.contains("base")) base = detail::config_vector(jf["base"], n, "f.base");
    try {
      f.emplace(PiecewisePoly<Eigen::VectorXd>(std::move(fbp), std::move(fcells)),
                std::move(jumpsF), std::move(base));
    } catch (const std::invalid_argument& e) {
      throw config_error(std::string("invalid \"f\": ") + e.what());
    }
  }

  std::optional<BVMatrixFunction> A;
  try {
    A.emplace(PiecewisePoly<Eigen::MatrixXd>(std::move(bp), std::move(cells)), std::move(jumpsA));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid \"A\": ") + e.what());
  }
  if (std::abs(A->period() - omega) > 1e-10 * omega)
    throw config_error("A.density must span exactly [0, period]");
  if (f && std::abs(f->period() - omega) > 1e-10 * omega)
    throw config_error("f.density must span exactly [0, period]");
  return ParsedConfig{n, omega, std::move(*A), std::move(f)};
}

inline ParsedConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("JSON parse failure: ") + e.what());
  }
  return parse_config(root);
}

inline ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline GLDESystem make_system(ParsedConfig cfg, double epsH = 1e-12) {
  return GLDESystem(std::move(cfg.A), std::move(cfg.f), epsH);
}

inline json config_json(const BVMatrixFunction& A, const RegulatedVectorFunction* f = nullptr) {
  json root;
  root["dimension"] = static_cast<long long>(A.rows());
  root["period"] = A.period();
  json jd;
  jd["breakpoints"] = A.density().breakpoints();
  json jcells = json::array();
  for (std::size_t j = 0; j < A.density().cellCount(); ++j) {
    json c = json::array();
    for (const auto& M : A.density().coeffs(j)) c.push_back(detail::matrix_json(M));
    jcells.push_back(std::move(c));
  }
  jd["cells"] = std::move(jcells);
  json jA;
  jA["density"] = std::move(jd);
  json jj = json::array();
  for (const auto& ev : A.jumps()) {
    json e;
    e["time"] = ev.time;
    e["pre"] = detail::matrix_json(ev.pre);
    e["post"] = detail::matrix_json(ev.post);
    jj.push_back(std::move(e));
  }
  jA["jumps"] = std::move(jj);
  root["A"] = std::move(jA);
  if (f) {
    json jfd;
    jfd["breakpoints"] = f->density().breakpoints();
    json fc = json::array();
    for (std::size_t j = 0; j < f->density().cellCount(); ++j) {
      json c = json::array();
      for (const auto& v : f->density().coeffs(j)) c.push_back(detail::vector_json(v));
      fc.push_back(std::move(c));
    }
    jfd["cells"] = std::move(fc);
    json jf;
    jf["density"] = std::move(jfd);
    json fj = json::array();
    for (const auto& ev : f->jumps()) {
      json e;
      e["time"] = ev.time;
      e["pre"] = detail::vector_json(ev.pre);
      e["post"] = detail::vector_json(ev.post);
      fj.push_back(std::move(e));
    }
    jf["jumps"] = std::move(fj);
    jf["base"] = detail::vector_json(f->baseValue());
    root["f"] = std::move(jf);
  }
  return root;
}

inline json config_json(const GLDESystem& sys) {
  return config_json(sys.A(), sys.hasForcing() ? &sys.f() : nullptr);
}

namespace detail {

inline void canonical_write(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        canonical_write(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        canonical_write(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

// Deterministic serialization: object keys in sorted order (nlohmann objects
// already iterate sorted) and floats printed with 17 significant digits so
// doubles round-trip exactly.
inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::canonical_write(j, out);
  return out;
}

}  // namespace glde
