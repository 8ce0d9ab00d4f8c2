#pragma once

#include <Eigen/Dense>
#include <fstream>
#include "json.hpp"
#include <optional>
#include <sstream>
#include <string>

#include "hkq/classify.hpp"
#include "hkq/curvature.hpp"
#include "hkq/error.hpp"
#include "hkq/liealg.hpp"
#include "hkq/moment.hpp"
#include "hkq/quotient.hpp"
#include "hkq/spec.hpp"

namespace hkq {

using json = nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::SpecInvalid, "theta must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw Error(ErrorCode::SpecInvalid, "ragged theta rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

/// Spec file: {s, k, q, theta: [[row]...], mode: "hyperkahler" | "flat2m", l?}.
struct SpecFile {
  HKGroupSpec spec;
  std::optional<LSpec> lspec;
};

inline json to_json(const HKGroupSpec& spec, const std::optional<LSpec>& lspec = std::nullopt) {
  json j;
  j["s"] = spec.s;
  j["k"] = spec.k;
  j["q"] = spec.q;
  j["theta"] = matrix_to_json(spec.theta);
  j["mode"] = spec.quaternionic() ? "hyperkahler" : "flat2m";
  if (lspec) j["l"] = lspec->l;
  return j;
}

inline SpecFile spec_from_json(const json& j) {
  try {
    SpecFile f;
    f.spec.s = j.at("s").get<int>();
    f.spec.k = j.at("k").get<int>();
    f.spec.q = j.at("q").get<int>();
    f.spec.theta = matrix_from_json(j.at("theta"));
    const std::string mode = j.value("mode", "hyperkahler");
    if (mode == "hyperkahler")
      f.spec.mode = FiberKind::Quaternionic;
    else if (mode == "flat2m")
      f.spec.mode = FiberKind::Complex2m;
    else
      throw Error(ErrorCode::SpecInvalid, "unknown mode '" + mode + "'");
    if (j.contains("l")) f.lspec = LSpec{j.at("l").get<int>()};
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecInvalid, e.what());
  }
}

inline SpecFile read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SpecInvalid, "cannot open spec file " + path);
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SpecInvalid, std::string("malformed JSON: ") + e.what());
  }
}

inline json to_json(const VerificationReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"residual", c.residual}, {"pass", c.pass}});
  return {{"pass", rep.pass()}, {"tolerance", rep.tolerance}, {"checks", checks}};
}

inline json to_json(const CurvatureReport& r) {
  json j{{"point", vector_to_json(r.point)},
         {"step", r.step},
         {"richardson", r.richardson},
         {"max_ricci", r.max_ricci},
         {"central_h", r.central_h},
         {"central_h2", r.central_h2},
         {"truncation_estimate", r.truncation_estimate}};
  if (r.max_riemann) j["max_riemann"] = *r.max_riemann;
  return j;
}

inline json to_json(const EquivalenceInvariants& inv) {
  return {{"s", inv.s}, {"k", inv.k}, {"q", inv.q}, {"row_norms", inv.row_norms}, {"gram_eigenvalues", inv.gram_eigen}};
}

inline json to_json(const MonomialVerdict& v) {
  json j{{"equivalent", v.equivalent},
         {"invariants1", to_json(v.invariants1)},
         {"invariants2", to_json(v.invariants2)},
         {"invariants_differ", v.invariants_differ},
         {"degenerate_spectrum", v.degenerate_spectrum}};
  if (v.witness)
    j["witness"] = {{"permutation", v.witness->perm},
                    {"signs", v.witness->signs},
                    {"A", matrix_to_json(v.witness->a)},
                    {"residual", v.witness->residual}};
  return j;
}

/// Packed lower triangle g_00, g_10, g_11, g_20, ...
inline std::vector<double> packed_lower(const Eigen::MatrixXd& g) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) out.push_back(g(i, j));
  return out;
}

inline std::vector<std::string> packed_lower_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) out.push_back("g_" + std::to_string(i) + std::to_string(j));
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << (v == 0.0 ? 0.0 : v);  // no "-0" in tables
  return os.str();
}

}  // namespace hkq
