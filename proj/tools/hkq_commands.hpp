#pragma once

// Subcommands of the hkq tool. run() takes the argument list without the
// program name and writes JSON to `out`, a short summary to `err`.
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hkq/hkq.hpp"

namespace hkq::cli {

enum Exit : int { kPass = 0, kCheckFailed = 1, kBadInput = 2 };

inline std::vector<double> parse_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SpecInvalid, "not a number: '" + tok + "'");
    }
  }
  return out;
}

/// Rows separated by ';', entries by ',' or spaces.
inline Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string row;
  while (std::getline(in, row, ';'))
    if (!parse_list(row).empty()) rows.push_back(parse_list(row));
  if (rows.empty()) throw Error(ErrorCode::SpecInvalid, "empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(ErrorCode::SpecInvalid, "ragged matrix '" + text + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Preset make_preset(const std::string& name, const std::string& theta, int m) {
  if (name == "taub-nut") {
    const std::vector<double> t = theta.empty() ? std::vector<double>{1.0} : parse_list(theta);
    if (t.size() != 1) throw Error(ErrorCode::SpecInvalid, "taub-nut takes a single theta");
    return taub_nut(t[0]);
  }
  if (name == "taubian-calabi") {
    if (theta.empty()) return taubian_calabi(m);
    return taubian_calabi(to_vector(parse_list(theta)));
  }
  if (name == "lwy") return lwy(theta.empty() ? Eigen::MatrixXd::Identity(m, m) : parse_matrix(theta));
  throw Error(ErrorCode::SpecInvalid, "unknown preset '" + name + "' (taub-nut, taubian-calabi, lwy)");
}

/// Where the spec comes from: a JSON file or a named preset.
struct Source {
  std::string spec_path;
  std::string preset;
  std::string theta;
  int m = 2;
  int l = -1;

  void attach(CLI::App* cmd) {
    auto* spec = cmd->add_option("--spec", spec_path, "spec JSON file");
    auto* pre = cmd->add_option("--preset", preset, "taub-nut | taubian-calabi | lwy");
    spec->excludes(pre);
    cmd->add_option("--theta", theta, "preset theta: scalar, list, or rows 'a,b;c,d'");
    cmd->add_option("--m", m, "preset size when --theta is omitted")->check(CLI::PositiveNumber);
    cmd->add_option("--l", l, "rank of L (overrides the spec file)")->check(CLI::NonNegativeNumber);
  }

  Preset resolve() const {
    Preset p;
    if (!preset.empty()) {
      p = make_preset(preset, theta, m);
    } else if (!spec_path.empty()) {
      const SpecFile f = read_spec_file(spec_path);
      p.name = spec_path;
      p.spec = f.spec;
      p.lspec = f.lspec.value_or(LSpec{1});
    } else {
      throw Error(ErrorCode::SpecInvalid, "need --spec FILE or --preset NAME");
    }
    if (l >= 0) p.lspec.l = l;
    return p;
  }
};

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct VerifyCmd {
  Source src;
  double tol = kAlgebraTol;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = src.resolve();
    json j{{"command", "verify"}, {"spec", to_json(p.spec)}};
    bool pass = false;
    if (p.spec.quaternionic()) {
      const VerificationReport rep = verify_hyperkahler(p.spec, tol);
      j["report"] = to_json(rep);
      pass = rep.pass();
      err << "verify: hyper-Kaehler axioms " << (pass ? "pass" : "FAIL") << " (tolerance " << rep.tolerance << ")\n";
    } else {
      validate(p.spec);
      const KahlerFlatResult res = kahler_structure_flat(p.spec, tol);
      j["report"] = to_json(res.report);
      j["complex_structure"] = matrix_to_json(res.j);
      pass = res.report.pass();
      err << "verify: Kaehler flat structure " << (pass ? "pass" : "FAIL") << '\n';
    }
    j["pass"] = pass;
    emit(out, j);
    return pass ? kPass : kCheckFailed;
  }
};

struct MomentCmd {
  Source src;
  std::string point;
  int samples = 10;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  double invariance_tol = 1e-10;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = src.resolve();
    validate(p.spec, p.lspec);
    const int n = p.spec.base_dim() + 4 * p.spec.q;
    Rng rng(seed);
    std::vector<GroupElement> pts;
    if (!point.empty()) {
      const std::vector<double> c = parse_list(point);
      if (static_cast<int>(c.size()) != n)
        throw Error(ErrorCode::ShapeMismatch, "--point needs " + std::to_string(n) + " values (X then W)");
      pts.push_back(GroupElement::from_coords(p.spec, to_vector(c)));
    } else {
      for (int s = 0; s < samples; ++s) pts.push_back({rng.normal_vector(p.spec.base_dim()), rng.qvector(p.spec.q)});
    }
    double max_abs = 0, max_comp = 0, max_inv = 0;
    json rows = json::array();
    for (const auto& g : pts) {
      const MomentValue mu = moment(p.spec, p.lspec, g);
      const double abs_res = (mu - moment_abstract(p.spec, p.lspec, g)).cwiseAbs().maxCoeff();
      const Eigen::VectorXd t = rng.normal_vector(p.lspec.l);
      const Vec3<double> comp = moment_components(p.spec, p.lspec, g, t);
      const Eigen::RowVector3d contracted = t.transpose() * mu;
      double comp_res = 0;
      for (int c = 0; c < 3; ++c) comp_res = std::max(comp_res, std::abs(comp[c] - contracted(c)));
      const double inv_res = check_invariance(p.spec, p.lspec, g, rng.normal_vector(p.lspec.l));
      max_abs = std::max(max_abs, abs_res);
      max_comp = std::max(max_comp, comp_res);
      max_inv = std::max(max_inv, inv_res);
      rows.push_back({{"point", vector_to_json(g.coords())},
                      {"moment", matrix_to_json(mu)},
                      {"abstract_residual", abs_res},
                      {"components_residual", comp_res},
                      {"invariance_residual", inv_res}});
    }
    const bool pass = std::max(max_abs, max_comp) <= tol && max_inv <= invariance_tol;
    emit(out, {{"command", "moment"},
               {"spec", to_json(p.spec, p.lspec)},
               {"points", rows},
               {"max_abstract_residual", max_abs},
               {"max_components_residual", max_comp},
               {"max_invariance_residual", max_inv},
               {"pass", pass}});
    err << "moment: " << pts.size() << " point(s), form residual " << std::max(max_abs, max_comp)
        << ", invariance residual " << max_inv << (pass ? " pass" : " FAIL") << '\n';
    return pass ? kPass : kCheckFailed;
  }
};

/// One grid axis: "name=lo:hi:n" or "name=lo:hi:n:log"; name may be an index.
struct GridAxis {
  int coord = 0;
  std::vector<double> values;
};

inline GridAxis parse_axis(const std::string& text, const std::vector<std::string>& names) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::SpecInvalid, "grid axis needs name=lo:hi:n, got '" + text + "'");
  const std::string name = text.substr(0, eq);
  GridAxis ax;
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) {
    ax.coord = static_cast<int>(it - names.begin());
  } else {
    try {
      ax.coord = std::stoi(name);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SpecInvalid, "unknown coordinate '" + name + "'");
    }
    if (ax.coord < 0 || ax.coord >= static_cast<int>(names.size()))
      throw Error(ErrorCode::SpecInvalid, "coordinate index out of range in '" + text + "'");
  }
  std::vector<std::string> parts;
  std::istringstream in(text.substr(eq + 1));
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log"))
    throw Error(ErrorCode::SpecInvalid, "grid axis needs lo:hi:n[:log], got '" + text + "'");
  const double lo = parse_list(parts[0]).at(0), hi = parse_list(parts[1]).at(0);
  const int n = static_cast<int>(parse_list(parts[2]).at(0));
  const bool log = parts.size() == 4;
  if (n < 1 || (log && (lo <= 0 || hi <= 0))) throw Error(ErrorCode::SpecInvalid, "bad grid axis '" + text + "'");
  for (int i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    ax.values.push_back(log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return ax;
}

struct MetricCmd {
  Source src;
  std::string chart = "pp";
  std::string point;
  std::vector<std::string> grid;
  std::string format;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = src.resolve();
    const bool flat = chart == "flat";
    std::vector<std::string> names;
    Eigen::VectorXd base;
    if (flat) {
      validate(p.spec);
      for (int b = 0; b < p.spec.q; ++b)
        for (const char* c : {"u", "y", "z", "w"}) names.push_back(c + std::to_string(b + 1));
      base = Eigen::VectorXd::Zero(4 * p.spec.q);
      for (int b = 0; b < p.spec.q; ++b) base(4 * b) = 1.0;
    } else {
      validate(p.spec, p.lspec);
      names = chart_coordinate_names(p.spec, p.lspec);
      base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
      for (int b = 0; b < p.spec.q; ++b) base(base.size() - 3 * (p.spec.q - b) + 2) = 1.0;  // r_b = (0, 0, 1)
    }
    if (!point.empty()) {
      const std::vector<double> c = parse_list(point);
      if (c.size() != names.size())
        throw Error(ErrorCode::ShapeMismatch, "--point needs " + std::to_string(names.size()) + " values");
      base = to_vector(c);
    }

    auto eval = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
      if (!flat) return pp_metric_coords<double>(p.spec, p.lspec, x);
      return flat_chart_metric(fiber_to_quaternions(x)).g;
    };

    std::vector<GridAxis> axes;
    for (const auto& g : grid) axes.push_back(parse_axis(g, names));
    std::vector<Eigen::VectorXd> pts{base};
    for (const auto& ax : axes) {
      std::vector<Eigen::VectorXd> next;
      for (const auto& x : pts)
        for (double v : ax.values) {
          Eigen::VectorXd y = x;
          y(ax.coord) = v;
          next.push_back(y);
        }
      pts = std::move(next);
    }
    const auto metrics = parallel_map(pts.size(), [&](std::size_t n) { return eval(pts[n]); });

    const std::string fmt = format.empty() ? (grid.empty() ? "json" : "csv") : format;
    const std::string chart_name = flat ? "flat-psi-r" : "pp";
    if (fmt == "csv") {
      const int dim = static_cast<int>(metrics.front().rows());
      std::vector<std::string> header = names;
      for (const auto& h : packed_lower_names(dim)) header.push_back(h);
      for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
      out << '\n';
      for (std::size_t n = 0; n < pts.size(); ++n) {
        std::vector<double> row(pts[n].data(), pts[n].data() + pts[n].size());
        for (double v : packed_lower(metrics[n])) row.push_back(v);
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
      }
    } else {
      json rows = json::array();
      for (std::size_t n = 0; n < pts.size(); ++n) {
        json r{{"point", vector_to_json(pts[n])}, {"g", matrix_to_json(metrics[n])}};
        if (flat) r["chart_point"] = vector_to_json(flat_chart_coords(fiber_to_quaternions(pts[n])).coords);
        rows.push_back(r);
      }
      json j{{"command", "metric"}, {"chart", chart_name}, {"coordinates", names}};
      if (grid.empty()) {
        j.update(rows[0]);
      } else {
        j["grid"] = rows;
      }
      emit(out, j);
    }
    err << "metric: " << pts.size() << " point(s) in chart " << chart_name << '\n';
    return kPass;
  }
};

struct ReduceCompareCmd {
  Source src;
  std::uint64_t seed = 1;
  int samples = 20;
  double tol = 1e-6;
  double step = 1e-4;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = src.resolve();
    validate(p.spec, p.lspec);
    Rng rng(seed);
    std::vector<QuotientChartPoint> pts;
    for (int n = 0; n < samples; ++n) pts.push_back(sample_chart_point(p.spec, p.lspec, rng));
    const auto dev = parallel_map(pts.size(), [&](std::size_t n) {
      return (pp_metric(p.spec, p.lspec, pts[n]).g - reduction_oracle(p.spec, p.lspec, pts[n], step).g)
          .cwiseAbs()
          .maxCoeff();
    });
    double worst = 0;
    json rows = json::array();
    for (std::size_t n = 0; n < pts.size(); ++n) {
      worst = std::max(worst, dev[n]);
      rows.push_back({{"point", vector_to_json(pts[n].to_vector())}, {"deviation", dev[n]}});
    }
    const bool pass = worst <= tol;
    emit(out, {{"command", "reduce-compare"},
               {"preset", p.name},
               {"spec", to_json(p.spec, p.lspec)},
               {"seed", seed},
               {"samples", rows},
               {"max_deviation", worst},
               {"tolerance", tol},
               {"pass", pass}});
    err << "reduce-compare: " << p.name << ", " << samples << " samples, max deviation " << worst
        << (pass ? " pass" : " FAIL") << '\n';
    return pass ? kPass : kCheckFailed;
  }
};

struct CurvatureCmd {
  Source src;
  SamplePlan plan;
  bool plain = false;
  bool uniform = false;
  double factor = 3.0;
  double min_converged = 0.8;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = src.resolve();
    SamplePlan pl = plan;
    pl.fd.richardson = !plain;
    pl.log_spaced = !uniform;
    const QuotientVerification v = verify_quotient(p.spec, p.lspec, pl);
    json reports = json::array();
    for (const auto& r : v.ricci) reports.push_back(to_json(r));
    const double conv = v.converged_fraction(factor);
    const bool pass = v.pass() && conv >= min_converged;
    json j{{"command", "curvature"},
           {"preset", p.name},
           {"spec", to_json(p.spec, p.lspec)},
           {"seed", pl.seed},
           {"reports", reports},
           {"max_ricci", v.max_ricci()},
           {"ricci_tolerance", v.ricci_tol},
           {"converged_fraction", conv},
           {"sectional_count", v.sectional.size()},
           {"sectional_tolerance", v.sectional_tol},
           {"pass", pass}};
    if (!v.sectional.empty()) j["min_sectional"] = v.min_sectional();
    emit(out, j);
    err << "curvature: " << p.name << ", max |Ricci| " << v.max_ricci() << ", converged " << conv;
    if (!v.sectional.empty()) err << ", min sectional " << v.min_sectional();
    err << (pass ? " pass" : " FAIL") << '\n';
    return pass ? kPass : kCheckFailed;
  }
};

struct ClassifyCmd {
  std::vector<std::string> files;
  double tol = kWitnessTol;

  int operator()(std::ostream& out, std::ostream& err) const {
    const SpecFile a = read_spec_file(files.at(0)), b = read_spec_file(files.at(1));
    validate(a.spec);
    validate(b.spec);
    const MonomialVerdict v = equivalent_monomial(a.spec, b.spec, tol);
    json j = to_json(v);
    j["command"] = "classify";
    emit(out, j);
    err << "classify: " << (v.equivalent ? "monomially equivalent" : "not monomially equivalent");
    if (!v.equivalent) err << (v.invariants_differ ? " (invariants differ)" : " (invariants agree; inconclusive)");
    err << '\n';
    return v.equivalent ? kPass : kCheckFailed;
  }
};

struct PresetCmd {
  std::string name;
  std::string theta;
  int m = 2;
  std::string output;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Preset p = make_preset(name, theta, m);
    const std::string text = to_json(p.spec, p.lspec).dump(2) + "\n";
    if (output.empty()) {
      out << text;
    } else {
      std::ofstream f(output);
      if (!f) throw Error(ErrorCode::SpecInvalid, "cannot write " + output);
      f << text;
    }
    err << "preset: " << name << " (s=" << p.spec.s << ", k=" << p.spec.k << ", q=" << p.spec.q
        << ", l=" << p.lspec.l << ")" << (output.empty() ? "" : " -> " + output) << '\n';
    return kPass;
  }
};

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyper-Kaehler Lie groups, moment maps and quotient metrics"};
  app.name("hkq");
  app.require_subcommand(1);
  std::function<int(std::ostream&, std::ostream&)> action;

  VerifyCmd verify;
  auto* c_verify = app.add_subcommand("verify", "check the hyper-Kaehler (or Kaehler flat) axioms of a spec");
  verify.src.attach(c_verify);
  c_verify->add_option("--tol", verify.tol, "residual tolerance (scaled by max |theta|^2)");
  c_verify->callback([&] { action = verify; });

  MomentCmd mom;
  auto* c_moment = app.add_subcommand("moment", "evaluate the moment map and its consistency residuals");
  mom.src.attach(c_moment);
  c_moment->add_option("--point", mom.point, "ambient coordinates X then W");
  c_moment->add_option("--samples", mom.samples, "random points when --point is absent")->check(CLI::PositiveNumber);
  c_moment->add_option("--seed", mom.seed);
  c_moment->add_option("--tol", mom.tol, "tolerance between the three forms");
  c_moment->add_option("--invariance-tol", mom.invariance_tol);
  c_moment->callback([&] { action = mom; });

  MetricCmd met;
  auto* c_metric = app.add_subcommand("metric", "quotient metric (pp chart) or flat metric in (psi, r)");
  met.src.attach(c_metric);
  c_metric->add_option("--chart", met.chart)->check(CLI::IsMember({"pp", "flat"}));
  c_metric->add_option("--point", met.point, "chart coordinates (flat chart: W coordinates)");
  c_metric->add_option("--grid", met.grid, "axis name=lo:hi:n[:log]; repeat for a product grid");
  c_metric->add_option("--format", met.format)->check(CLI::IsMember({"json", "csv"}));
  c_metric->callback([&] { action = met; });

  ReduceCompareCmd red;
  auto* c_reduce = app.add_subcommand("reduce-compare", "closed-form quotient metric against the reduction oracle");
  red.src.attach(c_reduce);
  c_reduce->add_option("--seed", red.seed);
  c_reduce->add_option("--samples", red.samples)->check(CLI::PositiveNumber);
  c_reduce->add_option("--tol", red.tol);
  c_reduce->add_option("--step", red.step, "oracle finite-difference step");
  c_reduce->callback([&] { action = red; });

  CurvatureCmd curv;
  auto* c_curv = app.add_subcommand("curvature", "Ricci-flatness and sectional curvature samples");
  curv.src.attach(c_curv);
  c_curv->add_option("--points", curv.plan.points)->check(CLI::PositiveNumber);
  c_curv->add_option("--sectional-points", curv.plan.sectional_points)->check(CLI::NonNegativeNumber);
  c_curv->add_option("--planes", curv.plan.planes)->check(CLI::PositiveNumber);
  c_curv->add_option("--seed", curv.plan.seed);
  c_curv->add_option("--step", curv.plan.fd.step)->check(CLI::PositiveNumber);
  c_curv->add_flag("--plain", curv.plain, "plain central differences instead of Richardson");
  c_curv->add_flag("--uniform", curv.uniform, "log-uniform random radii instead of a log-spaced sweep");
  c_curv->add_option("--tol", curv.plan.ricci_tol, "max |Ricci| entry");
  c_curv->add_option("--sectional-tol", curv.plan.sectional_tol);
  c_curv->add_option("--convergence-factor", curv.factor);
  c_curv->add_option("--min-converged", curv.min_converged);
  c_curv->callback([&] { action = curv; });

  ClassifyCmd cls;
  auto* c_cls = app.add_subcommand("classify", "monomial equivalence of two spec files");
  c_cls->add_option("files", cls.files, "two spec files")->required()->expected(2)->check(CLI::ExistingFile);
  c_cls->add_option("--tol", cls.tol, "witness residual tolerance");
  c_cls->callback([&] { action = cls; });

  PresetCmd pre;
  auto* c_pre = app.add_subcommand("preset", "write the spec of a named quotient");
  c_pre->add_option("name", pre.name, "taub-nut | taubian-calabi | lwy")->required();
  c_pre->add_option("--theta", pre.theta);
  c_pre->add_option("--m", pre.m)->check(CLI::PositiveNumber);
  c_pre->add_option("-o,--output", pre.output, "write to a file instead of stdout");
  c_pre->callback([&] { action = pre; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kBadInput;
  }
  try {
    return action(out, err);
  } catch (const Error& e) {
    emit(out, {{"error", std::string(to_string(e.code()))}, {"message", e.what()}});
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
}

}  // namespace hkq::cli
