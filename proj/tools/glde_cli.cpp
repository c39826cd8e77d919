#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "glde/config_json.hpp"
#include "glde/glde.hpp"

namespace {

using namespace glde;

constexpr int kExitOk = 0;
constexpr int kExitHViolation = 2;
constexpr int kExitResonance = 3;
constexpr int kExitConfig = 64;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file: " + path);
  out << text;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,side";
  Eigen::Index n = traj.initialState().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  for (const auto& s : traj.samples()) {
    out += fmt(s.t);
    out += ',';
    out += s.side;
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      out += fmt(s.x(i));
    }
    out += '\n';
  }
  return out;
}

json multipliers_json(const std::vector<std::complex<double>>& rho) {
  json arr = json::array();
  for (const auto& r : rho) {
    json e;
    e["re"] = r.real();
    e["im"] = r.imag();
    e["modulus"] = std::abs(r);
    arr.push_back(std::move(e));
  }
  return arr;
}

int run_check(const std::string& cfgPath, double epsH) {
  ParsedConfig pc = load_config_file(cfgPath);
  HCheckReport rep = check_H(pc.A, epsH);
  json out;
  out["pass"] = rep.pass;
  out["minAbsDet"] = rep.minAbsDet;
  out["epsilon"] = epsH;
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json je;
    je["time"] = e.time;
    je["detPre"] = e.detPre;
    je["detPost"] = e.detPost;
    entries.push_back(std::move(je));
  }
  out["jumps"] = std::move(entries);
  std::cout << canonical_dump(out) << '\n';
  return rep.pass ? kExitOk : kExitHViolation;
}

int run_simulate(const std::string& cfgPath, double t0, std::vector<double> x0v, double t1,
                 int samples, double step, const std::string& outPath, bool report) {
  GLDESystem sys = make_system(load_config_file(cfgPath));
  if (static_cast<Eigen::Index>(x0v.size()) != sys.dimension())
    throw config_error("--x0 needs exactly " + std::to_string(sys.dimension()) + " entries");
  Eigen::VectorXd x0 = Eigen::Map<Eigen::VectorXd>(x0v.data(), x0v.size());
  Trajectory traj = propagate(sys, t0, x0, t1, samples, step);
  std::string csv = trajectory_csv(traj);
  if (report) {
    if (!outPath.empty()) write_text(outPath, csv);
    json out;
    out["t0"] = t0;
    out["t1"] = t1;
    out["samples"] = static_cast<long long>(traj.samples().size());
    Eigen::VectorXd xf = traj.evaluate(t1);
    out["finalState"] = detail::vector_json(xf);
    auto sided = traj.oneSided(t1);
    out["finalStateLeft"] = detail::vector_json(sided.left);
    out["finalStateRight"] = detail::vector_json(sided.right);
    std::cout << canonical_dump(out) << '\n';
  } else {
    write_text(outPath, csv);
  }
  return kExitOk;
}

int run_dichotomy(const std::string& cfgPath, double epsUc, int grid, const std::string& outPath) {
  GLDESystem sys = make_system(load_config_file(cfgPath));
  Propagator prop(sys);
  MonodromyData md = monodromy(prop);
  FloquetDecomposition fd = floquet_decompose(prop, grid);
  DichotomyReport rep = dichotomy_check(md, fd, epsUc);
  json out;
  out["classification"] = to_string(rep.classification);
  out["epsUc"] = rep.epsUc;
  out["multipliers"] = multipliers_json(md.multipliers);
  out["stable"] = multipliers_json(rep.stable);
  out["unstable"] = multipliers_json(rep.unstable);
  out["critical"] = multipliers_json(rep.critical);
  json fl;
  fl["realLogExists"] = fd.realLogExists;
  fl["reconstructionError"] = fd.reconstructionError;
  fl["periodicityError"] = fd.periodicityError;
  fl["maxG"] = fd.maxG;
  fl["maxGInv"] = fd.maxGInv;
  out["floquet"] = std::move(fl);
  if (rep.classification == DichotomyClass::Dichotomy) {
    out["alpha"] = rep.alpha;
    out["K"] = rep.K;
    out["projectionRank"] = static_cast<long long>(rep.stableCount);
    out["projection"] = detail::matrix_json(rep.P);
  }
  write_text(outPath, canonical_dump(out) + "\n");
  return kExitOk;
}

int run_periodic(const std::string& cfgPath, int samples, const std::string& outPath,
                 const std::string& trajPath, int repTerms) {
  GLDESystem sys = make_system(load_config_file(cfgPath));
  Propagator prop(sys);
  Eigen::VectorXd x0 = periodic_initial_condition(prop);
  Eigen::VectorXd x0ks = periodic_initial_condition_ks(prop);
  Trajectory traj = propagate(sys, 0.0, x0, sys.period(), samples, prop.step());
  double residual = (traj.evaluate(sys.period()) - x0).norm();
  json out;
  out["x0"] = detail::vector_json(x0);
  out["x0ClosedForm"] = detail::vector_json(x0ks);
  out["routeDifference"] = (x0 - x0ks).norm();
  out["residual"] = residual;
  out["period"] = sys.period();
  if (repTerms != 0) {
    DichotomyReport rep = analyze_dichotomy(prop);
    if (rep.classification == DichotomyClass::Dichotomy) {
      Eigen::VectorXd xr =
          dichotomy_representation_x0(prop, rep, repTerms > 0 ? repTerms : 0);
      out["representationX0"] = detail::vector_json(xr);
      out["representationError"] = (xr - x0).norm();
    }
  }
  if (!trajPath.empty()) write_text(trajPath, trajectory_csv(traj));
  write_text(outPath, canonical_dump(out) + "\n");
  return kExitOk;
}

int run_integrate(const std::string& cfgPath, double a, double b, long oracleCells,
                  const std::string& outPath) {
  ParsedConfig pc = load_config_file(cfgPath);
  if (!pc.f) throw config_error("integrate needs an \"f\" block in the config");
  Eigen::VectorXd v = ks_integrate(pc.A, *pc.f, a, b);
  json out;
  out["a"] = a;
  out["b"] = b;
  out["value"] = detail::vector_json(v);
  if (oracleCells > 0) {
    Eigen::VectorXd o = gauge_oracle_integrate(pc.A, *pc.f, a, b, static_cast<int>(oracleCells));
    out["oracle"] = detail::vector_json(o);
    out["oracleCells"] = static_cast<long long>(oracleCells);
    out["oracleDifference"] = (v - o).norm();
  }
  write_text(outPath, canonical_dump(out) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic generalized linear differential equations over Stieltjes integrals"};
  app.require_subcommand(1);

  std::string cfgPath, outPath, trajPath;
  double epsH = 1e-12, epsUc = 1e-8;
  double t0 = 0.0, t1 = 1.0, step = 0.0, a = 0.0, b = 1.0;
  std::vector<double> x0v;
  int samples = 257, grid = 128, repTerms = 0;
  long oracleCells = 0;

  auto* check = app.add_subcommand("check", "validate a config and the jump invertibility condition");
  check->add_option("config", cfgPath, "system description (JSON)")->required();
  check->add_option("--eps-h", epsH, "determinant threshold for the invertibility condition");

  auto* sim = app.add_subcommand("simulate", "propagate an initial value and emit a CSV trajectory");
  sim->add_option("config", cfgPath, "system description (JSON)")->required();
  sim->add_option("--t0", t0, "initial time");
  sim->add_option("--x0", x0v, "initial state, comma separated")->required()->delimiter(',');
  sim->add_option("--t1", t1, "final time")->required();
  sim->add_option("--samples", samples, "number of uniform sample times");
  sim->add_option("--step", step, "RK4 step (default period/4096)");
  sim->add_option("--out", outPath, "CSV output path (default stdout)");
  bool report = false;
  sim->add_flag("--report", report, "print a JSON summary to stdout instead of the CSV");

  auto* dich = app.add_subcommand("dichotomy", "monodromy, Floquet data, and dichotomy classification");
  dich->add_option("config", cfgPath, "system description (JSON)")->required();
  dich->add_option("--eps-uc", epsUc, "unit-circle decision band");
  dich->add_option("--grid", grid, "Floquet sample points per period");
  dich->add_option("--out", outPath, "JSON output path (default stdout)");

  auto* per = app.add_subcommand("periodic", "initial value and trajectory of the periodic solution");
  per->add_option("config", cfgPath, "system description (JSON)")->required();
  per->add_option("--samples", samples, "trajectory sample count");
  per->add_option("--out", outPath, "JSON output path (default stdout)");
  per->add_option("--traj", trajPath, "also write the periodic trajectory CSV here");
  per->add_option("--rep-terms", repTerms,
                  "include the truncated dichotomy representation (-1 for auto depth)");

  auto* integ = app.add_subcommand("integrate", "Stieltjes integral of f against d[A]");
  integ->add_option("config", cfgPath, "system description (JSON)")->required();
  integ->add_option("--a", a, "lower limit")->required();
  integ->add_option("--b", b, "upper limit")->required();
  integ->add_option("--oracle-cells", oracleCells, "also run the tagged-partition oracle");
  integ->add_option("--out", outPath, "JSON output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (check->parsed()) return run_check(cfgPath, epsH);
    if (sim->parsed()) return run_simulate(cfgPath, t0, x0v, t1, samples, step, outPath, report);
    if (dich->parsed()) return run_dichotomy(cfgPath, epsUc, grid, outPath);
    if (per->parsed()) return run_periodic(cfgPath, samples, outPath, trajPath, repTerms);
    if (integ->parsed()) return run_integrate(cfgPath, a, b, oracleCells, outPath);
  } catch (const h_violation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitHViolation;
  } catch (const resonance_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResonance;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
