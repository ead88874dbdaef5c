#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsym/numeric.hpp"
#include "lsym/parse.hpp"
#include "lsym/problem.hpp"
#include "lsym/report.hpp"

#ifndef LSYM_CORPUS_DIR
#define LSYM_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace lsym;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ZeroOpts {
  std::uint64_t seed = 0;
  int samples = 100;
  double tol = 1e-9;
  std::string report = "text";
  std::string out;
  bool timing = false;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "sampling seed");
    app->add_option("--samples", samples, "sample points per identity")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "scaled residual tolerance")->check(CLI::PositiveNumber);
    app->add_option("--report", report, "report format")->check(CLI::IsMember({"text", "json"}));
    app->add_option("--out", out, "write the report here instead of stdout");
    app->add_flag("--timing", timing, "include wall times");
  }

  RunConfig run_config() const {
    RunConfig cfg;
    cfg.zero.seed = seed;
    cfg.zero.samples = samples;
    cfg.zero.abs_tol = tol;
    return cfg;
  }

  ReportFormat format() const { return report == "json" ? ReportFormat::Json : ReportFormat::Text; }
};

template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write(f);
}

int cmd_check(const std::string& problem_path, const std::string& select, const ZeroOpts& zo) {
  const ProblemFile pf = load_problem(problem_path);
  RunConfig cfg = zo.run_config();
  cfg.selection = split(select, ',');
  for (const std::string& name : cfg.selection) {
    const auto& all = lagrangian_checks();
    if (std::find(all.begin(), all.end(), name) == all.end()) {
      std::cerr << "unknown check: " << name << '\n';
      return 2;
    }
  }
  const Report report = run_checks(pf, cfg);
  with_output(zo.out, [&](std::ostream& o) { emit_report(report, zo.format(), o, {zo.timing}); });
  return report.ok() ? 0 : 1;
}

int cmd_corpus(const std::string& dir, const ZeroOpts& zo) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no problem files in " << dir << '\n';
    return 2;
  }
  std::vector<Report> reports;
  for (const fs::path& f : files) reports.push_back(run_checks(load_problem(f), zo.run_config()));
  with_output(zo.out, [&](std::ostream& o) { emit_reports(reports, zo.seed, zo.format(), o, {zo.timing}); });
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const Report& r) { return r.ok(); });
  return ok ? 0 : 1;
}

int cmd_integrate(const std::string& problem_path, const std::string& ic, double t0, double t1, double step,
                  const std::string& monitors, const std::string& out) {
  const ProblemFile pf = load_problem(problem_path);
  if (!pf.parts.empty()) throw std::runtime_error("integrate needs a single-part problem");
  const int n = pf.n;

  std::map<std::string, double> values;
  for (const std::string& item : split(ic, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad initial condition '" + item + "'");
    std::string key = item.substr(0, eq);
    if (n == 1 && (key == "q" || key == "p" || key == "dq")) key += "1";
    values[key] = std::stod(item.substr(eq + 1));
  }
  auto take = [&](const std::string& key) {
    auto it = values.find(key);
    if (it == values.end()) throw std::runtime_error("missing initial value for " + key);
    return it->second;
  };

  Trajectory traj;
  if (pf.kind == ProblemKind::Hamiltonian) {
    std::vector<double> u0;
    for (int a = 1; a <= n; ++a) u0.push_back(take(q_name(a)));
    for (int a = 1; a <= n; ++a) u0.push_back(take(p_name(a)));
    traj = integrate_hamiltonian(PhaseSystem{n, *pf.hamiltonian}, u0, t0, t1, step);
  } else {
    std::vector<double> q0, dq0;
    for (int a = 1; a <= n; ++a) q0.push_back(take(q_name(a)));
    for (int a = 1; a <= n; ++a) dq0.push_back(take(dq_name(a)));
    traj = integrate_euler_lagrange(LagrangianSystem{n, *pf.lagrangian}, q0, dq0, t0, t1, step);
  }

  Bindings params;
  for (const auto& [k, v] : pf.parameters) params.emplace(k, num(v));
  if (n == 1) {
    params.emplace("q", var(q_name(1)));
    params.emplace("p", var(p_name(1)));
    params.emplace("dq", var(dq_name(1)));
  }
  const std::vector<std::string> texts = split(monitors, ';');
  ExprVec exprs;
  for (const std::string& m : texts) exprs.push_back(substitute(parse(m), params));

  with_output(out, [&](std::ostream& o) {
    if (exprs.empty()) {
      write_csv(o, traj);
      return;
    }
    const auto series = monitor(traj, exprs);
    o << std::setprecision(17) << 't';
    for (const auto& name : traj.names) o << ',' << name;
    for (const auto& m : texts) o << ",\"" << m << '"';
    o << '\n';
    for (std::size_t k = 0; k < traj.count(); ++k) {
      o << traj.time(k);
      for (double v : traj.row(k)) o << ',' << v;
      for (const Series& s : series) o << ',' << s.values[k];
      o << '\n';
    }
  });
  if (traj.truncated()) {
    std::cerr << "integration stopped early: " << traj.diagnostic << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lambda-symmetry checks for Hamiltonian and Lagrangian systems"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "run checks on a problem file");
  std::string problem, select;
  ZeroOpts check_opts;
  check->add_option("--problem", problem, "problem file")->required()->check(CLI::ExistingFile);
  check->add_option("--select", select, "comma-separated check names");
  check_opts.attach(check);

  auto* corpus = app.add_subcommand("corpus", "run every bundled example");
  std::string dir = LSYM_CORPUS_DIR;
  ZeroOpts corpus_opts;
  corpus->add_option("--dir", dir, "directory of problem files")->check(CLI::ExistingDirectory);
  corpus_opts.attach(corpus);

  auto* integrate = app.add_subcommand("integrate", "integrate the equations of motion and print CSV");
  std::string ic, monitors, out;
  double t0 = 0.0, t1 = 1.0, step = kDefaultStep;
  integrate->add_option("--problem", problem, "problem file")->required()->check(CLI::ExistingFile);
  integrate->add_option("--ic", ic, "initial values, e.g. \"q1=0.5,p1=0.2\"")->required();
  integrate->add_option("--t0", t0, "start time");
  integrate->add_option("--t1", t1, "end time");
  integrate->add_option("--step", step, "step size")->check(CLI::PositiveNumber);
  integrate->add_option("--monitor", monitors, "expressions to evaluate along the trajectory, ';'-separated");
  integrate->add_option("--out", out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(problem, select, check_opts);
    if (*corpus) return cmd_corpus(dir, corpus_opts);
    if (*integrate) return cmd_integrate(problem, ic, t0, t1, step, monitors, out);
  } catch (const SchemaError& e) {
    std::cerr << "schema error at " << e.field() << ": " << e.message() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
