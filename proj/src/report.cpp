#include "lsym/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lsym/lagrangian.hpp"
#include "lsym/lambda.hpp"
#include "lsym/numeric.hpp"
#include "lsym/simplify.hpp"
#include "lsym/symmetry.hpp"

namespace lsym {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ProvenZero: return "ProvenZero";
    case Verdict::NumericallyZero: return "NumericallyZero";
    case Verdict::NonZero: return "NonZero";
    case Verdict::Skipped: return "Skipped";
    case Verdict::Error: return "Error";
  }
  return "?";
}

bool CheckRecord::failed() const {
  if (verdict == Verdict::Error) return true;
  if (verdict == Verdict::NonZero) return !expected_nonzero;
  if (verdict == Verdict::Skipped) return false;
  return expected_nonzero;
}

bool Report::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.failed(); });
}

const std::vector<std::string>& hamiltonian_checks() {
  static const std::vector<std::string> names{"cs",  "s",   "ds",    "gen", "dg",  "case", "las", "lap",
                                              "lam", "dtg", "dts",   "chart", "wzl", "sep", "cor2", "mon"};
  return names;
}

const std::vector<std::string>& lagrangian_checks() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"xll", "leg", "hem", "xh", "lh", "gl", "lala", "lz"};
    for (const std::string& h : hamiltonian_checks()) v.push_back(h);
    return v;
  }();
  return names;
}

std::string_view check_equation(std::string_view name) {
  static const std::map<std::string, std::string, std::less<>> eq{
      {"cs", "[F,Phi] + d_t Phi = F.grad tau + d_t tau F"},
      {"s", "S = div Phi - D_t tau + d_t tau"},
      {"ds", "D_t S = 0"},
      {"gen", "Phi~ = J grad G"},
      {"dg", "grad D_t G = 0"},
      {"case", "case split on S and G"},
      {"las", "[F,Phi] + d_t Phi = -Lambda Phi"},
      {"lap", "Phi^(1) = D_t Phi + Lambda Phi"},
      {"lam", "Lambda Phi = lambda Phi"},
      {"dtg", "grad G-dot = J Lambda J grad G"},
      {"dts", "S-dot = -div(Lambda Phi)"},
      {"chart", "X w = 0, X z = kappa"},
      {"wzl", "kappa dW/dz = M"},
      {"sep", "G-dot = gamma(t, G)"},
      {"cor2", "D_t Gamma = 0"},
      {"mon", "numeric monitor"},
      {"xll", "X_Lambda^(1) L = 0"},
      {"leg", "p = dL/d(dq), H = p.dq - L"},
      {"hem", "u-dot = J grad H"},
      {"xh", "psi = -p.d phi/dq"},
      {"lh", "Lambda = [[Lambda_L, 0], [B, Lambda_2]]"},
      {"gl", "D_t(phi.p) + (Lambda phi).p = 0"},
      {"lala", "Lambda_L phi = lambda phi"},
      {"lz", "dL~/dtheta = 0"},
  };
  auto it = eq.find(name);
  return it == eq.end() ? std::string_view{"?"} : std::string_view{it->second};
}

namespace {

struct Outcome {
  Verdict verdict = Verdict::Skipped;
  double residual = 0.0;
  std::optional<Point> witness;
  std::string detail;
};

Outcome skipped(std::string reason) { return {Verdict::Skipped, 0.0, std::nullopt, std::move(reason)}; }
Outcome error(std::string what) { return {Verdict::Error, 0.0, std::nullopt, std::move(what)}; }

Outcome numeric(double residual, double tol, std::string detail) {
  const bool ok = std::isfinite(residual) && residual <= tol;
  return {ok ? Verdict::NumericallyZero : Verdict::NonZero, residual, std::nullopt, std::move(detail)};
}

ZeroVerdict flag(bool ok) {
  ZeroVerdict v;
  v.tag = ok ? ZeroTag::ProvenZero : ZeroTag::NonZero;
  v.max_scaled_residual = v.max_abs_residual = ok ? 0.0 : 1.0;
  return v;
}

Outcome from_verdicts(const std::vector<ZeroVerdict>& vs, std::string detail = {}) {
  Outcome out{Verdict::ProvenZero, 0.0, std::nullopt, std::move(detail)};
  double worst_bad = -1.0;
  for (const ZeroVerdict& v : vs) {
    out.residual = std::max(out.residual, v.max_scaled_residual);
    if (v.tag == ZeroTag::NonZero) {
      out.verdict = Verdict::NonZero;
      if (v.max_scaled_residual > worst_bad) {
        worst_bad = v.max_scaled_residual;
        out.witness = v.samples > 0 ? std::optional<Point>(v.witness) : std::nullopt;
      }
    } else if (v.tag == ZeroTag::NumericallyZero && out.verdict == Verdict::ProvenZero) {
      out.verdict = Verdict::NumericallyZero;
    }
  }
  return out;
}

void append(std::vector<ZeroVerdict>& to, const std::vector<ZeroVerdict>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::string show(const Expr& e) { return format(simplify(e)); }

std::string show(const ExprVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + show(v[i]);
  return s + ")";
}

std::string case_token(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "i" || s.rfind("casei_", 0) == 0) return "i";
  if (s == "ii" || s.rfind("caseii_", 0) == 0) return "ii";
  if (s == "iii" || s.rfind("caseiii_", 0) == 0) return "iii";
  return s;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

class Runner {
 public:
  Runner(const ProblemFile& pf, const RunConfig& cfg) : pf_(pf), cfg_(cfg.zero) {
    if (pf.kind == ProblemKind::Hamiltonian) {
      if (pf.hamiltonian) sys_ = PhaseSystem{pf.n, *pf.hamiltonian};
      X_ = PhaseVectorField{pf.phi, pf.psi.value_or(ExprVec(static_cast<std::size_t>(pf.n), num(0))), pf.tau};
      if (pf.lambda) L_ = *pf.lambda;
      G_ = pf.candidates.G;
    } else {
      if (pf.lagrangian) lag_ = LagrangianSystem{pf.n, *pf.lagrangian};
      XL_ = ConfigVectorField{pf.phi};
      if (pf.lambda) LL_ = *pf.lambda;
      if (pf.hamiltonian)
        sys_ = PhaseSystem{pf.n, *pf.hamiltonian};
      else if (pf.candidates.H_for_legendre)
        sys_ = PhaseSystem{pf.n, *pf.candidates.H_for_legendre};
      G_ = pf.candidates.G;
    }
  }

  CheckRecord record(const std::string& name) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome& o = ensure(name);
    CheckRecord r;
    r.name = name;
    r.eq = std::string(check_equation(name));
    r.verdict = o.verdict;
    r.max_residual = o.residual;
    r.witness = o.witness;
    r.detail = o.detail;
    r.expected_nonzero = pf_.expect_nonzero.count(name) > 0;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

 private:
  const ProblemFile& pf_;
  ZeroConfig cfg_;
  std::map<std::string, Outcome> done_;

  std::optional<PhaseSystem> sys_;
  std::optional<PhaseVectorField> X_;
  std::optional<LambdaMatrix> L_;
  std::optional<Expr> G_;
  std::optional<LagrangianSystem> lag_;
  std::optional<ConfigVectorField> XL_;
  std::optional<LambdaMatrix> LL_;

  const DomainBox& box() const { return pf_.box; }
  const Candidates& cand() const { return pf_.candidates; }
  bool lagrangian() const { return pf_.kind == ProblemKind::Lagrangian; }

  const Outcome& ensure(const std::string& name) {
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    Outcome o;
    try {
      o = body(name);
    } catch (const SamplingError& e) {
      o = error(std::string("sampling: ") + e.what());
    } catch (const std::exception& e) {
      o = error(e.what());
    }
    return done_.emplace(name, std::move(o)).first->second;
  }

  // Reason why `name` cannot be relied on, or empty.
  std::string blocked(const std::string& name) {
    const Outcome& o = ensure(name);
    switch (o.verdict) {
      case Verdict::ProvenZero:
      case Verdict::NumericallyZero: return {};
      case Verdict::Skipped: return "prerequisite " + name + " skipped";
      default: return "prerequisite " + name + " failed";
    }
  }

  std::string need_system() const { return sys_ ? std::string{} : "no Hamiltonian"; }

  std::string need_field() {
    if (!lagrangian()) return X_ && !X_->psi.empty() ? std::string{} : "no phase-space vector field";
    ensure("xh");
    const Outcome& o = done_.at("xh");
    if (o.verdict == Verdict::NonZero || o.verdict == Verdict::Error) return "prerequisite xh failed";
    return X_ ? std::string{} : "extended vector field unavailable: " + o.detail;
  }

  std::string need_lambda() {
    if (!lagrangian()) return L_ ? std::string{} : "no Lambda matrix";
    if (auto r = blocked("lh"); !r.empty()) return r;
    return L_ ? std::string{} : "extended Lambda unavailable";
  }

  std::string need_lambda_symmetry() {
    if (auto r = need_lambda(); !r.empty()) return r;
    return blocked("las");
  }

  std::string need_phase() {
    if (auto r = need_system(); !r.empty()) return r;
    return need_field();
  }

  std::string need_lagrangian() const {
    if (!lag_) return "no Lagrangian";
    if (!LL_) return "no Lagrangian Lambda matrix";
    return {};
  }

  Outcome compare(const ExprVec& actual, const ExprVec& expected, const std::string& what) {
    if (actual.size() != expected.size())
      return {Verdict::NonZero, 1.0, std::nullopt,
              what + ": expected " + std::to_string(expected.size()) + " components, got " +
                  std::to_string(actual.size())};
    ExprVec diff;
    for (std::size_t i = 0; i < actual.size(); ++i) diff.push_back(actual[i] - expected[i]);
    return from_verdicts(verdicts_for(diff, box(), cfg_).components);
  }

  Outcome body(const std::string& name) {
    static const std::map<std::string, Outcome (Runner::*)()> table{
        {"cs", &Runner::cs},     {"s", &Runner::s},       {"ds", &Runner::ds},     {"gen", &Runner::gen},
        {"dg", &Runner::dg},     {"case", &Runner::kase}, {"las", &Runner::las},   {"lap", &Runner::lap},
        {"lam", &Runner::lam},   {"dtg", &Runner::dtg},   {"dts", &Runner::dts},   {"chart", &Runner::chart},
        {"wzl", &Runner::wzl},   {"sep", &Runner::sep},   {"cor2", &Runner::cor2}, {"mon", &Runner::mon},
        {"xll", &Runner::xll},   {"leg", &Runner::leg},   {"hem", &Runner::hem},   {"xh", &Runner::xh},
        {"lh", &Runner::lh},     {"gl", &Runner::gl},     {"lala", &Runner::lala}, {"lz", &Runner::lz},
    };
    auto it = table.find(name);
    if (it == table.end()) return error("unknown check " + name);
    if (lagrangian() && (name == "xll" || name == "leg" || name == "hem" || name == "xh" || name == "lh" ||
                         name == "gl" || name == "lala" || name == "lz")) {
      if (auto r = need_lagrangian(); !r.empty() && name != "leg" && name != "hem") return skipped(r);
    } else if (!lagrangian() && (name == "xll" || name == "leg" || name == "hem" || name == "xh" || name == "lh" ||
                                 name == "gl" || name == "lala" || name == "lz")) {
      return skipped("not a Lagrangian problem");
    }
    return (this->*(it->second))();
  }

  // ---- point symmetries --------------------------------------------------

  Outcome cs() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    return from_verdicts(check_point_symmetry(*sys_, *X_, box(), cfg_).components);
  }

  Outcome s() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    const Expr S = compute_S(*sys_, *X_);
    if (!cand().S_expected) return skipped("no expected S; S = " + show(S));
    auto o = from_verdicts({is_identically_zero(S - *cand().S_expected, box(), cfg_)});
    o.detail = "S = " + show(S);
    return o;
  }

  Outcome ds() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = blocked("cs"); !r.empty()) return skipped(r);
    const Expr S = compute_S(*sys_, *X_);
    auto o = from_verdicts({check_first_integral(*sys_, S, box(), cfg_)});
    o.detail = "S = " + show(S);
    return o;
  }

  Outcome gen() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    GeneratingFunctionReport rep;
    try {
      rep = generating_function_test(*sys_, *X_, box(), cfg_, G_);
    } catch (const UnsupportedConfiguration& e) {
      return skipped(e.what());
    }
    std::vector<ZeroVerdict> vs;
    std::string detail;
    if (rep.closedness_checked) {
      append(vs, rep.closedness);
      detail = rep.closed() ? "closed" : "not closed";
    }
    if (rep.candidate_checked) {
      append(vs, rep.candidate);
      if (rep.orientation == 0) vs.push_back(flag(false));
      detail += std::string(detail.empty() ? "" : "; ") + "candidate orientation " + std::to_string(rep.orientation);
    }
    if (vs.empty()) return skipped("nothing to test");
    return from_verdicts(vs, detail);
  }

  Outcome dg() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (!G_) return skipped("no candidate G");
    if (auto r = blocked("gen"); !r.empty()) return skipped(r);
    const auto rep = generating_function_test(*sys_, *X_, box(), cfg_, G_);
    if (!rep.criterion_checked) return skipped("criterion not applicable");
    return from_verdicts(rep.criterion, "D_t G = " + show(total_time_derivative(*sys_, *G_)));
  }

  Outcome kase() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = blocked("cs"); !r.empty()) return skipped(r);
    const auto c = classify_symmetry_case(*sys_, *X_, box(), cfg_, G_);
    std::vector<ZeroVerdict> vs;
    if (c.tag == SymmetryCase::CaseIII_SNonconstant && c.s_first_integral) vs.push_back(*c.s_first_integral);
    std::string detail = std::string(to_string(c.tag)) + "; S = " + show(c.S);
    if (c.G) detail += "; G = " + show(*c.G);
    if (!cand().case_expected) return skipped("no expected case; " + detail);
    const bool match = case_token(*cand().case_expected) == case_token(std::string(to_string(c.tag)));
    vs.push_back(flag(match));
    if (!match) detail += "; expected " + *cand().case_expected;
    return from_verdicts(vs, detail);
  }

  // ---- Lambda-symmetries ------------------------------------------------

  Outcome las() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = need_lambda(); !r.empty()) return skipped(r);
    return from_verdicts(check_lambda_symmetry(*sys_, *X_, *L_, box(), cfg_).components);
  }

  Outcome lap() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = need_lambda(); !r.empty()) return skipped(r);
    if (!cand().prolongation_expected) return skipped("no expected prolongation");
    const Bindings shell = on_shell_bindings(*sys_);
    ExprVec actual, expected;
    for (const Expr& e : lambda_prolongation(*sys_, *X_, *L_)) actual.push_back(substitute(e, shell));
    for (const Expr& e : *cand().prolongation_expected) expected.push_back(substitute(e, shell));
    auto o = compare(actual, expected, "prolongation");
    if (o.detail.empty()) o.detail = show(actual);
    return o;
  }

  std::optional<Expr> scalar_lambda() {
    return scalar_lambda_reduction(on_shell(*sys_, *L_), X_->Phi(), box(), cfg_);
  }

  Outcome lam() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = need_lambda_symmetry(); !r.empty()) return skipped(r);
    const auto lambda = scalar_lambda();
    const std::string found = lambda ? show(*lambda) : "none";
    if (!cand().lambda_scalar_expected) return skipped("no expectation; lambda = " + found);
    if (*cand().lambda_scalar_expected == "none") return from_verdicts({flag(!lambda)}, "lambda = " + found);
    if (!lambda) return from_verdicts({flag(false)}, "lambda = none; expected " + *cand().lambda_scalar_expected);
    return from_verdicts({is_identically_zero(*lambda - *cand().lambda_scalar_value, box(), cfg_)},
                         "lambda = " + found);
  }

  Outcome dtg() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (!G_) return skipped("no candidate G");
    if (auto r = need_lambda_symmetry(); !r.empty()) return skipped(r);
    LambdaGReport rep;
    try {
      rep = check_lambda_constant_G(*sys_, *X_, *L_, *G_, box(), cfg_);
    } catch (const std::invalid_argument& e) {
      return from_verdicts({flag(false)}, e.what());
    }
    std::vector<ZeroVerdict> vs = rep.dtg;
    append(vs, rep.corollary);
    std::string detail = "G-dot = " + show(rep.Gdot) + "; orientation " + std::to_string(rep.orientation);
    if (rep.lambda) detail += "; lambda = " + show(*rep.lambda);
    if (cand().Gdot_expected) vs.push_back(is_identically_zero(rep.Gdot - *cand().Gdot_expected, box(), cfg_));
    return from_verdicts(vs, detail);
  }

  Outcome dts() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (auto r = need_lambda_symmetry(); !r.empty()) return skipped(r);
    const auto rep = check_lambda_constant_S(*sys_, *X_, *L_, box(), cfg_);
    return from_verdicts({rep.verdict}, "S = " + show(rep.S) + "; S-dot = " + show(rep.Sdot) +
                                            "; div(Lambda Phi) = " + show(rep.div_lambda_phi));
  }

  // ---- charts and reduction ---------------------------------------------

  Outcome chart() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (!pf_.chart) return skipped("no chart");
    const auto rep = verify_chart(*sys_, *X_, *pf_.chart, box(), cfg_);
    std::vector<ZeroVerdict> vs = rep.invariance;
    std::string detail = "kappa = " + show(rep.kappa);
    if (pf_.chart->normalized) {
      vs.push_back(rep.rate);
    } else {
      vs.push_back(flag(rep.rate.holds()));
      detail += rep.rate.holds() ? " (nonvanishing)" : " (vanishes in the box)";
    }
    append(vs, rep.roundtrip);
    return from_verdicts(vs, detail);
  }

  Outcome wzl() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (!pf_.chart) return skipped("no chart");
    if (auto r = blocked("chart"); !r.empty()) return skipped(r);
    if (auto r = need_lambda_symmetry(); !r.empty()) return skipped(r);
    const ReductionChart& ch = *pf_.chart;
    const ReducedSystem red = reduced_system(*sys_, *X_, *L_, ch, box(), cfg_);
    std::vector<ZeroVerdict> vs = red.law;
    std::string zf;
    for (bool b : red.z_free) zf += b ? '1' : '0';
    std::string detail = "W = " + show(red.W) + "; Z = " + show(red.Z) + "; z-free " + zf;
    if (cand().W_expected) {
      const auto o = compare(red.W, *cand().W_expected, "W");
      vs.push_back(o.verdict == Verdict::NonZero ? flag(false) : flag(true));
      if (o.verdict == Verdict::NonZero) detail += "; W differs from expectation";
    }
    if (cand().Z_expected) {
      const auto v = is_identically_zero(red.Z - *cand().Z_expected, box(), cfg_);
      vs.push_back(v);
      if (!v.holds()) detail += "; Z differs from expectation";
    }
    if (cand().z_free_expected) {
      const bool match = *cand().z_free_expected == red.z_free;
      vs.push_back(flag(match));
      if (!match) detail += "; z-free flags differ from expectation";
    }
    return from_verdicts(vs, detail);
  }

  Outcome sep() {
    if (auto r = need_phase(); !r.empty()) return skipped(r);
    if (!G_) return skipped("no candidate G");
    if (!pf_.chart) return skipped("no chart");
    if (auto r = blocked("wzl"); !r.empty()) return skipped(r);
    ReductionChart ch = *pf_.chart;
    int index = -1;
    for (std::size_t j = 0; j < ch.w.size(); ++j)
      if (simplifies_to_zero(ch.w[j] - *G_)) index = static_cast<int>(j);
    if (index < 0) {
      auto adapted = adapt_chart(ch, ch.to_chart(*G_));
      if (!adapted) return skipped("G is not a chart coordinate");
      ch = adapted->first;
      index = adapted->second;
    }
    if (!scalar_lambda()) return skipped("Lambda Phi is not a scalar multiple of Phi");
    const auto rep = check_separated_G(*sys_, *X_, *L_, ch, index, box(), cfg_);
    std::vector<ZeroVerdict> vs = rep.dependence;
    std::string detail = "G = w" + std::to_string(index + 1) + "; G-dot = " + show(rep.Gdot);
    if (!rep.gamma) {
      vs.push_back(flag(false));
      return from_verdicts(vs, detail + "; G-dot is not a function of (t, G)");
    }
    detail += "; gamma = " + show(*rep.gamma);
    if (cand().gamma) vs.push_back(is_identically_zero(*rep.gamma - *cand().gamma, box(), cfg_));
    return from_verdicts(vs, detail);
  }

  Outcome cor2() {
    if (auto r = need_system(); !r.empty()) return skipped(r);
    if (!cand().Gamma) return skipped("no candidate Gamma");
    return from_verdicts({verify_time_dependent_integral(*sys_, *cand().Gamma, box(), cfg_)},
                         "Gamma = " + show(*cand().Gamma));
  }

  Outcome mon() {
    if (auto r = need_system(); !r.empty()) return skipped(r);
    if (pf_.monitors.empty()) return skipped("no monitors");
    double worst_ratio = 0.0, worst = 0.0;
    std::string detail;
    for (const MonitorSpec& m : pf_.monitors) {
      const Trajectory traj = integrate_hamiltonian(*sys_, m.u0, 0.0, m.t1, m.h);
      const Series series = monitor(traj, {m.expr})[0];
      double r = 0.0;
      std::string note;
      if (traj.truncated()) {
        r = INFINITY;
        note = " (" + traj.diagnostic + ")";
      } else if (series.failed_at >= 0) {
        r = INFINITY;
        note = " (domain error at step " + std::to_string(series.failed_at) + ")";
      } else if (m.gamma) {
        r = compare_with_scalar_ode(series, *m.gamma, series.values.front());
      } else {
        for (double v : series.values) r = std::max(r, std::abs(v - series.values.front()));
      }
      if (!detail.empty()) detail += "; ";
      detail += m.label + " " + fmt_double(r) + " (tol " + fmt_double(m.tol) + ")" + note;
      const double ratio = std::isfinite(r) ? r / m.tol : INFINITY;
      if (ratio >= worst_ratio) {
        worst_ratio = ratio;
        worst = r;
      }
    }
    Outcome o = numeric(worst_ratio, 1.0, detail);
    o.residual = worst;
    return o;
  }

  // ---- Lagrangian pipeline ----------------------------------------------

  Outcome xll() {
    return from_verdicts({check_lagrangian_lambda_invariance(*lag_, *XL_, *LL_, box(), cfg_)});
  }

  Outcome leg() {
    if (!lag_) return skipped("no Lagrangian");
    if (!cand().velocity_map) return skipped("no velocity map");
    if (auto r = need_system(); !r.empty()) return skipped(r);
    try {
      check_regular(*lag_, box(), cfg_);
    } catch (const RegularityError& e) {
      return error(e.what());
    }
    const auto rep = verify_legendre(*lag_, *cand().velocity_map, sys_->H, box(), cfg_);
    std::vector<ZeroVerdict> vs = rep.momentum;
    vs.push_back(rep.legendre);
    return from_verdicts(vs);
  }

  Outcome hem() {
    if (auto r = need_system(); !r.empty()) return skipped(r);
    if (!cand().hamilton_expected) return skipped("no expected canonical equations");
    const ExprVec F = canonical_equations(*sys_);
    auto o = compare(F, *cand().hamilton_expected, "canonical equations");
    if (o.detail.empty()) o.detail = show(F);
    return o;
  }

  Outcome xh() {
    if (auto r = blocked("xll"); !r.empty()) return skipped(r);
    ExtendedField ext;
    if (LL_->velocity_dependent) {
      if (!cand().velocity_map) return skipped("velocity-dependent Lambda needs a velocity map");
      ext = extend_vector_field_velocity_dependent(*lag_, *XL_, *LL_, *cand().velocity_map);
    } else {
      ext = extend_vector_field(*XL_);
      if (!G_) G_ = ext.G;
    }
    const std::string detail = "psi = " + show(ext.X.psi);
    if (!cand().psi_expected) {
      X_ = ext.X;
      return skipped("no expected psi; " + detail);
    }
    auto o = compare(ext.X.psi, *cand().psi_expected, "psi");
    if (o.verdict != Verdict::NonZero) X_ = ext.X;
    o.detail = detail;
    return o;
  }

  Outcome lh() {
    if (auto r = blocked("xll"); !r.empty()) return skipped(r);
    ExtendedLambda ext;
    try {
      ext = extend_lambda(*XL_, *LL_, cand().lambda2_candidate, box(), cfg_);
    } catch (const ExtensionError& e) {
      return from_verdicts({flag(false)}, e.what());
    }
    std::vector<ZeroVerdict> vs = ext.constraint;
    std::string detail = ext.solved ? "lower-right block solved" : "lower-right block from candidate";
    if (cand().lambda_expected) {
      const LambdaMatrix& want = *cand().lambda_expected;
      if (want.size() != ext.L.size()) {
        vs.push_back(flag(false));
        detail += "; expected Lambda has the wrong size";
      } else {
        ExprVec got, exp;
        for (int i = 0; i < want.size(); ++i)
          for (int j = 0; j < want.size(); ++j) {
            got.push_back(ext.L(i, j));
            exp.push_back(want(i, j));
          }
        const auto o = compare(got, exp, "Lambda");
        vs.push_back(flag(o.verdict != Verdict::NonZero));
        if (o.verdict == Verdict::NonZero) detail += "; Lambda differs from expectation";
      }
    }
    auto o = from_verdicts(vs, detail);
    if (o.verdict != Verdict::NonZero) L_ = ext.L;
    return o;
  }

  std::vector<InitialCondition> initial_conditions(std::string& problem) const {
    std::vector<InitialCondition> ics;
    const auto n = static_cast<std::size_t>(pf_.n);
    for (const auto& row : cand().initial_conditions) {
      if (row.size() != 2 * n) {
        problem = "initial condition needs " + std::to_string(2 * n) + " values";
        return {};
      }
      ics.push_back({std::vector<double>(row.begin(), row.begin() + static_cast<long>(n)),
                     std::vector<double>(row.begin() + static_cast<long>(n), row.end())});
    }
    return ics;
  }

  Outcome gl() {
    if (auto r = blocked("xll"); !r.empty()) return skipped(r);
    std::string problem;
    const auto ics = initial_conditions(problem);
    if (!problem.empty()) return error(problem);
    if (ics.empty()) return skipped("no initial conditions");
    NoetherReport rep;
    try {
      rep = check_noether_lambda(*lag_, *XL_, *LL_, ics, pf_.horizon);
    } catch (const IntegrationError& e) {
      return error(e.what());
    }
    std::string detail = std::to_string(rep.traces.size()) + " trajectories to t = " + fmt_double(pf_.horizon);
    for (const auto& t : rep.traces)
      if (t.trajectory.truncated()) detail += "; " + t.trajectory.diagnostic;
    if (!rep.holds()) return {Verdict::NonZero, rep.max_residual(), std::nullopt, detail};
    return numeric(rep.max_residual(), rep.tol, detail);
  }

  Outcome lala() {
    if (auto r = need_field(); !r.empty()) return skipped(r);
    if (auto r = need_lambda(); !r.empty()) return skipped(r);
    const auto rep = check_lala_and_corollary3(*XL_, *LL_, *X_, *L_, box(), cfg_);
    if (!rep.lambda) return from_verdicts({flag(false)}, "Lambda_L phi is not a scalar multiple of phi");
    std::vector<ZeroVerdict> vs = rep.corollary;
    return from_verdicts(vs, "lambda = " + show(*rep.lambda) + (rep.constant ? " (constant)" : ""));
  }

  Outcome lz() {
    if (auto r = blocked("xll"); !r.empty()) return skipped(r);
    if (!cand().theta || !cand().reduced_L) return skipped("no theta or reduced Lagrangian");
    if (cand().particular_solutions.empty()) return skipped("no particular solution");
    if (pf_.n > 1 && !cand().eta) return skipped("no invariants eta");
    std::string problem;
    const auto ics = initial_conditions(problem);
    if (!problem.empty()) return error(problem);
    if (ics.empty()) return skipped("no initial conditions");
    PartialReductionInput in;
    in.eta = cand().eta.value_or(ExprVec{});
    in.theta = *cand().theta;
    in.reduced_L = *cand().reduced_L;
    for (const auto& ic : ics) in.initial_q.push_back(ic.q);
    in.t1 = pf_.horizon;

    std::vector<ZeroVerdict> vs;
    std::string detail;
    bool any = false;
    double residual = 0.0;
    std::string accepted;
    for (std::size_t b = 0; b < cand().particular_solutions.size(); ++b) {
      in.particular_solution = cand().particular_solutions[b];
      const auto rep = partial_reduction_check(*lag_, *XL_, *LL_, in, box(), cfg_);
      if (b == 0) {
        vs = rep.invariance;
        vs.push_back(rep.composition);
      }
      double el = 0.0;
      for (double r : rep.el_residuals) el = std::max(el, r);
      if (!rep.diagnostic.empty()) el = INFINITY;
      const bool ok = rep.holds();
      if (ok) {
        any = true;
        residual = std::max(residual, el);
        accepted += (accepted.empty() ? "" : ",") + std::to_string(b + 1);
      }
      if (!detail.empty()) detail += "; ";
      detail += "branch " + std::to_string(b + 1) + " dq = " + show(in.particular_solution) + ": theta " +
                (rep.theta_condition.holds() ? "ok" : "fails") + ", full equations " +
                (rep.euler_lagrange_ok() ? "ok" : "fail") + " (" + fmt_double(el) + ")";
      if (!rep.diagnostic.empty()) detail += " " + rep.diagnostic;
    }
    detail += "; accepted: " + (accepted.empty() ? std::string("none") : accepted);
    vs.push_back(flag(any));
    auto o = from_verdicts(vs, detail);
    if (o.verdict != Verdict::NonZero) o.verdict = Verdict::NumericallyZero;
    o.residual = std::max(o.residual, residual);
    return o;
  }
};

void run_into(const ProblemFile& pf, const RunConfig& cfg, const std::string& part, std::vector<CheckRecord>& out) {
  if (!pf.parts.empty()) {
    for (const ProblemFile& sub : pf.parts) {
      const std::string label = sub.name.substr(sub.name.rfind('/') + 1);
      run_into(sub, cfg, part.empty() ? label : part + "/" + label, out);
    }
    return;
  }
  const std::vector<std::string>& all =
      pf.kind == ProblemKind::Lagrangian ? lagrangian_checks() : hamiltonian_checks();
  std::vector<std::string> wanted =
      !cfg.selection.empty() ? cfg.selection : (!pf.select.empty() ? pf.select : all);
  // execution order follows the dependency order; unknown names go last
  std::vector<std::string> ordered;
  for (const std::string& name : all)
    if (std::find(wanted.begin(), wanted.end(), name) != wanted.end()) ordered.push_back(name);
  for (const std::string& name : wanted)
    if (std::find(all.begin(), all.end(), name) == all.end() &&
        std::find(ordered.begin(), ordered.end(), name) == ordered.end())
      ordered.push_back(name);

  Runner runner(pf, cfg);
  for (const std::string& name : ordered) {
    CheckRecord r = runner.record(name);
    r.part = part;
    out.push_back(std::move(r));
  }
}

using ojson = nlohmann::ordered_json;

ojson to_json(const Report& report, const EmitOptions& opts) {
  ojson j;
  j["problem"] = report.problem;
  j["seed"] = report.seed;
  ojson checks = ojson::array();
  for (const CheckRecord& r : report.checks) {
    ojson c;
    if (!r.part.empty()) c["part"] = r.part;
    c["name"] = r.name;
    c["eq"] = r.eq;
    c["verdict"] = std::string(to_string(r.verdict));
    c["max_residual"] = r.max_residual;
    if (r.witness) {
      ojson point = ojson::object();
      for (const auto& [k, v] : *r.witness) point[k] = v;
      c["witness"] = {{"seed", report.seed}, {"point", point}};
    }
    if (r.expected_nonzero) c["expected_nonzero"] = true;
    if (!r.detail.empty()) c["detail"] = r.detail;
    if (opts.timing) c["wall_ms"] = r.wall_ms;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  j["status"] = report.ok() ? "pass" : "fail";
  return j;
}

void emit_text(const Report& report, std::ostream& out, const EmitOptions& opts) {
  out << "problem " << report.problem << " seed " << report.seed << '\n';
  for (const CheckRecord& r : report.checks) {
    out << (r.part.empty() ? "" : r.part + ":") << r.name << " [" << r.eq << "] " << to_string(r.verdict) << ' '
        << fmt_double(r.max_residual);
    if (opts.timing) out << ' ' << fmt_double(r.wall_ms) << "ms";
    out << '\n';
    if (r.expected_nonzero) out << "    expected NonZero\n";
    if (!r.detail.empty()) out << "    " << r.detail << '\n';
    if (r.witness) {
      out << "    witness seed " << report.seed << ':';
      for (const auto& [k, v] : *r.witness) out << ' ' << k << '=' << v;
      if (r.witness->empty()) out << " any point";
      out << '\n';
    }
  }
  out << "status " << (report.ok() ? "pass" : "fail") << '\n';
}

}  // namespace

Report run_checks(const ProblemFile& problem, const RunConfig& cfg) {
  Report report;
  report.problem = problem.name;
  report.seed = cfg.zero.seed;
  run_into(problem, cfg, "", report.checks);
  return report;
}

void emit_report(const Report& report, ReportFormat format, std::ostream& out, const EmitOptions& opts) {
  if (format == ReportFormat::Json)
    out << to_json(report, opts).dump(2) << '\n';
  else
    emit_text(report, out, opts);
}

void emit_reports(const std::vector<Report>& reports, std::uint64_t seed, ReportFormat format, std::ostream& out,
                  const EmitOptions& opts) {
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const Report& r) { return r.ok(); });
  if (format == ReportFormat::Json) {
    ojson j;
    j["seed"] = seed;
    ojson arr = ojson::array();
    for (const Report& r : reports) arr.push_back(to_json(r, opts));
    j["reports"] = std::move(arr);
    j["status"] = ok ? "pass" : "fail";
    out << j.dump(2) << '\n';
    return;
  }
  for (const Report& r : reports) {
    emit_text(r, out, opts);
    out << '\n';
  }
  out << "corpus " << (ok ? "pass" : "fail") << '\n';
}

}  // namespace lsym
