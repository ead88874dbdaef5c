#include "lsym/lambda.hpp"

#include <algorithm>
#include <stdexcept>

#include "lsym/simplify.hpp"

namespace lsym {

namespace {

bool all_hold(const std::vector<ZeroVerdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const ZeroVerdict& v) { return v.holds(); });
}

std::size_t idx(int a) { return static_cast<std::size_t>(a); }

void require_no_tau(const PhaseVectorField& X, const char* what) {
  if (!X.tau.is_zero() && !simplifies_to_zero(X.tau))
    throw std::invalid_argument(std::string(what) + ": vector field has nonzero tau");
}

void require_dims(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L, const char* what) {
  if (static_cast<int>(X.phi.size()) != sys.n || static_cast<int>(X.psi.size()) != sys.n)
    throw std::invalid_argument(std::string(what) + ": vector field has the wrong number of components");
  if (L.size() != sys.dim())
    throw std::invalid_argument(std::string(what) + ": Lambda must be " + std::to_string(sys.dim()) + "x" +
                                std::to_string(sys.dim()));
}

// J v = (v_p, -v_q)
ExprVec apply_J(const ExprVec& v) {
  const std::size_t n = v.size() / 2;
  ExprVec out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(v[n + i]);
  for (std::size_t i = 0; i < n; ++i) out.push_back(neg(v[i]));
  return out;
}

}  // namespace

LambdaMatrix LambdaMatrix::zero(int size, LambdaSide side) {
  LambdaMatrix m;
  m.side = side;
  m.rows.assign(idx(size), ExprVec(idx(size), Expr()));
  return m;
}

LambdaMatrix LambdaMatrix::diagonal(const ExprVec& d, LambdaSide side) {
  LambdaMatrix m = zero(static_cast<int>(d.size()), side);
  for (std::size_t i = 0; i < d.size(); ++i) m.rows[i][i] = d[i];
  return m;
}

const Expr& LambdaMatrix::operator()(int i, int j) const { return rows.at(idx(i)).at(idx(j)); }

ExprVec LambdaMatrix::apply(const ExprVec& v) const {
  if (v.size() != rows.size()) throw std::invalid_argument("Lambda applied to a vector of the wrong size");
  ExprVec out;
  for (const ExprVec& row : rows) {
    ExprVec terms;
    for (std::size_t j = 0; j < v.size(); ++j) terms.push_back(mul({row[j], v[j]}));
    out.push_back(add(std::move(terms)));
  }
  return out;
}

LambdaMatrix LambdaMatrix::substituted(const Bindings& b) const {
  LambdaMatrix m = *this;
  for (ExprVec& row : m.rows)
    for (Expr& e : row) e = substitute(e, b);
  return m;
}

void validate_lambda(const LambdaMatrix& L, int expected_size, const std::vector<std::string>& velocity_symbols) {
  if (L.size() != expected_size)
    throw std::invalid_argument("Lambda has " + std::to_string(L.size()) + " rows, expected " +
                                std::to_string(expected_size));
  for (const ExprVec& row : L.rows) {
    if (static_cast<int>(row.size()) != expected_size) throw std::invalid_argument("Lambda is not square");
    if (L.velocity_dependent) continue;
    for (const Expr& e : row)
      for (const std::string& v : velocity_symbols)
        if (depends_on(e, v))
          throw std::invalid_argument("Lambda entry " + format(e) + " uses velocity " + v +
                                      " but the matrix is not flagged velocity dependent");
  }
}

std::vector<std::string> phase_velocity_symbols(const PhaseSystem& sys) {
  std::vector<std::string> out;
  for (int a = 0; a < sys.dim(); ++a) out.push_back(sys.du(a));
  return out;
}

LambdaMatrix on_shell(const PhaseSystem& sys, const LambdaMatrix& L) {
  if (!L.velocity_dependent) return L;
  LambdaMatrix m = L.substituted(on_shell_bindings(sys));
  m.velocity_dependent = false;
  return m;
}

ExprVec lambda_prolongation(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L) {
  require_no_tau(X, "lambda_prolongation");
  require_dims(sys, X, L, "lambda_prolongation");
  const ExprVec Phi = X.Phi();
  const ExprVec LPhi = on_shell(sys, L).apply(Phi);
  ExprVec out;
  for (int a = 0; a < sys.dim(); ++a) out.push_back(add({total_time_derivative(sys, Phi[idx(a)]), LPhi[idx(a)]}));
  return out;
}

ExprVec lambda_symmetry_residuals(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L) {
  require_no_tau(X, "check_lambda_symmetry");
  require_dims(sys, X, L, "check_lambda_symmetry");
  const ExprVec F = canonical_equations(sys);
  const ExprVec Phi = X.Phi();
  const ExprVec LPhi = on_shell(sys, L).apply(Phi);
  ExprVec out;
  for (int a = 0; a < sys.dim(); ++a) {
    ExprVec terms{differentiate(Phi[idx(a)], kTime), LPhi[idx(a)]};
    for (int b = 0; b < sys.dim(); ++b) {
      const std::string ub = sys.u(b);
      terms.push_back(mul({F[idx(b)], differentiate(Phi[idx(a)], ub)}));
      terms.push_back(neg(mul({Phi[idx(b)], differentiate(F[idx(a)], ub)})));
    }
    out.push_back(add(std::move(terms)));
  }
  return out;
}

SymmetryVerdict check_lambda_symmetry(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const DomainBox& box, const ZeroConfig& cfg) {
  return verdicts_for(lambda_symmetry_residuals(sys, X, L), box, cfg);
}

std::optional<Expr> scalar_lambda_reduction(const LambdaMatrix& L, const ExprVec& v, const DomainBox& box,
                                            const ZeroConfig& cfg) {
  const ExprVec Lv = L.apply(v);
  std::size_t k = v.size();
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (!is_identically_zero(v[a], box, cfg).holds()) {
      k = a;
      break;
    }
  }
  if (k == v.size()) throw std::invalid_argument("scalar_lambda_reduction: vector field vanishes identically");
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (a == k) continue;
    const Expr cross = add({mul({Lv[a], v[k]}), neg(mul({Lv[k], v[a]}))});
    if (!is_identically_zero(cross, box, cfg).holds()) return std::nullopt;
  }
  return simplify(quot(Lv[k], v[k]));
}

bool LambdaGReport::holds() const { return all_hold(dtg) && all_hold(corollary); }

LambdaGReport check_lambda_constant_G(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const Expr& G, const DomainBox& box, const ZeroConfig& cfg) {
  require_no_tau(X, "check_lambda_constant_G");
  require_dims(sys, X, L, "check_lambda_constant_G");
  const GeneratingFunctionReport gen = generating_function_test(sys, X, box, cfg, G);
  if (!gen.candidate_ok()) throw std::invalid_argument("check_lambda_constant_G: G does not generate X");

  LambdaGReport rep;
  rep.orientation = gen.orientation;
  const LambdaMatrix Ls = on_shell(sys, L);
  const Expr Gdot = total_time_derivative(sys, G);
  rep.Gdot = simplify(Gdot);
  const ExprVec gradGdot = gradient(sys, Gdot);
  const ExprVec gradG = gradient(sys, G);
  const ExprVec rhs = apply_J(Ls.apply(apply_J(gradG)));
  for (int a = 0; a < sys.dim(); ++a)
    rep.dtg.push_back(is_identically_zero(add({gradGdot[idx(a)], neg(rhs[idx(a)])}), box, cfg));

  rep.lambda = scalar_lambda_reduction(Ls, X.Phi(), box, cfg);
  if (rep.lambda) {
    for (int a = 0; a < sys.dim(); ++a)
      rep.corollary.push_back(is_identically_zero(add({gradGdot[idx(a)], mul({*rep.lambda, gradG[idx(a)]})}), box, cfg));
  }
  return rep;
}

LambdaSReport check_lambda_constant_S(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const DomainBox& box, const ZeroConfig& cfg) {
  require_dims(sys, X, L, "check_lambda_constant_S");
  LambdaSReport rep;
  const Expr S = compute_S(sys, X);
  rep.S = simplify(S);
  const Expr Sdot = total_time_derivative(sys, S);
  rep.Sdot = simplify(Sdot);
  const Expr div = divergence(sys, on_shell(sys, L).apply(X.Phi()));
  rep.div_lambda_phi = simplify(div);
  rep.verdict = is_identically_zero(add({Sdot, div}), box, cfg);
  return rep;
}

std::string chart_w_name(int j) { return "w" + std::to_string(j); }

std::vector<std::string> ReductionChart::variables() const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < w.size(); ++j) out.push_back(chart_w_name(static_cast<int>(j) + 1));
  out.emplace_back(kChartZ);
  return out;
}

Bindings ReductionChart::forward() const {
  Bindings b;
  for (std::size_t j = 0; j < w.size(); ++j) b.emplace(chart_w_name(static_cast<int>(j) + 1), w[j]);
  b.emplace(kChartZ, z);
  return b;
}

Expr ReductionChart::to_chart(const Expr& e) const { return simplify(substitute(e, inverse)); }

namespace {

void require_inverse(const PhaseSystem& sys, const ReductionChart& chart) {
  if (static_cast<int>(chart.w.size()) != sys.dim() - 1)
    throw std::invalid_argument("chart needs " + std::to_string(sys.dim() - 1) + " invariants");
  for (const std::string& u : sys.coordinates())
    if (chart.inverse.find(u) == chart.inverse.end()) throw std::invalid_argument("chart inverse misses " + u);
}

void require_chart_only(const PhaseSystem& sys, const Expr& e, const char* what) {
  for (const std::string& u : sys.coordinates())
    if (depends_on(e, u)) throw ChartError(std::string(what) + " still depends on " + u + " after inverse substitution");
}

}  // namespace

bool ChartReport::holds() const { return all_hold(invariance) && rate.holds() && all_hold(roundtrip); }

ChartReport verify_chart(const PhaseSystem& sys, const PhaseVectorField& X, const ReductionChart& chart,
                         const DomainBox& box, const ZeroConfig& cfg) {
  require_no_tau(X, "verify_chart");
  require_inverse(sys, chart);
  ChartReport rep;
  for (const Expr& wj : chart.w) rep.invariance.push_back(is_identically_zero(apply_field(sys, X, wj), box, cfg));
  const Expr Xz = apply_field(sys, X, chart.z);
  rep.kappa = simplify(Xz);
  if (chart.normalized) {
    rep.rate = is_identically_zero(add({Xz, num(-1)}), box, cfg);
  } else {
    // nonvanishing kappa: a zero verdict on kappa is a failure
    const ZeroVerdict z = is_identically_zero(Xz, box, cfg);
    rep.rate = z;
    rep.rate.tag = z.holds() ? ZeroTag::NonZero : ZeroTag::NumericallyZero;
  }
  const Bindings fwd = chart.forward();
  for (const std::string& c : chart.variables()) {
    const Expr back = substitute(fwd.at(c), chart.inverse);
    rep.roundtrip.push_back(is_identically_zero(add({back, neg(var(c))}), box, cfg));
  }
  return rep;
}

bool ReducedSystem::holds() const { return all_hold(law); }

ReducedSystem reduced_system(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                             const ReductionChart& chart, const DomainBox& box, const ZeroConfig& cfg) {
  require_no_tau(X, "reduced_system");
  require_dims(sys, X, L, "reduced_system");
  require_inverse(sys, chart);
  const ExprVec LPhi = on_shell(sys, L).apply(X.Phi());
  auto lambda_component = [&](const Expr& f) {
    ExprVec terms;
    for (int a = 0; a < sys.dim(); ++a) terms.push_back(mul({differentiate(f, sys.u(a)), LPhi[idx(a)]}));
    return chart.to_chart(add(std::move(terms)));
  };

  ReducedSystem red;
  const Expr kappa = apply_field(sys, X, chart.z);
  red.kappa = chart.to_chart(kappa);
  require_chart_only(sys, red.kappa, "X z");
  for (std::size_t j = 0; j < chart.w.size(); ++j) {
    red.W.push_back(chart.to_chart(total_time_derivative(sys, chart.w[j])));
    require_chart_only(sys, red.W.back(), "W");
    red.M.push_back(lambda_component(chart.w[j]));
    require_chart_only(sys, red.M.back(), "M");
  }
  red.Z = chart.to_chart(total_time_derivative(sys, chart.z));
  require_chart_only(sys, red.Z, "Z");
  red.M.push_back(lambda_component(chart.z));
  require_chart_only(sys, red.M.back(), "M");
  const Expr dkappa = chart.to_chart(total_time_derivative(sys, kappa));
  require_chart_only(sys, dkappa, "D_t kappa");

  for (std::size_t j = 0; j < chart.w.size(); ++j)
    red.law.push_back(
        is_identically_zero(add({mul({red.kappa, differentiate(red.W[j], kChartZ)}), neg(red.M[j])}), box, cfg));
  red.law.push_back(is_identically_zero(
      add({mul({red.kappa, differentiate(red.Z, kChartZ)}), neg(dkappa), neg(red.M.back())}), box, cfg));
  for (const Expr& m : red.M) red.z_free.push_back(is_identically_zero(m, box, cfg).holds());
  return red;
}

std::optional<std::pair<ReductionChart, int>> adapt_chart(const ReductionChart& chart, const Expr& G_chart) {
  const Expr g = simplify(G_chart);
  for (std::size_t k = 0; k < chart.w.size(); ++k) {
    const std::string wk = chart_w_name(static_cast<int>(k) + 1);
    const Expr c = simplify(differentiate(g, wk));
    if (!c.is_constant() || c.is_zero()) continue;
    ReductionChart out = chart;
    out.w[k] = simplify(substitute(g, chart.forward()));
    // old w_k = (G - rest)/c, with G now named w_k
    const Expr rest = add({g, neg(mul({c, var(wk)}))});
    const Expr old_wk = quot(add({var(wk), neg(rest)}), c);
    const Bindings repl{{wk, old_wk}};
    for (auto& [name, e] : out.inverse) e = simplify(substitute(e, repl));
    return std::make_pair(std::move(out), static_cast<int>(k));
  }
  return std::nullopt;
}

SeparatedGReport check_separated_G(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                   const ReductionChart& chart, int G_index, const DomainBox& box,
                                   const ZeroConfig& cfg) {
  require_no_tau(X, "check_separated_G");
  require_dims(sys, X, L, "check_separated_G");
  require_inverse(sys, chart);
  if (G_index < 0 || G_index >= static_cast<int>(chart.w.size()))
    throw std::invalid_argument("check_separated_G: G index out of range");
  if (!scalar_lambda_reduction(on_shell(sys, L), X.Phi(), box, cfg))
    throw std::invalid_argument("check_separated_G: Lambda Phi is not a scalar multiple of Phi");

  SeparatedGReport rep;
  rep.Gdot = chart.to_chart(total_time_derivative(sys, chart.w[idx(G_index)]));
  require_chart_only(sys, rep.Gdot, "G-dot");
  std::vector<std::string> others;
  for (std::size_t j = 0; j < chart.w.size(); ++j)
    if (static_cast<int>(j) != G_index) others.push_back(chart_w_name(static_cast<int>(j) + 1));
  others.emplace_back(kChartZ);
  for (const std::string& v : others) rep.dependence.push_back(is_identically_zero(differentiate(rep.Gdot, v), box, cfg));
  if (all_hold(rep.dependence)) {
    Bindings b{{chart_w_name(G_index + 1), var(kGammaVariable)}};
    for (const std::string& v : others) {
      const Interval r = box.get(v);
      b.emplace(v, num(rational_from_double(0.5 * (r.lo + r.hi))));
    }
    rep.gamma = simplify(substitute(rep.Gdot, b));
  }
  return rep;
}

ZeroVerdict verify_time_dependent_integral(const PhaseSystem& sys, const Expr& Gamma, const DomainBox& box,
                                           const ZeroConfig& cfg) {
  return check_first_integral(sys, Gamma, box, cfg);
}

}  // namespace lsym
