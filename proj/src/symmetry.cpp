#include "lsym/symmetry.hpp"

#include <algorithm>

#include "lsym/simplify.hpp"

namespace lsym {

bool SymmetryVerdict::holds() const {
  return std::all_of(components.begin(), components.end(), [](const ZeroVerdict& v) { return v.holds(); });
}

const ZeroVerdict& SymmetryVerdict::worst() const {
  static const ZeroVerdict proven{};
  const ZeroVerdict* w = &proven;
  for (const ZeroVerdict& v : components) {
    const bool worse = (v.tag == ZeroTag::NonZero && w->tag != ZeroTag::NonZero) ||
                       ((v.tag == ZeroTag::NonZero) == (w->tag == ZeroTag::NonZero) &&
                        v.max_scaled_residual > w->max_scaled_residual);
    if (worse) w = &v;
  }
  return *w;
}

SymmetryVerdict verdicts_for(const ExprVec& residuals, const DomainBox& box, const ZeroConfig& cfg) {
  SymmetryVerdict out;
  for (const Expr& r : residuals) out.components.push_back(is_identically_zero(r, box, cfg));
  return out;
}

namespace {

// D_t f = df/dt + F.grad f
Expr on_shell_dt(const PhaseSystem& sys, const ExprVec& F, const Expr& f) {
  ExprVec terms{differentiate(f, kTime)};
  for (int a = 0; a < sys.dim(); ++a) terms.push_back(mul({F[static_cast<std::size_t>(a)], differentiate(f, sys.u(a))}));
  return add(std::move(terms));
}

}  // namespace

ExprVec point_symmetry_residuals(const PhaseSystem& sys, const PhaseVectorField& X) {
  const ExprVec F = canonical_equations(sys);
  const Expr dtau = on_shell_dt(sys, F, X.tau);
  const int n = sys.n;
  ExprVec out;
  for (int al = 1; al <= n; ++al) {
    const auto k = static_cast<std::size_t>(al - 1);
    const Expr Hp = differentiate(sys.H, p_name(al));
    ExprVec terms{on_shell_dt(sys, F, X.phi[k]), neg(mul({Hp, dtau}))};
    for (int be = 1; be <= n; ++be) {
      const auto j = static_cast<std::size_t>(be - 1);
      terms.push_back(neg(mul({X.phi[j], differentiate(Hp, q_name(be))})));
      terms.push_back(neg(mul({X.psi[j], differentiate(Hp, p_name(be))})));
    }
    terms.push_back(neg(mul({X.tau, differentiate(Hp, kTime)})));
    out.push_back(add(std::move(terms)));
  }
  for (int al = 1; al <= n; ++al) {
    const auto k = static_cast<std::size_t>(al - 1);
    const Expr Hq = differentiate(sys.H, q_name(al));
    ExprVec terms{on_shell_dt(sys, F, X.psi[k]), mul({Hq, dtau})};
    for (int be = 1; be <= n; ++be) {
      const auto j = static_cast<std::size_t>(be - 1);
      terms.push_back(mul({X.phi[j], differentiate(Hq, q_name(be))}));
      terms.push_back(mul({X.psi[j], differentiate(Hq, p_name(be))}));
    }
    terms.push_back(mul({X.tau, differentiate(Hq, kTime)}));
    out.push_back(add(std::move(terms)));
  }
  return out;
}

SymmetryVerdict check_point_symmetry(const PhaseSystem& sys, const PhaseVectorField& X, const DomainBox& box,
                                     const ZeroConfig& cfg) {
  return verdicts_for(point_symmetry_residuals(sys, X), box, cfg);
}

Expr compute_S(const PhaseSystem& sys, const PhaseVectorField& X) {
  const ExprVec F = canonical_equations(sys);
  return add({divergence(sys, X.Phi()), neg(on_shell_dt(sys, F, X.tau)), differentiate(X.tau, kTime)});
}

ZeroVerdict check_first_integral(const PhaseSystem& sys, const Expr& f, const DomainBox& box, const ZeroConfig& cfg) {
  return is_identically_zero(total_time_derivative(sys, f), box, cfg);
}

bool GeneratingFunctionReport::closed() const {
  return closedness_checked &&
         std::all_of(closedness.begin(), closedness.end(), [](const ZeroVerdict& v) { return v.holds(); });
}

bool GeneratingFunctionReport::criterion_ok() const {
  return criterion_checked &&
         std::all_of(criterion.begin(), criterion.end(), [](const ZeroVerdict& v) { return v.holds(); });
}

bool GeneratingFunctionReport::passes() const {
  const bool structure = closedness_checked ? closed() : true;
  return structure && candidate_ok() && criterion_ok();
}

ExprVec closedness_residuals(const PhaseSystem& sys, const PhaseVectorField& X) {
  ExprVec out;
  const int n = sys.n;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      const auto ia = static_cast<std::size_t>(a - 1);
      const auto ib = static_cast<std::size_t>(b - 1);
      if (a < b) {
        out.push_back(add({differentiate(X.phi[ia], p_name(b)), neg(differentiate(X.phi[ib], p_name(a)))}));
        out.push_back(add({differentiate(X.psi[ia], q_name(b)), neg(differentiate(X.psi[ib], q_name(a)))}));
      }
      out.push_back(add({differentiate(X.phi[ia], q_name(b)), differentiate(X.psi[ib], p_name(a))}));
    }
  }
  return out;
}

GeneratingFunctionReport generating_function_test(const PhaseSystem& sys, const PhaseVectorField& X,
                                                  const DomainBox& box, const ZeroConfig& cfg,
                                                  const std::optional<Expr>& candidate) {
  GeneratingFunctionReport rep;
  rep.evolutionary = evolutionary_form(sys, X);
  bool tau_phase_dependent = false;
  for (int a = 0; a < sys.dim(); ++a)
    if (!simplifies_to_zero(differentiate(X.tau, sys.u(a)))) tau_phase_dependent = true;
  if (tau_phase_dependent && !candidate)
    throw UnsupportedConfiguration("tau depends on phase variables; a candidate generating function is required");
  if (!tau_phase_dependent) {
    rep.closedness_checked = true;
    for (const Expr& r : closedness_residuals(sys, X)) rep.closedness.push_back(is_identically_zero(r, box, cfg));
  }
  if (!candidate) return rep;

  rep.candidate_checked = true;
  auto residuals = [&](const Expr& G) {
    ExprVec out;
    for (int i = 1; i <= sys.n; ++i) {
      const auto k = static_cast<std::size_t>(i - 1);
      out.push_back(add({differentiate(G, p_name(i)), neg(rep.evolutionary.phi[k])}));
    }
    for (int i = 1; i <= sys.n; ++i) {
      const auto k = static_cast<std::size_t>(i - 1);
      out.push_back(add({differentiate(G, q_name(i)), rep.evolutionary.psi[k]}));
    }
    return out;
  };
  for (int sign : {1, -1}) {
    const Expr G = sign > 0 ? *candidate : neg(*candidate);
    SymmetryVerdict v = verdicts_for(residuals(G), box, cfg);
    if (sign > 0 || v.holds()) rep.candidate = v.components;
    if (v.holds()) {
      rep.orientation = sign;
      break;
    }
  }
  if (!rep.candidate_ok() || (rep.closedness_checked && !rep.closed())) return rep;

  rep.criterion_checked = true;
  const Expr G = rep.orientation > 0 ? *candidate : neg(*candidate);
  const Expr dG = total_time_derivative(sys, G);
  for (const Expr& c : gradient(sys, dG)) rep.criterion.push_back(is_identically_zero(c, box, cfg));
  return rep;
}

std::string_view to_string(SymmetryCase c) {
  switch (c) {
    case SymmetryCase::CaseI_GeneratingFunction: return "CaseI_GeneratingFunction";
    case SymmetryCase::CaseII_SZeroNoG: return "CaseII_SZeroNoG";
    case SymmetryCase::CaseIII_SNonconstant: return "CaseIII_SNonconstant";
  }
  return "?";
}

CaseClassification classify_symmetry_case(const PhaseSystem& sys, const PhaseVectorField& X,
                                          const DomainBox& box, const ZeroConfig& cfg,
                                          const std::optional<Expr>& candidate) {
  if (!check_point_symmetry(sys, X, box, cfg).holds()) throw NotASymmetry("vector field is not a symmetry");
  CaseClassification out;
  out.S = simplify(compute_S(sys, X));
  out.generating = generating_function_test(sys, X, box, cfg, candidate);
  if (out.generating.passes()) {
    out.tag = SymmetryCase::CaseI_GeneratingFunction;
    out.G = out.generating.orientation > 0 ? *candidate : neg(*candidate);
    return out;
  }
  bool constant = true;
  ExprVec derivs = gradient(sys, out.S);
  derivs.push_back(differentiate(out.S, kTime));
  for (const Expr& d : derivs) {
    out.s_constancy.push_back(is_identically_zero(d, box, cfg));
    constant = constant && out.s_constancy.back().holds();
  }
  if (constant) {
    out.tag = SymmetryCase::CaseII_SZeroNoG;
    return out;
  }
  out.tag = SymmetryCase::CaseIII_SNonconstant;
  out.s_first_integral = check_first_integral(sys, out.S, box, cfg);
  return out;
}

}  // namespace lsym
