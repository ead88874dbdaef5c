#include "lsym/lagrangian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lsym/simplify.hpp"

namespace lsym {

namespace {

std::size_t idx(int a) { return static_cast<std::size_t>(a); }

bool all_hold(const std::vector<ZeroVerdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const ZeroVerdict& v) { return v.holds(); });
}

void require_config(const LagrangianSystem& lag, const ConfigVectorField& XL, const LambdaMatrix& LL) {
  if (static_cast<int>(XL.phi.size()) != lag.n) throw std::invalid_argument("vector field has the wrong number of components");
  if (LL.size() != lag.n) throw std::invalid_argument("Lagrangian Lambda must be " + std::to_string(lag.n) + "x" + std::to_string(lag.n));
}

// D_t f with free velocities
Expr free_dt(int n, const Expr& f) {
  ExprVec terms{differentiate(f, kTime)};
  for (int b = 1; b <= n; ++b) terms.push_back(mul({var(dq_name(b)), differentiate(f, q_name(b))}));
  return add(std::move(terms));
}

// Lambda-prolonged X^(1) applied to f(t, q, dq).
Expr prolonged(int n, const ConfigVectorField& XL, const LambdaMatrix& LL, const Expr& f) {
  const ExprVec Lphi = LL.apply(XL.phi);
  ExprVec terms;
  for (int a = 1; a <= n; ++a) {
    terms.push_back(mul({XL.phi[idx(a - 1)], differentiate(f, q_name(a))}));
    terms.push_back(mul({add({free_dt(n, XL.phi[idx(a - 1)]), Lphi[idx(a - 1)]}), differentiate(f, dq_name(a))}));
  }
  return add(std::move(terms));
}

}  // namespace

void check_regular(const LagrangianSystem& lag, const DomainBox& box, const ZeroConfig& cfg) {
  const auto n = static_cast<std::size_t>(lag.n);
  std::vector<std::string> vars{kTime};
  for (const auto& v : lag.coordinates()) vars.push_back(v);
  for (const auto& v : lag.velocities()) vars.push_back(v);
  const EulerLagrangeForm form = euler_lagrange_form(lag);
  const VectorFunction hess(form.hessian, vars);

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> point(vars.size()), hv(n * n);
  int evaluated = 0;
  for (int s = 0; s < std::max(cfg.samples, 1); ++s) {
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Interval r = box.get(vars[k]);
      point[k] = r.lo + static_cast<double>(rng() >> 11) * 0x1.0p-53 * (r.hi - r.lo);
    }
    if (!hess(point.data(), hv.data())) continue;
    ++evaluated;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        hv.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double det = M.determinant();
    if (!(std::fabs(det) > kMinHessianDeterminant))
      throw RegularityError("Lagrangian is degenerate: velocity Hessian determinant " + std::to_string(det));
  }
  if (evaluated == 0) throw RegularityError("velocity Hessian could not be evaluated on the box");
}

Expr lagrangian_invariance_residual(const LagrangianSystem& lag, const ConfigVectorField& XL, const LambdaMatrix& LL) {
  require_config(lag, XL, LL);
  return prolonged(lag.n, XL, LL, lag.L);
}

ZeroVerdict check_lagrangian_lambda_invariance(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                               const LambdaMatrix& LL, const DomainBox& box, const ZeroConfig& cfg) {
  return is_identically_zero(lagrangian_invariance_residual(lag, XL, LL), box, cfg);
}

ExprVec conjugate_momenta(const LagrangianSystem& lag) {
  ExprVec out;
  for (int a = 1; a <= lag.n; ++a) out.push_back(differentiate(lag.L, dq_name(a)));
  return out;
}

bool LegendreReport::holds() const { return all_hold(momentum) && legendre.holds(); }

Bindings velocity_bindings(const ExprVec& velocity_map) {
  Bindings b;
  for (std::size_t a = 0; a < velocity_map.size(); ++a) b.emplace(dq_name(static_cast<int>(a) + 1), velocity_map[a]);
  return b;
}

LegendreReport verify_legendre(const LagrangianSystem& lag, const ExprVec& velocity_map, const Expr& H,
                               const DomainBox& box, const ZeroConfig& cfg) {
  if (static_cast<int>(velocity_map.size()) != lag.n) throw std::invalid_argument("velocity map has the wrong size");
  check_regular(lag, box, cfg);
  const Bindings b = velocity_bindings(velocity_map);
  const ExprVec mom = conjugate_momenta(lag);
  LegendreReport rep;
  ExprVec pv;
  for (int a = 1; a <= lag.n; ++a) {
    rep.momentum.push_back(is_identically_zero(add({var(p_name(a)), neg(substitute(mom[idx(a - 1)], b))}), box, cfg));
    pv.push_back(mul({var(p_name(a)), velocity_map[idx(a - 1)]}));
  }
  rep.legendre = is_identically_zero(add({H, neg(add(std::move(pv))), substitute(lag.L, b)}), box, cfg);
  return rep;
}

ExtendedField extend_vector_field(const ConfigVectorField& XL) {
  const auto n = static_cast<int>(XL.phi.size());
  ExtendedField out;
  out.X.phi = XL.phi;
  ExprVec g;
  for (int a = 1; a <= n; ++a) {
    ExprVec terms;
    for (int b = 1; b <= n; ++b) terms.push_back(mul({var(p_name(b)), differentiate(XL.phi[idx(b - 1)], q_name(a))}));
    out.X.psi.push_back(neg(add(std::move(terms))));
    g.push_back(mul({XL.phi[idx(a - 1)], var(p_name(a))}));
  }
  out.G = add(std::move(g));
  return out;
}

ExtendedField extend_vector_field_velocity_dependent(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                                     const LambdaMatrix& LL, const ExprVec& velocity_map) {
  require_config(lag, XL, LL);
  if (static_cast<int>(velocity_map.size()) != lag.n)
    throw std::invalid_argument("velocity-dependent extension needs a velocity map");
  ExtendedField out = extend_vector_field(XL);
  const Bindings b = velocity_bindings(velocity_map);
  const int n = lag.n;
  for (int a = 1; a <= n; ++a) {
    ExprVec terms{out.X.psi[idx(a - 1)]};
    for (int be = 0; be < n; ++be)
      for (int ga = 0; ga < n; ++ga)
        terms.push_back(neg(mul({differentiate(LL(be, ga), dq_name(a)), XL.phi[idx(ga)], var(p_name(be + 1))})));
    out.X.psi[idx(a - 1)] = simplify(substitute(add(std::move(terms)), b));
  }
  return out;
}

bool ExtendedLambda::holds() const { return all_hold(constraint); }

ExtendedLambda extend_lambda(const ConfigVectorField& XL, const LambdaMatrix& LL,
                             const std::optional<LambdaMatrix>& candidate_L2, const DomainBox& box,
                             const ZeroConfig& cfg) {
  const auto n = static_cast<int>(XL.phi.size());
  if (LL.size() != n) throw std::invalid_argument("Lagrangian Lambda has the wrong size");
  std::vector<ExprVec> J(idx(n), ExprVec(idx(n)));
  std::vector<std::vector<bool>> Jzero(idx(n), std::vector<bool>(idx(n)));
  for (int g = 0; g < n; ++g)
    for (int b = 0; b < n; ++b) {
      J[idx(g)][idx(b)] = simplify(differentiate(XL.phi[idx(g)], q_name(b + 1)));
      Jzero[idx(g)][idx(b)] = J[idx(g)][idx(b)].is_zero();
    }
  // R_{alpha gamma} = sum_beta LL_{gamma beta} J_{beta alpha}
  auto R = [&](int al, int ga) {
    ExprVec terms;
    for (int b = 0; b < n; ++b) terms.push_back(mul({LL(ga, b), J[idx(b)][idx(al)]}));
    return add(std::move(terms));
  };
  bool lower = true, upper = true, all_zero = true;
  for (int g = 0; g < n; ++g)
    for (int b = 0; b < n; ++b) {
      if (Jzero[idx(g)][idx(b)]) continue;
      all_zero = false;
      if (b > g) lower = false;
      if (b < g) upper = false;
    }

  ExtendedLambda out;
  out.L2 = LambdaMatrix::zero(n, LambdaSide::Lagrangian);
  out.L2.velocity_dependent = LL.velocity_dependent;
  if (all_zero) {
    out.solved = true;
  } else if (lower || upper) {
    out.solved = true;
    for (int al = 0; al < n; ++al) {
      ExprVec x(idx(n));
      for (int step = 0; step < n; ++step) {
        const int g = lower ? step : n - 1 - step;
        ExprVec rem{R(al, g)};
        for (int b = 0; b < n; ++b)
          if (b != g && !Jzero[idx(g)][idx(b)]) rem.push_back(neg(mul({J[idx(g)][idx(b)], x[idx(b)]})));
        x[idx(g)] = Jzero[idx(g)][idx(g)] ? Expr() : simplify(quot(add(std::move(rem)), J[idx(g)][idx(g)]));
      }
      out.L2.rows[idx(al)] = std::move(x);
    }
  } else if (candidate_L2) {
    if (candidate_L2->size() != n) throw std::invalid_argument("Lambda2 candidate has the wrong size");
    out.L2 = *candidate_L2;
  } else {
    throw ExtensionError("Jacobian of phi is not triangular; a Lambda2 candidate is required");
  }

  for (int al = 0; al < n; ++al)
    for (int ga = 0; ga < n; ++ga) {
      ExprVec terms{neg(R(al, ga))};
      for (int b = 0; b < n; ++b) terms.push_back(mul({out.L2(al, b), J[idx(ga)][idx(b)]}));
      out.constraint.push_back(is_identically_zero(add(std::move(terms)), box, cfg));
    }
  if (!out.holds()) throw ExtensionError("Lambda2 does not satisfy the block constraint");

  out.L = LambdaMatrix::zero(2 * n);
  out.L.velocity_dependent = LL.velocity_dependent;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      out.L.rows[idx(a)][idx(b)] = LL(a, b);
      out.L.rows[idx(n + a)][idx(n + b)] = out.L2(a, b);
      ExprVec terms;
      for (int g = 0; g < n; ++g) terms.push_back(mul({var(p_name(g + 1)), differentiate(LL(g, b), q_name(a + 1))}));
      out.L.rows[idx(n + a)][idx(b)] = simplify(neg(add(std::move(terms))));
    }
  return out;
}

double NoetherReport::max_residual() const {
  double m = 0.0;
  for (const NoetherTrace& t : traces) m = std::max(m, t.max_residual);
  return m;
}

bool NoetherReport::holds() const {
  return !traces.empty() && std::all_of(traces.begin(), traces.end(), [&](const NoetherTrace& t) {
    return !t.trajectory.truncated() && t.max_residual <= tol;
  });
}

NoetherReport check_noether_lambda(const LagrangianSystem& lag, const ConfigVectorField& XL, const LambdaMatrix& LL,
                                   const std::vector<InitialCondition>& ics, double t1, double h, double tol) {
  require_config(lag, XL, LL);
  const ExprVec mom = conjugate_momenta(lag);
  const ExprVec Lphi = LL.apply(XL.phi);
  ExprVec g, k;
  for (int a = 0; a < lag.n; ++a) {
    g.push_back(mul({XL.phi[idx(a)], mom[idx(a)]}));
    k.push_back(mul({Lphi[idx(a)], mom[idx(a)]}));
  }
  const ExprVec watched{add(std::move(g)), add(std::move(k))};
  NoetherReport rep;
  rep.tol = tol;
  for (const InitialCondition& ic : ics) {
    NoetherTrace tr;
    tr.trajectory = integrate_euler_lagrange(lag, ic.q, ic.dq, 0.0, t1, h);
    const auto series = monitor(tr.trajectory, watched);
    const std::size_t count = std::min(series[0].values.size(), series[1].values.size());
    if (count < 5 || count < tr.trajectory.count()) {
      tr.max_residual = std::numeric_limits<double>::infinity();
      rep.traces.push_back(std::move(tr));
      continue;
    }
    const std::vector<double> dG = differentiate_series(series[0].values, h);
    for (std::size_t i = 2; i + 2 < count; ++i)
      tr.max_residual = std::max(tr.max_residual, std::fabs(dG[i] + series[1].values[i]));
    rep.traces.push_back(std::move(tr));
  }
  return rep;
}

bool LalaReport::holds() const { return lambda.has_value() && all_hold(corollary); }

LalaReport check_lala_and_corollary3(const ConfigVectorField& XL, const LambdaMatrix& LL, const PhaseVectorField& X,
                                     const LambdaMatrix& L, const DomainBox& box, const ZeroConfig& cfg) {
  LalaReport rep;
  rep.lambda = scalar_lambda_reduction(LL, XL.phi, box, cfg);
  if (!rep.lambda || !rep.lambda->is_constant()) return rep;
  rep.constant = true;
  const ExprVec Phi = X.Phi();
  const ExprVec LPhi = L.apply(Phi);
  for (std::size_t a = 0; a < Phi.size(); ++a)
    rep.corollary.push_back(is_identically_zero(add({LPhi[a], neg(mul({*rep.lambda, Phi[a]}))}), box, cfg));
  return rep;
}

std::string eta_name(int r) { return "eta" + std::to_string(r); }
std::string deta_name(int r) { return "deta" + std::to_string(r); }

bool PartialReductionReport::invariants_ok() const { return all_hold(invariance) && composition.holds(); }

bool PartialReductionReport::euler_lagrange_ok() const {
  return diagnostic.empty() && !el_residuals.empty() &&
         std::all_of(el_residuals.begin(), el_residuals.end(), [&](double r) { return r <= tol; });
}

bool PartialReductionReport::holds() const { return invariants_ok() && theta_condition.holds() && euler_lagrange_ok(); }

ExprVec constrained_euler_lagrange_residual(const LagrangianSystem& lag, const ExprVec& f) {
  const int n = lag.n;
  ExprVec acc;
  for (int j = 0; j < n; ++j) {
    ExprVec terms{differentiate(f[idx(j)], kTime)};
    for (int k = 0; k < n; ++k) terms.push_back(mul({f[idx(k)], differentiate(f[idx(j)], q_name(k + 1))}));
    acc.push_back(add(std::move(terms)));
  }
  const Bindings b = velocity_bindings(f);
  ExprVec out;
  for (int i = 0; i < n; ++i) {
    const Expr Li = differentiate(lag.L, dq_name(i + 1));
    ExprVec terms{differentiate(Li, kTime), neg(differentiate(lag.L, q_name(i + 1)))};
    for (int j = 0; j < n; ++j) {
      terms.push_back(mul({differentiate(Li, q_name(j + 1)), f[idx(j)]}));
      terms.push_back(mul({differentiate(Li, dq_name(j + 1)), acc[idx(j)]}));
    }
    out.push_back(substitute(add(std::move(terms)), b));
  }
  return out;
}

PartialReductionReport partial_reduction_check(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                               const LambdaMatrix& LL, const PartialReductionInput& in,
                                               const DomainBox& box, const ZeroConfig& cfg) {
  require_config(lag, XL, LL);
  const int n = lag.n;
  if (static_cast<int>(in.eta.size()) != n - 1) throw std::invalid_argument("partial reduction needs n-1 invariants eta");
  if (static_cast<int>(in.particular_solution.size()) != n)
    throw std::invalid_argument("particular solution has the wrong size");
  PartialReductionReport rep;
  rep.tol = in.tol;

  const LambdaMatrix prolong_with = scalar_lambda_reduction(LL, XL.phi, box, cfg) ? LL : LambdaMatrix::zero(n);
  Bindings inv{{kTheta, in.theta}};
  for (int r = 1; r < n; ++r) {
    const Expr& eta = in.eta[idx(r - 1)];
    const Expr deta = free_dt(n, eta);
    rep.invariance.push_back(is_identically_zero(prolonged(n, XL, prolong_with, eta), box, cfg));
    rep.invariance.push_back(is_identically_zero(prolonged(n, XL, prolong_with, deta), box, cfg));
    inv.emplace(eta_name(r), eta);
    inv.emplace(deta_name(r), deta);
  }
  rep.invariance.push_back(is_identically_zero(prolonged(n, XL, prolong_with, in.theta), box, cfg));
  rep.composition = is_identically_zero(add({substitute(in.reduced_L, inv), neg(lag.L)}), box, cfg);
  const Expr dtheta = substitute(differentiate(in.reduced_L, kTheta), inv);
  rep.theta_condition = is_identically_zero(substitute(dtheta, velocity_bindings(in.particular_solution)), box, cfg);

  std::vector<std::string> vars{kTime};
  const std::vector<std::string> coords = lag.coordinates();
  vars.insert(vars.end(), coords.begin(), coords.end());
  const VectorFunction f(in.particular_solution, vars);
  std::vector<double> point(vars.size());
  auto rhs = [&](double t, const double* y, double* dy) {
    point[0] = t;
    std::copy(y, y + n, point.begin() + 1);
    return f(point.data(), dy);
  };
  const ExprVec el = constrained_euler_lagrange_residual(lag, in.particular_solution);
  for (const std::vector<double>& q0 : in.initial_q) {
    const Trajectory traj = integrate_first_order(rhs, coords, q0, 0.0, in.t1, in.h);
    if (traj.truncated()) rep.diagnostic = traj.diagnostic;
    double worst = 0.0;
    for (const Series& s : monitor(traj, el)) {
      if (s.failed_at >= 0) rep.diagnostic = "domain error in the Euler-Lagrange residual";
      for (double v : s.values) worst = std::max(worst, std::fabs(v));
    }
    rep.el_residuals.push_back(worst);
  }
  return rep;
}

}  // namespace lsym
