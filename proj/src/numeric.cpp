#include "lsym/numeric.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace lsym {

Trajectory integrate_first_order(const FirstOrderRhs& rhs, std::vector<std::string> names,
                                 const std::vector<double>& y0, double t0, double t1, double h, double safety) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("t1 must exceed t0");
  if (y0.size() != names.size()) throw std::invalid_argument("initial state has the wrong size");
  for (double v : y0)
    if (!std::isfinite(v)) throw std::invalid_argument("initial state is not finite");

  Trajectory traj;
  traj.t0 = t0;
  traj.h = h;
  traj.names = std::move(names);
  const std::size_t d = y0.size();
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / h));
  traj.states.reserve((steps + 1) * d);
  traj.states.insert(traj.states.end(), y0.begin(), y0.end());

  std::vector<double> y = y0, k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = traj.time(k);
    auto stage = [&](const std::vector<double>& base, const std::vector<double>& slope, double c,
                     std::vector<double>& out, double ts) {
      for (std::size_t i = 0; i < d; ++i) tmp[i] = base[i] + c * slope[i];
      return rhs(ts, tmp.data(), out.data());
    };
    bool ok = rhs(t, y.data(), k1.data());
    ok = ok && stage(y, k1, 0.5 * h, k2, t + 0.5 * h);
    ok = ok && stage(y, k2, 0.5 * h, k3, t + 0.5 * h);
    ok = ok && stage(y, k3, h, k4, t + h);
    if (!ok) {
      traj.diagnostic = "domain error in the vector field at t=" + std::to_string(t);
      break;
    }
    for (std::size_t i = 0; i < d; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const bool escaped =
        std::any_of(y.begin(), y.end(), [&](double v) { return !std::isfinite(v) || std::fabs(v) > safety; });
    if (escaped) {
      traj.diagnostic = "state left the safety box at t=" + std::to_string(traj.time(k + 1));
      break;
    }
    traj.states.insert(traj.states.end(), y.begin(), y.end());
  }
  return traj;
}

VectorFunction::VectorFunction(const ExprVec& components, std::vector<std::string> variables)
    : variables_(std::move(variables)) {
  std::size_t slots = 0;
  for (const Expr& c : components) {
    tapes_.emplace_back(c, variables_);
    slots = std::max(slots, tapes_.back().size());
  }
  scratch_.resize(slots);
}

bool VectorFunction::operator()(const double* vars, double* out) const {
  for (std::size_t i = 0; i < tapes_.size(); ++i) {
    const EvalResult r = tapes_[i].run(vars, scratch_.data());
    if (r.failed >= 0) return false;
    out[i] = r.value;
  }
  return true;
}

Trajectory integrate_hamiltonian(const PhaseSystem& sys, const std::vector<double>& u0, double t0, double t1,
                                 double h, double safety) {
  std::vector<std::string> vars{kTime};
  const std::vector<std::string> coords = sys.coordinates();
  vars.insert(vars.end(), coords.begin(), coords.end());
  const VectorFunction F(canonical_equations(sys), vars);
  const auto d = static_cast<std::size_t>(sys.dim());
  std::vector<double> point(d + 1);
  auto rhs = [&](double t, const double* y, double* dy) {
    point[0] = t;
    std::copy(y, y + d, point.begin() + 1);
    return F(point.data(), dy);
  };
  Trajectory traj = integrate_first_order(rhs, coords, u0, t0, t1, h, safety);
  traj.provenance = "hamiltonian";
  return traj;
}

EulerLagrangeForm euler_lagrange_form(const LagrangianSystem& lag) {
  EulerLagrangeForm out;
  const auto q = lag.coordinates();
  const auto dq = lag.velocities();
  const auto n = static_cast<std::size_t>(lag.n);
  for (std::size_t i = 0; i < n; ++i) {
    const Expr Li = differentiate(lag.L, dq[i]);
    for (std::size_t j = 0; j < n; ++j) out.hessian.push_back(differentiate(Li, dq[j]));
    ExprVec terms{differentiate(lag.L, q[i]), neg(differentiate(Li, kTime))};
    for (std::size_t j = 0; j < n; ++j) terms.push_back(neg(mul({differentiate(Li, q[j]), var(dq[j])})));
    out.rhs.push_back(add(std::move(terms)));
  }
  return out;
}

Trajectory integrate_euler_lagrange(const LagrangianSystem& lag, const std::vector<double>& q0,
                                    const std::vector<double>& dq0, double t0, double t1, double h, double safety) {
  const auto n = static_cast<std::size_t>(lag.n);
  if (q0.size() != n || dq0.size() != n) throw std::invalid_argument("initial data has the wrong size");
  std::vector<std::string> names = lag.coordinates();
  const auto dq = lag.velocities();
  names.insert(names.end(), dq.begin(), dq.end());
  std::vector<std::string> vars{kTime};
  vars.insert(vars.end(), names.begin(), names.end());

  const EulerLagrangeForm form = euler_lagrange_form(lag);
  const VectorFunction hess(form.hessian, vars);
  const VectorFunction force(form.rhs, vars);
  std::vector<double> point(2 * n + 1), hv(n * n), fv(n);
  auto rhs = [&](double t, const double* y, double* dy) {
    point[0] = t;
    std::copy(y, y + 2 * n, point.begin() + 1);
    if (!hess(point.data(), hv.data()) || !force(point.data(), fv.data())) return false;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        hv.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> b(fv.data(), static_cast<Eigen::Index>(n));
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
    if (!(cond <= kMaxHessianCondition))
      throw IntegrationError("velocity Hessian condition estimate " + std::to_string(cond) + " at t=" +
                             std::to_string(t));
    const Eigen::VectorXd acc = svd.solve(b);
    std::copy(y + n, y + 2 * n, dy);
    for (std::size_t i = 0; i < n; ++i) dy[n + i] = acc(static_cast<Eigen::Index>(i));
    return true;
  };
  std::vector<double> y0 = q0;
  y0.insert(y0.end(), dq0.begin(), dq0.end());
  Trajectory traj = integrate_first_order(rhs, std::move(names), y0, t0, t1, h, safety);
  traj.provenance = "euler-lagrange";
  return traj;
}

std::vector<Series> monitor(const Trajectory& traj, const ExprVec& exprs) {
  std::vector<std::string> vars{kTime};
  vars.insert(vars.end(), traj.names.begin(), traj.names.end());
  for (const Expr& e : exprs)
    for (const std::string& v : free_variables(e))
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw std::invalid_argument("monitored expression " + format(e) + " uses unknown variable " + v);

  std::vector<Series> out;
  std::vector<double> point(vars.size());
  for (const Expr& e : exprs) {
    const Tape tape(e, vars);
    std::vector<double> scratch(tape.size());
    Series s{traj.t0, traj.h, {}, -1};
    for (std::size_t k = 0; k < traj.count(); ++k) {
      point[0] = traj.time(k);
      const auto row = traj.row(k);
      std::copy(row.begin(), row.end(), point.begin() + 1);
      const EvalResult r = tape.run(point.data(), scratch.data());
      if (r.failed >= 0) {
        s.failed_at = static_cast<long>(k);
        break;
      }
      s.values.push_back(r.value);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double compare_with_scalar_ode(const Series& series, const Expr& gamma, double G0, const std::string& G_variable) {
  if (series.values.size() < 2) throw std::invalid_argument("series too short");
  if (series.failed_at >= 0) throw std::invalid_argument("series is truncated");
  for (const std::string& v : free_variables(gamma))
    if (v != kTime && v != G_variable) throw std::invalid_argument("scalar law may only use t and " + G_variable);
  const Tape tape(gamma, {kTime, G_variable});
  std::vector<double> scratch(tape.size());
  auto rhs = [&](double t, const double* y, double* dy) {
    const double point[2] = {t, y[0]};
    const EvalResult r = tape.run(point, scratch.data());
    dy[0] = r.value;
    return r.failed < 0;
  };
  const double t1 = series.t0 + static_cast<double>(series.values.size() - 1) * series.h;
  const Trajectory sol = integrate_first_order(rhs, {G_variable}, {G0}, series.t0, t1, series.h);
  if (sol.count() != series.values.size())
    throw std::invalid_argument("scalar law could not be integrated over the series grid: " + sol.diagnostic);
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.count(); ++k) worst = std::max(worst, std::fabs(series.values[k] - sol.row(k)[0]));
  return worst;
}

std::vector<double> differentiate_series(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 5) throw std::invalid_argument("need at least five points to differentiate a series");
  std::vector<double> d(n);
  for (std::size_t k = 2; k + 2 < n; ++k) d[k] = (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[1] = (v[2] - v[0]) / (2.0 * h);
  d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << kTime;
  for (const std::string& n : traj.names) out << ',' << n;
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < traj.count(); ++k) {
    out << traj.time(k);
    for (double v : traj.row(k)) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace lsym
