#pragma once

// Fixed-step classical RK4 integration of Hamiltonian and Euler-Lagrange
// flows, monitoring of expressions along trajectories, and CSV export.

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsym/evaluate.hpp"
#include "lsym/mechanics.hpp"

namespace lsym {

inline constexpr double kSafetyBox = 1e6;
inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kMaxHessianCondition = 1e12;

struct Trajectory {
  double t0 = 0.0;
  double h = kDefaultStep;
  std::vector<std::string> names;  // state variable names
  std::vector<double> states;      // row-major, count() x names.size()
  std::string provenance;
  int order = 4;
  // Empty unless integration stopped early.
  std::string diagnostic;

  [[nodiscard]] std::size_t dim() const { return names.size(); }
  [[nodiscard]] std::size_t count() const { return dim() == 0 ? 0 : states.size() / dim(); }
  [[nodiscard]] double time(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
  [[nodiscard]] std::span<const double> row(std::size_t k) const { return {states.data() + k * dim(), dim()}; }
  [[nodiscard]] bool truncated() const { return !diagnostic.empty(); }
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes dy/dt at (t, y) into dy; returns false on a domain error.
using FirstOrderRhs = std::function<bool(double t, const double* y, double* dy)>;

// Classical RK4 on the grid t0 + k h, k = 0..round((t1-t0)/h).
Trajectory integrate_first_order(const FirstOrderRhs& rhs, std::vector<std::string> names,
                                 const std::vector<double>& y0, double t0, double t1, double h,
                                 double safety = kSafetyBox);

// Compiled vector of expressions over a fixed variable list.
class VectorFunction {
 public:
  VectorFunction(const ExprVec& components, std::vector<std::string> variables);

  [[nodiscard]] std::size_t size() const { return tapes_.size(); }
  [[nodiscard]] const std::vector<std::string>& variables() const { return variables_; }
  // Returns false if any component fails.
  bool operator()(const double* vars, double* out) const;

 private:
  std::vector<std::string> variables_;
  std::vector<Tape> tapes_;
  mutable std::vector<double> scratch_;
};

// State (q1..qn, p1..pn).
Trajectory integrate_hamiltonian(const PhaseSystem& sys, const std::vector<double>& u0, double t0, double t1,
                                 double h = kDefaultStep, double safety = kSafetyBox);

// Symbolic accelerations system: Hessian (n x n, row-major) and right-hand side.
struct EulerLagrangeForm {
  ExprVec hessian;
  ExprVec rhs;
};
EulerLagrangeForm euler_lagrange_form(const LagrangianSystem& lag);

// State (q1..qn, dq1..dqn). Throws IntegrationError if the velocity Hessian
// becomes ill-conditioned.
Trajectory integrate_euler_lagrange(const LagrangianSystem& lag, const std::vector<double>& q0,
                                    const std::vector<double>& dq0, double t0, double t1, double h = kDefaultStep,
                                    double safety = kSafetyBox);

struct Series {
  double t0 = 0.0;
  double h = kDefaultStep;
  std::vector<double> values;
  // Grid index of the first domain error, or -1.
  long failed_at = -1;
};

// Throws std::invalid_argument if an expression uses a variable outside t and the state.
std::vector<Series> monitor(const Trajectory& traj, const ExprVec& exprs);

// Integrates dG/dt = gamma(t, G) from G0 on the series grid and returns the
// largest |series - solution|.
double compare_with_scalar_ode(const Series& series, const Expr& gamma, double G0, const std::string& G_variable = "G");

// 5-point central differences; the first and last two points use one-sided
// 3-point stencils.
std::vector<double> differentiate_series(const std::vector<double>& values, double h);

void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace lsym
