#pragma once

// Lambda-invariant first-order Lagrangians and their passage to phase space.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsym/lambda.hpp"
#include "lsym/mechanics.hpp"
#include "lsym/numeric.hpp"
#include "lsym/zero_test.hpp"

namespace lsym {

class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMinHessianDeterminant = 1e-8;

// Samples the velocity Hessian over (t, q, dq) in the box; throws
// RegularityError if |det| <= 1e-8 at a sample point.
void check_regular(const LagrangianSystem& lag, const DomainBox& box, const ZeroConfig& cfg = {});

// phi.grad_q L + (D_t phi + Lambda phi).grad_dq L with free velocities.
Expr lagrangian_invariance_residual(const LagrangianSystem& lag, const ConfigVectorField& XL, const LambdaMatrix& LL);

ZeroVerdict check_lagrangian_lambda_invariance(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                               const LambdaMatrix& LL, const DomainBox& box,
                                               const ZeroConfig& cfg = {});

ExprVec conjugate_momenta(const LagrangianSystem& lag);

struct LegendreReport {
  std::vector<ZeroVerdict> momentum;  // p_alpha - dL/ddq_alpha at dq = v
  ZeroVerdict legendre;               // H - (p.v - L)

  [[nodiscard]] bool holds() const;
};

Bindings velocity_bindings(const ExprVec& velocity_map);

LegendreReport verify_legendre(const LagrangianSystem& lag, const ExprVec& velocity_map, const Expr& H,
                               const DomainBox& box, const ZeroConfig& cfg = {});

struct ExtendedField {
  PhaseVectorField X;
  Expr G;  // phi_alpha p_alpha
};

ExtendedField extend_vector_field(const ConfigVectorField& XL);

// Throws std::invalid_argument when the velocity map is missing.
ExtendedField extend_vector_field_velocity_dependent(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                                     const LambdaMatrix& LL, const ExprVec& velocity_map);

struct ExtendedLambda {
  LambdaMatrix L;   // 2n x 2n
  LambdaMatrix L2;  // lower-right block
  bool solved = false;  // L2 came from a diagonal or triangular solve
  std::vector<ZeroVerdict> constraint;

  [[nodiscard]] bool holds() const;
};

class ExtensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ExtensionError when no candidate is available but one is needed, or
// when the block constraint fails.
ExtendedLambda extend_lambda(const ConfigVectorField& XL, const LambdaMatrix& LL,
                             const std::optional<LambdaMatrix>& candidate_L2, const DomainBox& box,
                             const ZeroConfig& cfg = {});

struct InitialCondition {
  std::vector<double> q;
  std::vector<double> dq;
};

struct NoetherTrace {
  Trajectory trajectory;
  double max_residual = 0.0;
};

struct NoetherReport {
  std::vector<NoetherTrace> traces;
  double tol = 1e-5;

  [[nodiscard]] double max_residual() const;
  [[nodiscard]] bool holds() const;
};

// d/dt(phi.p) + (Lambda phi).p along Euler-Lagrange trajectories.
NoetherReport check_noether_lambda(const LagrangianSystem& lag, const ConfigVectorField& XL, const LambdaMatrix& LL,
                                   const std::vector<InitialCondition>& ics, double t1, double h = kDefaultStep,
                                   double tol = 1e-5);

struct LalaReport {
  std::optional<Expr> lambda;
  bool constant = false;
  std::vector<ZeroVerdict> corollary;  // (Lambda Phi - c Phi)_a on the extended pair

  [[nodiscard]] bool holds() const;
};

LalaReport check_lala_and_corollary3(const ConfigVectorField& XL, const LambdaMatrix& LL, const PhaseVectorField& X,
                                     const LambdaMatrix& L, const DomainBox& box, const ZeroConfig& cfg = {});

std::string eta_name(int r);   // 1-based
std::string deta_name(int r);
inline constexpr const char* kTheta = "theta";

struct PartialReductionInput {
  ExprVec eta;   // n-1 invariants in (t, q)
  Expr theta;    // in (t, q, dq)
  Expr reduced_L;  // in t, eta_r, deta_r, theta
  ExprVec particular_solution;  // dq_alpha = f_alpha(t, q)
  std::vector<std::vector<double>> initial_q;
  double t1 = 1.0;
  double h = kDefaultStep;
  double tol = 1e-5;
};

struct PartialReductionReport {
  std::vector<ZeroVerdict> invariance;  // eta_r, eta-dot_r, theta
  ZeroVerdict composition;              // reduced_L(invariants) - L
  ZeroVerdict theta_condition;          // dL~/dtheta on the particular solution
  std::vector<double> el_residuals;     // per initial condition
  std::string diagnostic;
  double tol = 1e-5;

  [[nodiscard]] bool invariants_ok() const;
  [[nodiscard]] bool euler_lagrange_ok() const;
  [[nodiscard]] bool holds() const;
};

// Euler-Lagrange residual with dq = f and ddq = D_t f, as expressions in (t, q).
ExprVec constrained_euler_lagrange_residual(const LagrangianSystem& lag, const ExprVec& f);

PartialReductionReport partial_reduction_check(const LagrangianSystem& lag, const ConfigVectorField& XL,
                                               const LambdaMatrix& LL, const PartialReductionInput& in,
                                               const DomainBox& box, const ZeroConfig& cfg = {});

}  // namespace lsym
