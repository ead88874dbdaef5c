#pragma once

// Phase space, canonical equations, brackets and vector fields.
//
// Variables are named t, q1..qn, p1..pn; velocity symbols dq1..dqn, dp1..dpn.
// Phase indices a = 0..2n-1 run over (q1..qn, p1..pn).

#include <string>
#include <vector>

#include "lsym/expr.hpp"

namespace lsym {

inline constexpr const char* kTime = "t";

std::string q_name(int i);   // 1-based
std::string p_name(int i);
std::string dq_name(int i);
std::string dp_name(int i);

struct PhaseSystem {
  int n = 1;
  Expr H;

  [[nodiscard]] int dim() const { return 2 * n; }
  // Phase coordinate a (0-based over q then p).
  [[nodiscard]] std::string u(int a) const;
  [[nodiscard]] std::string du(int a) const;
  [[nodiscard]] std::vector<std::string> coordinates() const;
};

struct PhaseVectorField {
  ExprVec phi;
  ExprVec psi;
  Expr tau;

  // (phi, psi) concatenated.
  [[nodiscard]] ExprVec Phi() const;
  static PhaseVectorField from_Phi(const ExprVec& Phi, Expr tau = Expr());
};

// F = J grad H = (dH/dp, -dH/dq).
ExprVec canonical_equations(const PhaseSystem& sys);

// Bindings du_a -> F_a used for on-shell substitution.
Bindings on_shell_bindings(const PhaseSystem& sys);

Expr poisson_bracket(const PhaseSystem& sys, const Expr& f, const Expr& g);

// df/dt + {f, H}
Expr total_time_derivative(const PhaseSystem& sys, const Expr& f);

// X f = phi.grad_q f + psi.grad_p f + tau df/dt
Expr apply_field(const PhaseSystem& sys, const PhaseVectorField& X, const Expr& f);

// sum_a dV_a/du_a
Expr divergence(const PhaseSystem& sys, const ExprVec& V);

ExprVec gradient(const PhaseSystem& sys, const Expr& f);

PhaseVectorField hamiltonian_vector_field(const PhaseSystem& sys, const Expr& K);

// (X.grad)Y - (Y.grad)X over the 2n phase components. Both fields need tau = 0.
PhaseVectorField lie_bracket(const PhaseSystem& sys, const PhaseVectorField& X, const PhaseVectorField& Y);

PhaseVectorField evolutionary_form(const PhaseSystem& sys, const PhaseVectorField& X);

// K X; requires tau = 0.
PhaseVectorField scale_field(const PhaseVectorField& X, const Expr& K);

// First-order Lagrangian L(t, q1..qn, dq1..dqn).
struct LagrangianSystem {
  int n = 1;
  Expr L;

  [[nodiscard]] std::vector<std::string> coordinates() const;
  [[nodiscard]] std::vector<std::string> velocities() const;
};

// phi_alpha(t, q) d/dq_alpha
struct ConfigVectorField {
  ExprVec phi;
};

}  // namespace lsym
