#include "lsym/mechanics.hpp"

#include <stdexcept>

#include "lsym/simplify.hpp"

namespace lsym {

std::string q_name(int i) { return "q" + std::to_string(i); }
std::string p_name(int i) { return "p" + std::to_string(i); }
std::string dq_name(int i) { return "dq" + std::to_string(i); }
std::string dp_name(int i) { return "dp" + std::to_string(i); }

std::string PhaseSystem::u(int a) const { return a < n ? q_name(a + 1) : p_name(a - n + 1); }
std::string PhaseSystem::du(int a) const { return a < n ? dq_name(a + 1) : dp_name(a - n + 1); }

std::vector<std::string> PhaseSystem::coordinates() const {
  std::vector<std::string> out;
  for (int a = 0; a < dim(); ++a) out.push_back(u(a));
  return out;
}

ExprVec PhaseVectorField::Phi() const {
  ExprVec out = phi;
  out.insert(out.end(), psi.begin(), psi.end());
  return out;
}

PhaseVectorField PhaseVectorField::from_Phi(const ExprVec& Phi, Expr tau) {
  if (Phi.size() % 2 != 0) throw std::invalid_argument("phase vector of odd length");
  const auto n = static_cast<std::ptrdiff_t>(Phi.size() / 2);
  return {ExprVec(Phi.begin(), Phi.begin() + n), ExprVec(Phi.begin() + n, Phi.end()), std::move(tau)};
}

ExprVec canonical_equations(const PhaseSystem& sys) {
  ExprVec F;
  for (int i = 1; i <= sys.n; ++i) F.push_back(differentiate(sys.H, p_name(i)));
  for (int i = 1; i <= sys.n; ++i) F.push_back(neg(differentiate(sys.H, q_name(i))));
  return F;
}

Bindings on_shell_bindings(const PhaseSystem& sys) {
  Bindings b;
  const ExprVec F = canonical_equations(sys);
  for (int a = 0; a < sys.dim(); ++a) b.emplace(sys.du(a), F[static_cast<std::size_t>(a)]);
  return b;
}

Expr poisson_bracket(const PhaseSystem& sys, const Expr& f, const Expr& g) {
  ExprVec terms;
  for (int i = 1; i <= sys.n; ++i) {
    terms.push_back(mul({differentiate(f, q_name(i)), differentiate(g, p_name(i))}));
    terms.push_back(neg(mul({differentiate(f, p_name(i)), differentiate(g, q_name(i))})));
  }
  return add(std::move(terms));
}

Expr total_time_derivative(const PhaseSystem& sys, const Expr& f) {
  return add({differentiate(f, kTime), poisson_bracket(sys, f, sys.H)});
}

Expr apply_field(const PhaseSystem& sys, const PhaseVectorField& X, const Expr& f) {
  const ExprVec Phi = X.Phi();
  ExprVec terms;
  for (int a = 0; a < sys.dim(); ++a)
    terms.push_back(mul({Phi[static_cast<std::size_t>(a)], differentiate(f, sys.u(a))}));
  terms.push_back(mul({X.tau, differentiate(f, kTime)}));
  return add(std::move(terms));
}

Expr divergence(const PhaseSystem& sys, const ExprVec& V) {
  ExprVec terms;
  for (int a = 0; a < sys.dim(); ++a) terms.push_back(differentiate(V.at(static_cast<std::size_t>(a)), sys.u(a)));
  return add(std::move(terms));
}

ExprVec gradient(const PhaseSystem& sys, const Expr& f) {
  ExprVec out;
  for (int a = 0; a < sys.dim(); ++a) out.push_back(differentiate(f, sys.u(a)));
  return out;
}

PhaseVectorField hamiltonian_vector_field(const PhaseSystem& sys, const Expr& K) {
  PhaseVectorField X;
  for (int i = 1; i <= sys.n; ++i) X.phi.push_back(differentiate(K, p_name(i)));
  for (int i = 1; i <= sys.n; ++i) X.psi.push_back(neg(differentiate(K, q_name(i))));
  return X;
}

namespace {

void require_no_tau(const PhaseVectorField& X, const char* what) {
  if (!X.tau.is_zero() && !simplifies_to_zero(X.tau))
    throw std::invalid_argument(std::string(what) + ": vector field has nonzero tau");
}

}  // namespace

PhaseVectorField lie_bracket(const PhaseSystem& sys, const PhaseVectorField& X, const PhaseVectorField& Y) {
  require_no_tau(X, "lie_bracket");
  require_no_tau(Y, "lie_bracket");
  const ExprVec A = X.Phi();
  const ExprVec B = Y.Phi();
  ExprVec out;
  for (int a = 0; a < sys.dim(); ++a) {
    ExprVec terms;
    for (int b = 0; b < sys.dim(); ++b) {
      const auto ub = sys.u(b);
      terms.push_back(mul({A[static_cast<std::size_t>(b)], differentiate(B[static_cast<std::size_t>(a)], ub)}));
      terms.push_back(neg(mul({B[static_cast<std::size_t>(b)], differentiate(A[static_cast<std::size_t>(a)], ub)})));
    }
    out.push_back(add(std::move(terms)));
  }
  return PhaseVectorField::from_Phi(out);
}

PhaseVectorField evolutionary_form(const PhaseSystem& sys, const PhaseVectorField& X) {
  if (X.tau.is_zero()) return {X.phi, X.psi, Expr()};
  PhaseVectorField out;
  for (int i = 1; i <= sys.n; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    out.phi.push_back(add({X.phi[k], neg(mul({X.tau, differentiate(sys.H, p_name(i))}))}));
    out.psi.push_back(add({X.psi[k], mul({X.tau, differentiate(sys.H, q_name(i))})}));
  }
  return out;
}

PhaseVectorField scale_field(const PhaseVectorField& X, const Expr& K) {
  require_no_tau(X, "scale_field");
  PhaseVectorField out;
  for (const Expr& c : X.phi) out.phi.push_back(mul({K, c}));
  for (const Expr& c : X.psi) out.psi.push_back(mul({K, c}));
  return out;
}

std::vector<std::string> LagrangianSystem::coordinates() const {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(q_name(i));
  return out;
}

std::vector<std::string> LagrangianSystem::velocities() const {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(dq_name(i));
  return out;
}

}  // namespace lsym
