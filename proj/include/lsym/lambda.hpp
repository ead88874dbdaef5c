#pragma once

// Lambda-prolongations, Lambda-symmetries, Lambda-constants of motion and
// reduction in symmetry-adapted charts.

#include <optional>
#include <string>
#include <vector>

#include "lsym/mechanics.hpp"
#include "lsym/symmetry.hpp"
#include "lsym/zero_test.hpp"

namespace lsym {

enum class LambdaSide { Hamiltonian, Lagrangian };

struct LambdaMatrix {
  LambdaSide side = LambdaSide::Hamiltonian;
  std::vector<ExprVec> rows;
  bool velocity_dependent = false;

  static LambdaMatrix zero(int size, LambdaSide side = LambdaSide::Hamiltonian);
  static LambdaMatrix diagonal(const ExprVec& d, LambdaSide side = LambdaSide::Hamiltonian);

  [[nodiscard]] int size() const { return static_cast<int>(rows.size()); }
  [[nodiscard]] const Expr& operator()(int i, int j) const;
  [[nodiscard]] ExprVec apply(const ExprVec& v) const;
  [[nodiscard]] LambdaMatrix substituted(const Bindings& b) const;
};

// Throws std::invalid_argument on a non-square matrix, the wrong size, or a
// velocity symbol in an unflagged matrix.
void validate_lambda(const LambdaMatrix& L, int expected_size, const std::vector<std::string>& velocity_symbols);

std::vector<std::string> phase_velocity_symbols(const PhaseSystem& sys);

// Velocity symbols replaced by the canonical right-hand sides.
LambdaMatrix on_shell(const PhaseSystem& sys, const LambdaMatrix& L);

// u-dot coefficients D_t Phi_a + (Lambda Phi)_a.
ExprVec lambda_prolongation(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L);

// [F,Phi]_a + d Phi_a/dt + (Lambda Phi)_a
ExprVec lambda_symmetry_residuals(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L);

SymmetryVerdict check_lambda_symmetry(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const DomainBox& box, const ZeroConfig& cfg = {});

// Scalar lambda with (L v)_a = lambda v_a for every a, if one exists.
// Throws std::invalid_argument when every component of v vanishes.
std::optional<Expr> scalar_lambda_reduction(const LambdaMatrix& L, const ExprVec& v, const DomainBox& box,
                                            const ZeroConfig& cfg = {});

struct LambdaGReport {
  int orientation = 0;
  Expr Gdot;
  std::vector<ZeroVerdict> dtg;  // grad(G-dot) - J Lambda J grad G
  std::optional<Expr> lambda;
  std::vector<ZeroVerdict> corollary;  // grad(G-dot) + lambda grad G

  [[nodiscard]] bool holds() const;
};

// Throws std::invalid_argument when G does not generate X (up to sign).
LambdaGReport check_lambda_constant_G(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const Expr& G, const DomainBox& box, const ZeroConfig& cfg = {});

struct LambdaSReport {
  Expr S;
  Expr Sdot;
  Expr div_lambda_phi;
  ZeroVerdict verdict;

  [[nodiscard]] bool holds() const { return verdict.holds(); }
};

LambdaSReport check_lambda_constant_S(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                      const DomainBox& box, const ZeroConfig& cfg = {});

std::string chart_w_name(int j);  // 1-based
inline constexpr const char* kChartZ = "z";

struct ReductionChart {
  ExprVec w;  // 2n-1 expressions in (t,q,p)
  Expr z;
  Bindings inverse;  // q_a, p_a -> expressions in (t,w,z)
  // When false, X z is only required to be nonvanishing; kappa = X z enters the reduction law.
  bool normalized = true;

  [[nodiscard]] std::vector<std::string> variables() const;
  // Chart coordinate -> expression in (t,q,p).
  [[nodiscard]] Bindings forward() const;
  [[nodiscard]] Expr to_chart(const Expr& e) const;
};

struct ChartReport {
  std::vector<ZeroVerdict> invariance;  // X w_j
  ZeroVerdict rate;                     // X z - 1, or kappa nonvanishing
  Expr kappa;
  std::vector<ZeroVerdict> roundtrip;   // w_j(inverse) - w_j, z(inverse) - z

  [[nodiscard]] bool holds() const;
};

// Throws std::invalid_argument when the inverse misses a phase variable.
ChartReport verify_chart(const PhaseSystem& sys, const PhaseVectorField& X, const ReductionChart& chart,
                         const DomainBox& box, const ZeroConfig& cfg = {});

struct ReducedSystem {
  ExprVec W;   // time derivatives of w_j in chart variables
  Expr Z;
  ExprVec M;   // 2n entries, last one for z
  Expr kappa;  // X z in chart variables
  std::vector<ZeroVerdict> law;  // kappa dW_j/dz - M_j, kappa dZ/dz - D_t kappa - M_2n
  std::vector<bool> z_free;      // M_a vanishes

  [[nodiscard]] bool holds() const;
};

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ReducedSystem reduced_system(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                             const ReductionChart& chart, const DomainBox& box, const ZeroConfig& cfg = {});

// Replaces the w-coordinate in which G (given in chart variables) is affine
// with a constant coefficient by G itself. Returns the new chart and the
// 0-based index of G, or nullopt if no such coordinate exists.
std::optional<std::pair<ReductionChart, int>> adapt_chart(const ReductionChart& chart, const Expr& G_chart);

struct SeparatedGReport {
  Expr Gdot;                             // in chart variables
  std::vector<ZeroVerdict> dependence;   // d(G-dot)/dw_l for l != G, d/dz
  std::optional<Expr> gamma;             // in (t, G)

  [[nodiscard]] bool holds() const { return gamma.has_value(); }
};

inline constexpr const char* kGammaVariable = "G";

// Requires a scalar lambda for (L, X); throws std::invalid_argument otherwise.
SeparatedGReport check_separated_G(const PhaseSystem& sys, const PhaseVectorField& X, const LambdaMatrix& L,
                                   const ReductionChart& chart, int G_index, const DomainBox& box,
                                   const ZeroConfig& cfg = {});

ZeroVerdict verify_time_dependent_integral(const PhaseSystem& sys, const Expr& Gamma, const DomainBox& box,
                                           const ZeroConfig& cfg = {});

}  // namespace lsym
