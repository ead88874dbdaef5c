#pragma once

// Exact Lie point symmetries of the canonical equations: the symmetry
// condition, the divergence quantity S, generating functions and the
// three-way case split.

#include <optional>
#include <stdexcept>
#include <vector>

#include "lsym/mechanics.hpp"
#include "lsym/zero_test.hpp"

namespace lsym {

struct SymmetryVerdict {
  std::vector<ZeroVerdict> components;

  [[nodiscard]] bool holds() const;
  // Component with the largest scaled residual.
  [[nodiscard]] const ZeroVerdict& worst() const;
};

SymmetryVerdict verdicts_for(const ExprVec& residuals, const DomainBox& box, const ZeroConfig& cfg);

// Left-hand sides of the explicit symmetry conditions, on-shell.
ExprVec point_symmetry_residuals(const PhaseSystem& sys, const PhaseVectorField& X);

SymmetryVerdict check_point_symmetry(const PhaseSystem& sys, const PhaseVectorField& X, const DomainBox& box,
                                     const ZeroConfig& cfg = {});

// div Phi - D_t tau + d tau/dt
Expr compute_S(const PhaseSystem& sys, const PhaseVectorField& X);

ZeroVerdict check_first_integral(const PhaseSystem& sys, const Expr& f, const DomainBox& box,
                                 const ZeroConfig& cfg = {});

class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratingFunctionReport {
  PhaseVectorField evolutionary;
  bool closedness_checked = false;
  std::vector<ZeroVerdict> closedness;
  bool candidate_checked = false;
  // +1 if G generates X, -1 if -G does, 0 if neither.
  int orientation = 0;
  std::vector<ZeroVerdict> candidate;
  bool criterion_checked = false;
  std::vector<ZeroVerdict> criterion;  // components of grad(D_t G)

  [[nodiscard]] bool closed() const;
  [[nodiscard]] bool candidate_ok() const { return candidate_checked && orientation != 0; }
  [[nodiscard]] bool criterion_ok() const;
  // A verified G exists and D_t G depends on t at most.
  [[nodiscard]] bool passes() const;
};

// Pairs of closedness conditions for tau = tau(t); each entry is lhs - rhs.
ExprVec closedness_residuals(const PhaseSystem& sys, const PhaseVectorField& X);

GeneratingFunctionReport generating_function_test(const PhaseSystem& sys, const PhaseVectorField& X,
                                                  const DomainBox& box, const ZeroConfig& cfg,
                                                  const std::optional<Expr>& candidate = std::nullopt);

enum class SymmetryCase { CaseI_GeneratingFunction, CaseII_SZeroNoG, CaseIII_SNonconstant };

std::string_view to_string(SymmetryCase c);

struct CaseClassification {
  SymmetryCase tag = SymmetryCase::CaseII_SZeroNoG;
  Expr S;
  std::optional<Expr> G;
  GeneratingFunctionReport generating;
  std::vector<ZeroVerdict> s_constancy;  // dS/du_a and dS/dt
  std::optional<ZeroVerdict> s_first_integral;
};

class NotASymmetry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CaseClassification classify_symmetry_case(const PhaseSystem& sys, const PhaseVectorField& X,
                                          const DomainBox& box, const ZeroConfig& cfg,
                                          const std::optional<Expr>& candidate = std::nullopt);

}  // namespace lsym
