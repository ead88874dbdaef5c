#pragma once

// Problem files: JSON descriptions of a system, a vector field and the data
// the checks need. Expressions are strings in the parser grammar.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsym/lambda.hpp"
#include "lsym/mechanics.hpp"
#include "lsym/rational.hpp"
#include "lsym/zero_test.hpp"

namespace lsym {

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field), message_(what) {}
  [[nodiscard]] const std::string& field() const { return field_; }
  [[nodiscard]] const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
};

enum class ProblemKind { Hamiltonian, Lagrangian };

struct MonitorSpec {
  std::string label;
  Expr expr;
  std::vector<double> u0;  // (q, p)
  double t1 = 1.0;
  double h = 1e-3;
  // Without gamma the expression must stay at its initial value; with gamma
  // it must follow dG/dt = gamma(t, G).
  std::optional<Expr> gamma;
  double tol = 1e-6;
};

struct Candidates {
  std::optional<Expr> G;
  std::optional<Expr> S_expected;
  std::optional<Expr> Gdot_expected;
  std::optional<Expr> gamma;
  std::optional<Expr> Gamma;
  std::optional<Expr> H_for_legendre;
  std::optional<ExprVec> velocity_map;
  std::optional<ExprVec> hamilton_expected;  // canonical right-hand sides
  std::optional<ExprVec> psi_expected;
  std::optional<ExprVec> prolongation_expected;
  std::optional<LambdaMatrix> lambda_expected;
  std::optional<LambdaMatrix> lambda2_candidate;
  std::optional<std::string> case_expected;
  // "none" or an expression
  std::optional<std::string> lambda_scalar_expected;
  std::optional<Expr> lambda_scalar_value;
  std::optional<ExprVec> W_expected;
  std::optional<Expr> Z_expected;
  std::optional<std::vector<bool>> z_free_expected;
  // partial reduction
  std::optional<Expr> theta;
  std::optional<ExprVec> eta;
  std::optional<Expr> reduced_L;
  std::vector<ExprVec> particular_solutions;
  std::vector<std::vector<double>> initial_conditions;
};

struct ProblemFile {
  std::string name;
  ProblemKind kind = ProblemKind::Hamiltonian;
  int n = 1;
  std::map<std::string, Rational> parameters;
  std::optional<Expr> hamiltonian;
  std::optional<Expr> lagrangian;
  ExprVec phi;
  std::optional<ExprVec> psi;
  Expr tau;
  std::optional<LambdaMatrix> lambda;
  DomainBox box;
  std::optional<ReductionChart> chart;
  Candidates candidates;
  std::vector<MonitorSpec> monitors;
  double horizon = 0.5;  // trajectory length for Lagrangian checks
  std::vector<std::string> select;
  std::set<std::string> expect_nonzero;
  std::vector<ProblemFile> parts;
};

// Throws SchemaError (with the offending field path) on invalid input.
ProblemFile load_problem(const std::filesystem::path& path);
ProblemFile parse_problem(const std::string& text, const std::string& name = "problem");

}  // namespace lsym
