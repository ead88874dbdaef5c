#pragma once

// Floating-point evaluation.
//
// A Tape is an expression DAG flattened into straight-line instructions over
// a fixed variable order. Shared subtrees are evaluated once. Besides the
// value, each run reports the largest magnitude seen among the operands of
// any sum, which the zero test uses to scale residuals.

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lsym/expr.hpp"

namespace lsym {

using Point = std::map<std::string, double, std::less<>>;

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, Expr where)
      : std::runtime_error(what), where_(std::move(where)) {}
  [[nodiscard]] const Expr& where() const { return where_; }

 private:
  Expr where_;
};

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::runtime_error("unbound variable '" + name + "'") {}
};

struct EvalResult {
  double value = 0.0;
  // max |operand| over every sum evaluated (0 if the expression has no sum)
  double sum_scale = 0.0;
  // index of the failing instruction, or -1
  std::int32_t failed = -1;
};

class Tape {
 public:
  enum class Op : std::uint8_t { Const, Var, Add, Mul, Pow, Div, Neg, Exp, Log, Sin, Cos, Sqrt };

  Tape(const Expr& e, std::vector<std::string> variables);

  [[nodiscard]] const std::vector<std::string>& variables() const { return variables_; }
  [[nodiscard]] std::size_t size() const { return ops_.size(); }
  // Sub-expression computed by instruction i (for diagnostics).
  [[nodiscard]] const Expr& node(std::size_t i) const { return nodes_[i]; }

  // `vars` holds one value per entry of variables(); `scratch` has size() slots.
  EvalResult run(const double* vars, double* scratch) const;

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;      // operand, slot or constant index
    std::uint32_t b = 0;      // second operand
    std::uint32_t first = 0;  // n-ary operand range in args_
    std::uint32_t count = 0;
  };
  std::vector<std::string> variables_;
  std::vector<Instr> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<double> constants_;
  std::vector<Expr> nodes_;
};

// Single-point evaluation; throws DomainError or UnboundVariable.
double evaluate(const Expr& e, const Point& point);

// Evaluates `tape` at `count` points stored row-major (count x variables().size()).
void eval_batch_serial(const Tape& tape, const double* points, std::size_t count, EvalResult* out);
// Same contract; points are split across OpenMP threads. Results are
// identical to the serial kernel.
void eval_batch_parallel(const Tape& tape, const double* points, std::size_t count, EvalResult* out);
void eval_batch(const Tape& tape, const double* points, std::size_t count, EvalResult* out);

bool openmp_enabled();

}  // namespace lsym
