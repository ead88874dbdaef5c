#pragma once

// Immutable symbolic expression trees.
//
// Every Expr is a shared pointer to a const node, so copies are cheap and
// values can be handed across threads freely. The smart constructors below
// (add, mul, neg, quot, pow, apply) apply a light, idempotent normalization:
// nested sums/products are flattened, numeric constants are folded exactly,
// and a product carries at most one leading rational coefficient. Heavier
// rewriting (collecting like terms, expansion, cancellation) lives in
// simplify.hpp.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsym/rational.hpp"

namespace lsym {

enum class NodeKind : std::uint8_t {
  Constant,
  Variable,
  Sum,
  Product,
  Power,
  Quotient,
  Negate,
  Function,
};

enum class FunctionKind : std::uint8_t { Exp, Log, Sin, Cos, Sqrt };

std::string_view function_name(FunctionKind fn);
// Returns false if `name` is not one of the supported elementary functions.
bool function_from_name(std::string_view name, FunctionKind& out);

class Expr;
using ExprVec = std::vector<Expr>;

class Expr {
 public:
  // The zero constant.
  Expr();

  [[nodiscard]] NodeKind kind() const;
  // Constant payload; only meaningful for NodeKind::Constant.
  [[nodiscard]] const Rational& value() const;
  // Variable name; only meaningful for NodeKind::Variable.
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] FunctionKind function() const;
  [[nodiscard]] std::span<const Expr> operands() const;
  [[nodiscard]] const Expr& operand(std::size_t i) const;
  [[nodiscard]] std::size_t hash() const;
  // Identity of the underlying node; used to share work across a DAG.
  [[nodiscard]] const void* id() const { return node_.get(); }

  [[nodiscard]] bool is_constant() const { return kind() == NodeKind::Constant; }
  [[nodiscard]] bool is_variable() const { return kind() == NodeKind::Variable; }
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_one() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

  // Unnormalized node construction. Callers outside the normalizing
  // constructors should only need this to build deliberately raw trees.
  static Expr make_node(NodeKind kind, ExprVec operands);
  static Expr make_constant(Rational value);
  static Expr make_variable(std::string name);
  static Expr make_function(FunctionKind fn, Expr arg);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

// ---- normalizing constructors -------------------------------------------

Expr num(const Rational& value);
Expr num(long long value);
Expr var(std::string name);
Expr add(ExprVec terms);
Expr mul(ExprVec factors);
Expr neg(const Expr& e);
Expr quot(const Expr& numerator, const Expr& denominator);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(FunctionKind fn, const Expr& arg);

inline Expr exp(const Expr& e) { return apply(FunctionKind::Exp, e); }
inline Expr log(const Expr& e) { return apply(FunctionKind::Log, e); }
inline Expr sin(const Expr& e) { return apply(FunctionKind::Sin, e); }
inline Expr cos(const Expr& e) { return apply(FunctionKind::Cos, e); }
inline Expr sqrt(const Expr& e) { return apply(FunctionKind::Sqrt, e); }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

// Rebuilds `e` bottom-up through the normalizing constructors.
Expr normalize(const Expr& e);

// ---- structural queries and transforms ----------------------------------

std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, std::string_view variable);
std::size_t node_count(const Expr& e);

// Exact symbolic partial derivative.
Expr differentiate(const Expr& e, std::string_view variable);

using Bindings = std::map<std::string, Expr, std::less<>>;
// Simultaneous substitution: right-hand sides are not re-scanned.
Expr substitute(const Expr& e, const Bindings& bindings);

// Text form accepted back by parse(); see parse.hpp for the grammar.
std::string format(const Expr& e);

}  // namespace lsym
