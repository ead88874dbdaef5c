#include "lsym/expr.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace lsym {

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  Rational value;
  std::string name;
  FunctionKind fn = FunctionKind::Exp;
  ExprVec operands;
  std::size_t hash = 0;
};

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view function_name(FunctionKind fn) {
  switch (fn) {
    case FunctionKind::Exp: return "exp";
    case FunctionKind::Log: return "log";
    case FunctionKind::Sin: return "sin";
    case FunctionKind::Cos: return "cos";
    case FunctionKind::Sqrt: return "sqrt";
  }
  return "?";
}

bool function_from_name(std::string_view name, FunctionKind& out) {
  static constexpr FunctionKind kAll[] = {FunctionKind::Exp, FunctionKind::Log,
                                          FunctionKind::Sin, FunctionKind::Cos,
                                          FunctionKind::Sqrt};
  for (FunctionKind fn : kAll) {
    if (function_name(fn) == name) {
      out = fn;
      return true;
    }
  }
  return false;
}

Expr::Expr() {
  static const auto zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = 0;
    n->hash = combine(std::hash<int>{}(0), std::hash<std::string>{}("0"));
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = zero;
}

NodeKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
FunctionKind Expr::function() const { return node_->fn; }
std::span<const Expr> Expr::operands() const { return node_->operands; }
const Expr& Expr::operand(std::size_t i) const { return node_->operands.at(i); }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_zero() const { return is_constant() && value() == 0; }
bool Expr::is_one() const { return is_constant() && value() == 1; }

Expr Expr::make_constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->hash = combine(std::hash<int>{}(0), std::hash<std::string>{}(to_string(value)));
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::make_variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->hash = combine(std::hash<int>{}(1), std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::make_function(FunctionKind fn, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Function;
  n->fn = fn;
  n->hash = combine(combine(std::hash<int>{}(7), static_cast<std::size_t>(fn)), arg.hash());
  n->operands.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::make_node(NodeKind kind, ExprVec operands) {
  if (kind == NodeKind::Constant || kind == NodeKind::Variable || kind == NodeKind::Function)
    throw std::logic_error("make_node: use the dedicated leaf constructors");
  const std::size_t arity = operands.size();
  const bool ok = (kind == NodeKind::Sum || kind == NodeKind::Product) ? arity >= 1
                  : kind == NodeKind::Negate                           ? arity == 1
                                                                       : arity == 2;
  if (!ok) throw std::logic_error("make_node: wrong operand count");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  std::size_t h = std::hash<int>{}(static_cast<int>(kind) + 2);
  for (const Expr& op : operands) h = combine(h, op.hash());
  n->hash = h;
  n->operands = std::move(operands);
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Constant: return a.value() == b.value();
    case NodeKind::Variable: return a.name() == b.name();
    case NodeKind::Function:
      if (a.function() != b.function()) return false;
      break;
    default: break;
  }
  auto ao = a.operands();
  auto bo = b.operands();
  return std::equal(ao.begin(), ao.end(), bo.begin(), bo.end());
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case NodeKind::Constant:
      if (a.value() < b.value()) return std::strong_ordering::less;
      if (b.value() < a.value()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case NodeKind::Variable:
      return a.name().compare(b.name()) <=> 0;
    case NodeKind::Function:
      if (auto c = a.function() <=> b.function(); c != 0) return c;
      break;
    default: break;
  }
  auto ao = a.operands();
  auto bo = b.operands();
  const std::size_t n = std::min(ao.size(), bo.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = ao[i] <=> bo[i]; c != 0) return c;
  }
  return ao.size() <=> bo.size();
}

// ---- normalizing constructors -------------------------------------------

Expr num(const Rational& value) {
  if (value == 0) return Expr();
  return Expr::make_constant(value);
}

Expr num(long long value) { return num(Rational(value)); }

Expr var(std::string name) { return Expr::make_variable(std::move(name)); }

Expr add(ExprVec terms) {
  ExprVec flat;
  flat.reserve(terms.size());
  Rational constant = 0;
  std::function<void(const Expr&)> push = [&](const Expr& t) {
    switch (t.kind()) {
      case NodeKind::Constant: constant += t.value(); break;
      case NodeKind::Sum:
        for (const Expr& s : t.operands()) push(s);
        break;
      default: flat.push_back(t);
    }
  };
  for (const Expr& t : terms) push(t);
  if (constant != 0) flat.push_back(num(constant));
  if (flat.empty()) return Expr();
  if (flat.size() == 1) return flat.front();
  return Expr::make_node(NodeKind::Sum, std::move(flat));
}

Expr mul(ExprVec factors) {
  ExprVec flat;
  flat.reserve(factors.size());
  Rational coefficient = 1;
  std::function<void(const Expr&)> push = [&](const Expr& f) {
    switch (f.kind()) {
      case NodeKind::Constant: coefficient *= f.value(); break;
      case NodeKind::Product:
        for (const Expr& s : f.operands()) push(s);
        break;
      case NodeKind::Negate:
        coefficient = -coefficient;
        push(f.operand(0));
        break;
      default: flat.push_back(f);
    }
  };
  for (const Expr& f : factors) push(f);
  if (coefficient == 0) return Expr();
  if (flat.empty()) return num(coefficient);
  if (flat.size() == 1) {
    if (coefficient == 1) return flat.front();
    if (coefficient == -1) return Expr::make_node(NodeKind::Negate, {flat.front()});
  }
  if (coefficient != 1) flat.insert(flat.begin(), num(coefficient));
  return Expr::make_node(NodeKind::Product, std::move(flat));
}

Expr neg(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant: return num(-e.value());
    case NodeKind::Negate: return e.operand(0);
    case NodeKind::Product: return mul({num(-1), e});
    default: return Expr::make_node(NodeKind::Negate, {e});
  }
}

Expr quot(const Expr& numerator, const Expr& denominator) {
  if (denominator.is_constant()) {
    if (denominator.value() == 0) return Expr::make_node(NodeKind::Quotient, {numerator, denominator});
    return mul({num(Rational(1) / denominator.value()), numerator});
  }
  if (numerator.is_zero()) return Expr();
  return Expr::make_node(NodeKind::Quotient, {numerator, denominator});
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant()) {
    if (exponent.value() == 0) return num(1);
    if (exponent.value() == 1) return base;
    if (base.is_constant() && is_integer(exponent.value())) {
      const Integer& k = boost::multiprecision::numerator(exponent.value());
      if (base.value() == 0) {
        if (k > 0) return Expr();
      } else if (base.value() == 1 || base.value() == -1 ||
                 boost::multiprecision::abs(k) <= 4096) {
        return num(rational_pow(base.value(), k.convert_to<long>()));
      }
    }
  }
  if (base.is_one()) return num(1);
  return Expr::make_node(NodeKind::Power, {base, exponent});
}

Expr apply(FunctionKind fn, const Expr& arg) {
  if (arg.is_constant()) {
    const Rational& v = arg.value();
    switch (fn) {
      case FunctionKind::Exp:
        if (v == 0) return num(1);
        break;
      case FunctionKind::Log:
        if (v == 1) return Expr();
        break;
      case FunctionKind::Sin:
        if (v == 0) return Expr();
        break;
      case FunctionKind::Cos:
        if (v == 0) return num(1);
        break;
      case FunctionKind::Sqrt:
        if (v == 0) return Expr();
        if (v == 1) return num(1);
        break;
    }
  }
  return Expr::make_function(fn, arg);
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return quot(a, b); }
Expr operator-(const Expr& a) { return neg(a); }

namespace {

// Rebuilds a node of the same kind from new operands via the smart constructors.
Expr rebuild(const Expr& e, ExprVec ops) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Variable: return e;
    case NodeKind::Sum: return add(std::move(ops));
    case NodeKind::Product: return mul(std::move(ops));
    case NodeKind::Power: return pow(ops[0], ops[1]);
    case NodeKind::Quotient: return quot(ops[0], ops[1]);
    case NodeKind::Negate: return neg(ops[0]);
    case NodeKind::Function: return apply(e.function(), ops[0]);
  }
  return e;
}

}  // namespace

Expr normalize(const Expr& e) {
  if (e.is_constant()) return num(e.value());
  if (e.is_variable()) return e;
  ExprVec ops;
  for (const Expr& op : e.operands()) ops.push_back(normalize(op));
  return rebuild(e, std::move(ops));
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const void*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!seen.emplace(x.id(), true).second) return;
    if (x.is_variable()) {
      out.insert(x.name());
      return;
    }
    for (const Expr& op : x.operands()) walk(op);
  };
  walk(e);
  return out;
}

bool depends_on(const Expr& e, std::string_view variable) {
  std::unordered_map<const void*, bool> memo;
  std::function<bool(const Expr&)> walk = [&](const Expr& x) -> bool {
    if (x.is_variable()) return x.name() == variable;
    if (x.is_constant()) return false;
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    bool found = false;
    for (const Expr& op : x.operands()) {
      if (walk(op)) {
        found = true;
        break;
      }
    }
    memo.emplace(x.id(), found);
    return found;
  };
  return walk(e);
}

std::size_t node_count(const Expr& e) {
  std::size_t count = 1;
  for (const Expr& op : e.operands()) count += node_count(op);
  return count;
}

Expr differentiate(const Expr& root, std::string_view v) {
  std::unordered_map<const void*, bool> dep;
  std::function<bool(const Expr&)> has = [&](const Expr& x) -> bool {
    if (x.is_variable()) return x.name() == v;
    if (x.is_constant()) return false;
    if (auto it = dep.find(x.id()); it != dep.end()) return it->second;
    bool found = false;
    for (const Expr& op : x.operands()) found = found || has(op);
    dep.emplace(x.id(), found);
    return found;
  };
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& e) -> Expr {
    if (!has(e)) return Expr();
    if (e.is_variable()) return num(1);
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    Expr out;
    auto ops = e.operands();
    switch (e.kind()) {
      case NodeKind::Constant:
      case NodeKind::Variable: break;
      case NodeKind::Sum: {
        ExprVec terms;
        for (const Expr& op : ops) terms.push_back(d(op));
        out = add(std::move(terms));
        break;
      }
      case NodeKind::Product: {
        ExprVec terms;
        for (std::size_t i = 0; i < ops.size(); ++i) {
          if (!has(ops[i])) continue;
          ExprVec factors(ops.begin(), ops.end());
          factors[i] = d(ops[i]);
          terms.push_back(mul(std::move(factors)));
        }
        out = add(std::move(terms));
        break;
      }
      case NodeKind::Power: {
        const Expr& b = ops[0];
        const Expr& x = ops[1];
        if (!has(x)) {
          out = mul({x, pow(b, add({x, num(-1)})), d(b)});
        } else if (!has(b)) {
          out = mul({e, log(b), d(x)});
        } else {
          out = mul({e, add({mul({d(x), log(b)}), quot(mul({x, d(b)}), b)})});
        }
        break;
      }
      case NodeKind::Quotient: {
        const Expr& a = ops[0];
        const Expr& b = ops[1];
        if (!has(b)) {
          out = quot(d(a), b);
        } else {
          out = quot(add({mul({d(a), b}), neg(mul({a, d(b)}))}), pow(b, num(2)));
        }
        break;
      }
      case NodeKind::Negate: out = neg(d(ops[0])); break;
      case NodeKind::Function: {
        const Expr& a = ops[0];
        const Expr da = d(a);
        switch (e.function()) {
          case FunctionKind::Exp: out = mul({e, da}); break;
          case FunctionKind::Log: out = quot(da, a); break;
          case FunctionKind::Sin: out = mul({cos(a), da}); break;
          case FunctionKind::Cos: out = neg(mul({sin(a), da})); break;
          case FunctionKind::Sqrt: out = quot(da, mul({num(2), e})); break;
        }
        break;
      }
    }
    memo.emplace(e.id(), out);
    return out;
  };
  return d(root);
}

Expr substitute(const Expr& root, const Bindings& bindings) {
  if (bindings.empty()) return root;
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& e) -> Expr {
    if (e.is_variable()) {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    if (e.is_constant()) return e;
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    ExprVec ops;
    bool changed = false;
    for (const Expr& op : e.operands()) {
      ops.push_back(go(op));
      changed = changed || ops.back().id() != op.id();
    }
    Expr out = changed ? rebuild(e, std::move(ops)) : e;
    memo.emplace(e.id(), out);
    return out;
  };
  return go(root);
}

// ---- formatting -----------------------------------------------------------

namespace {

// Binding strength used to decide parenthesization; larger binds tighter.
int level(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
      if (!is_integer(e.value())) return 2;
      return e.value() < 0 ? 3 : 5;
    case NodeKind::Variable:
    case NodeKind::Function: return 5;
    case NodeKind::Power: return 4;
    case NodeKind::Negate: return 3;
    case NodeKind::Product:
    case NodeKind::Quotient: return 2;
    case NodeKind::Sum: return 1;
  }
  return 0;
}

bool looks_negative(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant: return e.value() < 0;
    case NodeKind::Negate: return true;
    case NodeKind::Product: return e.operand(0).is_constant() && e.operand(0).value() < 0;
    default: return false;
  }
}

void emit(const Expr& e, std::string& out);

void emit_at(const Expr& e, int min_level, std::string& out) {
  if (level(e) < min_level) {
    out += '(';
    emit(e, out);
    out += ')';
  } else {
    emit(e, out);
  }
}

void emit(const Expr& e, std::string& out) {
  auto ops = e.operands();
  switch (e.kind()) {
    case NodeKind::Constant: out += to_string(e.value()); return;
    case NodeKind::Variable: out += e.name(); return;
    case NodeKind::Function:
      out += function_name(e.function());
      out += '(';
      emit(ops[0], out);
      out += ')';
      return;
    case NodeKind::Sum:
      emit_at(ops[0], 1, out);
      for (std::size_t i = 1; i < ops.size(); ++i) {
        if (looks_negative(ops[i])) {
          out += " - ";
          emit_at(neg(ops[i]), 2, out);
        } else {
          out += " + ";
          emit_at(ops[i], 1, out);
        }
      }
      return;
    case NodeKind::Product: {
      std::size_t first = 0;
      if (ops[0].is_constant()) {
        first = 1;
        if (ops[0].value() == -1) {
          out += '-';
        } else {
          out += to_string(ops[0].value());
          out += '*';
        }
      }
      for (std::size_t i = first; i < ops.size(); ++i) {
        if (i > first) out += '*';
        emit_at(ops[i], 3, out);
      }
      return;
    }
    case NodeKind::Quotient:
      emit_at(ops[0], 2, out);
      out += '/';
      emit_at(ops[1], 4, out);
      return;
    case NodeKind::Negate:
      out += '-';
      emit_at(ops[0], 4, out);
      return;
    case NodeKind::Power:
      emit_at(ops[0], 5, out);
      out += '^';
      emit_at(ops[1], 4, out);
      return;
  }
}

}  // namespace

std::string format(const Expr& e) {
  std::string out;
  emit(e, out);
  return out;
}

}  // namespace lsym
