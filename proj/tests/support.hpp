#pragma once

// Seeded random expression trees and numerical oracles shared by the tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lsym/evaluate.hpp"
#include "lsym/lagrangian.hpp"
#include "lsym/lambda.hpp"
#include "lsym/expr.hpp"
#include "lsym/mechanics.hpp"
#include "lsym/parse.hpp"
#include "lsym/zero_test.hpp"

namespace lsym::test {

inline ExprVec exprs(std::initializer_list<const char*> texts) {
  ExprVec v;
  for (const char* s : texts) v.push_back(parse(s));
  return v;
}

class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed, std::vector<std::string> vars = {"q1", "q2", "p1", "p2", "t"})
      : rng_(seed), vars_(std::move(vars)) {}

  std::mt19937_64& rng() { return rng_; }
  const std::vector<std::string>& vars() const { return vars_; }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Expr variable() { return var(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]); }

  Expr constant() {
    const long long num_ = std::uniform_int_distribution<long long>(-5, 5)(rng_);
    const long long den = std::uniform_int_distribution<long long>(1, 4)(rng_);
    return num(Rational(num_, den));
  }

  Expr positive_constant() { return num(Rational(pick(5) + 1, pick(3) + 1)); }

  // Positive on the default box [0.2, 1.2].
  Expr positive(int depth) {
    if (depth <= 0) return pick(3) == 0 ? positive_constant() : variable();
    switch (pick(5)) {
      case 0: return add({positive(depth - 1), positive(depth - 1)});
      case 1: return mul({positive(depth - 1), positive(depth - 1)});
      case 2: return exp(any(depth - 1));
      case 3: return quot(positive(depth - 1), positive(depth - 1));
      default: return add({positive_constant(), pow(any(depth - 1), num(2))});
    }
  }

  // Smooth and finite on the default box.
  Expr any(int depth) {
    if (depth <= 0) return pick(3) == 0 ? constant() : variable();
    switch (pick(9)) {
      case 0: return add({any(depth - 1), any(depth - 1)});
      case 1: return mul({any(depth - 1), any(depth - 1)});
      case 2: return quot(any(depth - 1), positive(depth - 1));
      case 3: return pow(any(depth - 1), num(pick(3) + 2));
      case 4: return neg(any(depth - 1));
      case 5: return sin(any(depth - 1));
      case 6: return cos(any(depth - 1));
      case 7: return log(positive(depth - 1));
      default: return pick(2) ? sqrt(positive(depth - 1)) : exp(any(depth - 1) / num(2));
    }
  }

  // Unnormalized tree over every node kind.
  Expr raw(int depth) {
    if (depth <= 0) return pick(3) == 0 ? Expr::make_constant(Rational(pick(7), pick(3) + 1)) : variable();
    switch (pick(8)) {
      case 0: return Expr::make_node(NodeKind::Sum, {raw(depth - 1), raw(depth - 1), raw(depth - 1)});
      case 1: return Expr::make_node(NodeKind::Product, {raw(depth - 1), raw(depth - 1)});
      case 2: return Expr::make_node(NodeKind::Power, {raw(depth - 1), raw(depth - 1)});
      case 3: return Expr::make_node(NodeKind::Quotient, {raw(depth - 1), raw(depth - 1)});
      case 4: return Expr::make_node(NodeKind::Negate, {raw(depth - 1)});
      case 5: return Expr::make_node(NodeKind::Sum, {raw(depth - 1), Expr::make_node(NodeKind::Sum, {raw(depth - 1), raw(depth - 1)})});
      default: {
        static constexpr FunctionKind fns[] = {FunctionKind::Exp, FunctionKind::Log, FunctionKind::Sin,
                                               FunctionKind::Cos, FunctionKind::Sqrt};
        return Expr::make_function(fns[pick(5)], raw(depth - 1));
      }
    }
  }

  // Random polynomial in the given variables with small integer coefficients.
  Expr polynomial(const std::vector<std::string>& vs, int terms, int max_degree) {
    ExprVec sum;
    for (int k = 0; k < terms; ++k) {
      ExprVec factors{num(pick(7) - 3)};
      for (const auto& v : vs) {
        const int d = pick(max_degree + 1);
        if (d > 0) factors.push_back(pow(var(v), num(d)));
      }
      sum.push_back(mul(std::move(factors)));
    }
    return add(std::move(sum));
  }

  Point point(double lo = 0.2, double hi = 1.2) {
    std::uniform_real_distribution<double> u(lo, hi);
    Point p;
    for (const auto& v : vars_) p[v] = u(rng_);
    return p;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

inline double central_difference(const Expr& e, Point x, const std::string& v, double h = 1e-5) {
  const double x0 = x[v];
  x[v] = x0 + h;
  const double fp = evaluate(e, x);
  x[v] = x0 - h;
  const double fm = evaluate(e, x);
  return (fp - fm) / (2 * h);
}

inline PhaseSystem oscillator() { return PhaseSystem{1, parse("(p1^2+q1^2)/2")}; }

inline bool zero(const Expr& e, const DomainBox& box = {}, const ZeroConfig& cfg = {}) {
  return is_identically_zero(e, box, cfg).holds();
}

inline bool all_zero(const ExprVec& a, const ExprVec& b, const DomainBox& box = {}) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!zero(a[k] - b[k], box)) return false;
  return true;
}

inline bool all_hold(const std::vector<ZeroVerdict>& vs) {
  for (const auto& v : vs)
    if (!v.holds()) return false;
  return true;
}

inline PhaseVectorField field(std::initializer_list<const char*> phi, std::initializer_list<const char*> psi,
                              const char* tau = "0") {
  return PhaseVectorField{exprs(phi), exprs(psi), parse(tau)};
}

// Worked examples in phase space.
inline PhaseSystem example2() { return PhaseSystem{2, parse("-(q1*p2+q2*p1)+(p1-p2)^2/2")}; }
inline PhaseSystem example3() {
  return PhaseSystem{2, parse("q1^2*p1^2*log(q1)/2+q2^2*p2^2*log(q2)/2+log(q1/q2)*(q1*p1+q2*p2)")};
}
inline PhaseSystem example4(const char* eps = "1/10") {
  return PhaseSystem{1, substitute(parse("-q1*p1+eps*q1*p1-eps*q1*p1*log(p1)"), {{"eps", parse(eps)}})};
}
inline PhaseSystem example6() {
  return PhaseSystem{2, parse("q1^2*p1^2/2+q2^2*p2^2+(q1*p1-q2*p2)*log(q1)-q1*q2*p1*p2")};
}
inline PhaseSystem example7() { return PhaseSystem{1, parse("q1^2*p1^2*exp(2*q1)/2-q1*p1")}; }

inline LagrangianSystem lagrangian5() {
  return LagrangianSystem{2, parse("(dq1/q1-q1)^2/2+(dq1-q1*dq2)^2*exp(-2*q2)/2+q1*exp(-q2)")};
}
inline LagrangianSystem lagrangian6() {
  return LagrangianSystem{2, parse("(dq1/q1-log(q1))^2/2+(dq1/q1+dq2/q2)^2/2")};
}
inline LagrangianSystem lagrangian7() { return LagrangianSystem{1, parse("(dq1/q1+1)^2*exp(-2*q1)/2")}; }

inline PhaseVectorField shift2() { return field({"0", "0"}, {"1", "1"}); }
inline PhaseVectorField dilation3() { return field({"q1", "q2"}, {"-p1", "-p2"}); }
inline LambdaMatrix lambda3() { return LambdaMatrix::diagonal(exprs({"q1*p1", "q2*p2", "q1*p1", "q2*p2"})); }

inline ReductionChart chart2() {
  return ReductionChart{exprs({"q1-q2", "p1-p2", "q1+q2"}),
                        parse("p1+p2"),
                        {{"q1", parse("(w3+w1)/2")},
                         {"q2", parse("(w3-w1)/2")},
                         {"p1", parse("(z+w2)/2")},
                         {"p2", parse("(z-w2)/2")}},
                        false};
}

inline ReductionChart chart3() {
  return ReductionChart{exprs({"q1*p1", "q2*p2", "q1/q2"}),
                        parse("log(q1)"),
                        {{"q1", parse("exp(z)")},
                         {"q2", parse("exp(z)/w3")},
                         {"p1", parse("w1*exp(-z)")},
                         {"p2", parse("w2*w3*exp(-z)")}},
                        true};
}

inline PhaseVectorField field6() { return field({"q1", "-q2"}, {"-p1", "p2"}); }

inline ReductionChart chart6(const char* z = "log(q1)") {
  return ReductionChart{exprs({"q1*q2", "q1*p1", "q2*p2"}),
                        parse(z),
                        {{"q1", parse("exp(z)")},
                         {"q2", parse("w1*exp(-z)")},
                         {"p1", parse("w2*exp(-z)")},
                         {"p2", parse("w3*exp(z)/w1")}},
                        true};
}

inline PhaseVectorField field7() { return field({"q1"}, {"-q1*p1-p1"}); }
inline LambdaMatrix lambda7() {
  LambdaMatrix L;
  L.rows = {exprs({"q1+dq1", "0"}), exprs({"-p1", "q1+dq1"})};
  L.velocity_dependent = true;
  return L;
}

inline LambdaMatrix lambda2() { return LambdaMatrix::diagonal(exprs({"0", "0", "1", "1"})); }
inline LambdaMatrix lambda6() { return LambdaMatrix::diagonal(exprs({"1", "1", "1", "1"})); }

inline LambdaMatrix ldiag(std::initializer_list<const char*> d) {
  return LambdaMatrix::diagonal(exprs(d), LambdaSide::Lagrangian);
}

inline LambdaMatrix lambda_L7() {
  LambdaMatrix L;
  L.side = LambdaSide::Lagrangian;
  L.rows = {exprs({"q1+dq1"})};
  L.velocity_dependent = true;
  return L;
}

inline const char* H5 =
    "p1^2*q1^2/2+p1*p2*q1+p1*q1^2+p2^2/2+p2^2*exp(2*q2)/(2*q1^2)+p2*q1-q1*exp(-q2)";

inline ExprVec velocity5() { return exprs({"q1^2*p1+q1^2+q1*p2", "p2*exp(2*q2)/q1^2+q1*p1+q1+p2"}); }
inline ExprVec velocity6() { return exprs({"q1*(q1*p1-q2*p2+log(q1))", "q2*(2*q2*p2-q1*p1-log(q1))"}); }
inline ExprVec velocity7() { return exprs({"q1^2*p1*exp(2*q1)-q1"}); }

inline std::vector<InitialCondition> ics5() {
  return {{{0.5, 0.3}, {0.1, 0.2}}, {{1.0, 0.0}, {-0.2, 0.1}}, {{0.8, -0.4}, {0.3, -0.1}}};
}

}  // namespace lsym::test
