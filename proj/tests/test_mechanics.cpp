#include <doctest.h>

#include <cmath>

#include "lsym/mechanics.hpp"
#include "lsym/simplify.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace lsym;
using namespace lsym::test;

TEST_SUITE("mechanics") {

TEST_CASE("names") {
  CHECK(q_name(1) == "q1");
  CHECK(dp_name(3) == "dp3");
  const PhaseSystem sys{2, Expr()};
  CHECK(sys.coordinates() == std::vector<std::string>{"q1", "q2", "p1", "p2"});
  CHECK(sys.du(3) == "dp2");
}

TEST_CASE("canonical equations") {
  CHECK(all_zero(canonical_equations(oscillator()), exprs({"p1", "-q1"})));
  CHECK(all_zero(canonical_equations(example4()),
                 exprs({"-q1*log(p1)/10-q1", "p1*log(p1)/10+p1-p1/10"})));
  const auto flat = canonical_equations(PhaseSystem{2, num(7)});
  for (const Expr& f : flat) CHECK(f.is_zero());
}

TEST_CASE("poisson bracket examples") {
  const PhaseSystem sys = oscillator();
  CHECK(simplify(poisson_bracket(sys, var("q1"), var("p1"))) == num(1));
  CHECK(simplify(poisson_bracket(sys, sys.H, sys.H)).is_zero());
  const Expr f = parse("q1^2"), g = parse("p1^2");
  const Expr b = poisson_bracket(sys, f, g);
  CHECK(zero(b - parse("4*q1*p1")));

  // finite-difference oracle
  TreeGen gen(4, {"q1", "p1"});
  for (int k = 0; k < 5; ++k) {
    const Point x = gen.point();
    const double fd = central_difference(f, x, "q1") * central_difference(g, x, "p1") -
                      central_difference(f, x, "p1") * central_difference(g, x, "q1");
    CHECK(evaluate(b, x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("total time derivative") {
  const PhaseSystem osc = oscillator();
  CHECK(zero(total_time_derivative(osc, osc.H)));
  CHECK(zero(total_time_derivative(example4(), parse("2*q1*p1")) - parse("-q1*p1/5")));
  CHECK(zero(total_time_derivative(example2(), parse("(q1+q2)*exp(t)"))));
  CHECK(!zero(total_time_derivative(example2(), parse("q1+q2"))));
}

TEST_CASE("hamiltonian vector field") {
  const PhaseSystem sys = oscillator();
  const auto X = hamiltonian_vector_field(sys, parse("q1*p1"));
  CHECK(all_zero(X.phi, exprs({"q1"})));
  CHECK(all_zero(X.psi, exprs({"-p1"})));
  CHECK(X.tau.is_zero());
  CHECK(all_zero(hamiltonian_vector_field(sys, sys.H).Phi(), canonical_equations(sys)));

  const PhaseSystem s5{2, Expr()};
  const auto X5 = hamiltonian_vector_field(s5, parse("q1*p1+p2"));
  CHECK(all_zero(X5.Phi(), exprs({"q1", "1", "-p1", "0"})));
}

TEST_CASE("apply field, gradient and divergence") {
  const PhaseSystem sys{1, Expr()};
  const auto X = field({"q1"}, {"p1"});
  CHECK(zero(apply_field(sys, X, parse("q1*p1")) - parse("2*q1*p1")));
  CHECK(all_zero(gradient(sys, parse("q1^2*p1")), exprs({"2*q1*p1", "q1^2"})));
  CHECK(simplify(divergence(sys, X.Phi())) == num(2));
  const auto T = field({"0"}, {"0"}, "1");
  CHECK(zero(apply_field(sys, T, parse("t^2*q1")) - parse("2*t*q1")));
}

TEST_CASE("lie bracket") {
  const PhaseSystem sys{1, Expr()};
  const auto X = field({"q1"}, {"p1"});
  const auto self = lie_bracket(sys, X, X);
  for (const Expr& c : self.Phi()) CHECK(zero(c));

  const auto Y = field({"p1"}, {"0"});
  CHECK(all_zero(lie_bracket(sys, X, Y).Phi(), exprs({"0", "0"})));
  const auto Z = field({"q1^2"}, {"0"});
  CHECK(all_zero(lie_bracket(sys, X, Z).Phi(), exprs({"q1^2", "0"})));

  CHECK_THROWS_AS(lie_bracket(sys, field({"1"}, {"0"}, "1"), X), std::invalid_argument);
}

TEST_CASE("evolutionary form") {
  const PhaseSystem osc = oscillator();
  const auto X = field({"q1"}, {"p1"});
  const auto same = evolutionary_form(osc, X);
  CHECK(all_zero(same.Phi(), X.Phi()));
  const auto dt = evolutionary_form(osc, field({"0"}, {"0"}, "1"));
  CHECK(dt.tau.is_zero());
  CHECK(all_zero(dt.phi, exprs({"-p1"})));
  CHECK(all_zero(dt.psi, exprs({"q1"})));
}

TEST_CASE("scale field") {
  const auto X = field({"q1"}, {"p1"});
  CHECK(all_zero(scale_field(X, num(1)).Phi(), X.Phi()));
  CHECK(all_zero(scale_field(X, parse("p1^2+q1^2")).Phi(), exprs({"q1^3+q1*p1^2", "q1^2*p1+p1^3"})));
  for (const Expr& c : scale_field(X, Expr()).Phi()) CHECK(zero(c));
  CHECK_THROWS_AS(scale_field(field({"1"}, {"0"}, "t"), num(2)), std::invalid_argument);
}

TEST_CASE("property: bracket axioms on 50 polynomial triples") { CHECK(bracket_axiom_failures(50, 50) == 0); }

TEST_CASE("property: total derivative product rule") {
  const std::vector<std::string> vs{"q1", "p1", "t"};
  TreeGen g(12, vs);
  for (int k = 0; k < 20; ++k) {
    const PhaseSystem sys{1, g.polynomial(vs, 3, 2)};
    const Expr f = g.polynomial(vs, 3, 2), h = g.polynomial(vs, 3, 2);
    const Expr lhs = total_time_derivative(sys, f * h);
    const Expr rhs = f * total_time_derivative(sys, h) + h * total_time_derivative(sys, f);
    CHECK(zero(lhs - rhs));
  }
}

TEST_CASE("property: lie bracket antisymmetry and jacobi") {
  const PhaseSystem sys{1, Expr()};
  const std::vector<std::string> vs{"q1", "p1"};
  TreeGen g(77, vs);
  auto random_field = [&] {
    return PhaseVectorField{{g.polynomial(vs, 2, 2)}, {g.polynomial(vs, 2, 2)}, Expr()};
  };
  auto sum = [](const ExprVec& a, const ExprVec& b, const ExprVec& c) {
    ExprVec out;
    for (std::size_t k = 0; k < a.size(); ++k) out.push_back(a[k] + b[k] + c[k]);
    return out;
  };
  for (int k = 0; k < 10; ++k) {
    const auto X = random_field(), Y = random_field(), Z = random_field();
    const auto xy = lie_bracket(sys, X, Y).Phi(), yx = lie_bracket(sys, Y, X).Phi();
    for (std::size_t a = 0; a < xy.size(); ++a) CHECK(zero(xy[a] + yx[a]));
    const auto jac = sum(lie_bracket(sys, X, lie_bracket(sys, Y, Z)).Phi(),
                         lie_bracket(sys, Y, lie_bracket(sys, Z, X)).Phi(),
                         lie_bracket(sys, Z, lie_bracket(sys, X, Y)).Phi());
    for (const Expr& c : jac) CHECK(zero(c));
  }
}

TEST_CASE("property: hamiltonian field of H matches canonical equations") {
  const std::vector<std::string> vs{"q1", "q2", "p1", "p2", "t"};
  TreeGen g(3, vs);
  for (int k = 0; k < 10; ++k) {
    const PhaseSystem sys{2, g.any(2)};
    CHECK(all_zero(hamiltonian_vector_field(sys, sys.H).Phi(), canonical_equations(sys)));
  }
}

}  // TEST_SUITE
