#include <doctest.h>

#include "lsym/lagrangian.hpp"
#include "lsym/simplify.hpp"
#include "support.hpp"

using namespace lsym;
using namespace lsym::test;

TEST_SUITE("lagrangian") {

TEST_CASE("lambda invariance") {
  CHECK(check_lagrangian_lambda_invariance(lagrangian5(), {exprs({"q1", "1"})}, ldiag({"q1", "q1"}), {}).holds());
  CHECK(check_lagrangian_lambda_invariance(lagrangian6(), {exprs({"q1", "-q2"})}, ldiag({"1", "1"}), {}).holds());
  CHECK(check_lagrangian_lambda_invariance(lagrangian7(), {exprs({"q1"})}, lambda_L7(), {}).holds());

  const auto plain = check_lagrangian_lambda_invariance(lagrangian6(), {exprs({"q1", "-q2"})},
                                                        LambdaMatrix::zero(2, LambdaSide::Lagrangian), {});
  REQUIRE(plain.tag == ZeroTag::NonZero);
  const Expr r = lagrangian_invariance_residual(lagrangian6(), {exprs({"q1", "-q2"})},
                                                LambdaMatrix::zero(2, LambdaSide::Lagrangian));
  CHECK(evaluate(r, plain.witness) == doctest::Approx(plain.witness_residual));

  CHECK_THROWS_AS(lagrangian_invariance_residual(lagrangian6(), {exprs({"q1"})}, ldiag({"1", "1"})),
                  std::invalid_argument);
}

TEST_CASE("conjugate momenta") {
  const LagrangianSystem free{1, parse("dq1^2/2")};
  CHECK(all_zero(conjugate_momenta(free), exprs({"dq1"})));

  const LagrangianSystem lag = lagrangian7();
  const auto p = conjugate_momenta(lag);
  CHECK(all_zero(p, exprs({"(dq1/q1+1)*exp(-2*q1)/q1"})));
  TreeGen g(8, {"q1", "dq1"});
  for (int k = 0; k < 5; ++k) {
    const Point x = g.point();
    CHECK(evaluate(p[0], x) == doctest::Approx(central_difference(lag.L, x, "dq1")).epsilon(1e-7));
  }
  const LagrangianSystem degenerate{2, parse("dq1^2/2+q2")};
  CHECK(conjugate_momenta(degenerate)[1].is_zero());
}

TEST_CASE("regularity") {
  CHECK_NOTHROW(check_regular(lagrangian5(), {}));
  CHECK_NOTHROW(check_regular(lagrangian7(), {}));
  CHECK_THROWS_AS(check_regular(LagrangianSystem{1, parse("q1*dq1+q1^2")}, {}), RegularityError);
  CHECK_THROWS_AS(check_regular(LagrangianSystem{2, parse("(dq1+dq2)^2/2")}, {}), RegularityError);
}

TEST_CASE("legendre") {
  const LagrangianSystem free{1, parse("dq1^2/2")};
  CHECK(verify_legendre(free, exprs({"p1"}), parse("p1^2/2"), {}).holds());
  CHECK(verify_legendre(lagrangian5(), velocity5(), parse(H5), {}).holds());
  CHECK(verify_legendre(lagrangian6(), velocity6(),
                        parse("q1^2*p1^2/2+q2^2*p2^2+(q1*p1-q2*p2)*log(q1)-q1*q2*p1*p2"), {})
            .holds());
  CHECK(verify_legendre(lagrangian7(), velocity7(), example7().H, {}).holds());

  const auto wrong_h = verify_legendre(lagrangian6(), velocity6(), example6().H + var("q1"), {});
  CHECK_FALSE(wrong_h.legendre.holds());
  CHECK(all_hold(wrong_h.momentum));
  const auto wrong_v = verify_legendre(free, exprs({"2*p1"}), parse("p1^2"), {});
  CHECK_FALSE(all_hold(wrong_v.momentum));
}

TEST_CASE("example 5 Hamiltonian reproduces the displayed equations") {
  const PhaseSystem sys{2, parse(H5)};
  CHECK(all_zero(canonical_equations(sys),
                 exprs({"q1^2*p1+q1^2+q1*p2", "p2*exp(2*q2)/q1^2+q1*p1+q1+p2",
                        "-q1*p1^2-2*q1*p1+p2^2*exp(2*q2)/q1^3-p1*p2-p2+exp(-q2)",
                        "-p2^2*exp(2*q2)/q1^2-q1*exp(-q2)"})));
}

TEST_CASE("extension of the vector field") {
  const auto x5 = extend_vector_field({exprs({"q1", "1"})});
  CHECK(all_zero(x5.X.Phi(), exprs({"q1", "1", "-p1", "0"})));
  CHECK(zero(x5.G - parse("q1*p1+p2")));
  CHECK(x5.X.tau.is_zero());

  const auto x6 = extend_vector_field({exprs({"q1", "-q2"})});
  CHECK(all_zero(x6.X.psi, exprs({"-p1", "p2"})));

  const auto x0 = extend_vector_field({exprs({"1", "2"})});
  CHECK(all_zero(x0.X.psi, exprs({"0", "0"})));

  const auto x7 = extend_vector_field_velocity_dependent(lagrangian7(), {exprs({"q1"})}, lambda_L7(), velocity7());
  CHECK(all_zero(x7.X.psi, exprs({"-q1*p1-p1"})));

  const auto agree =
      extend_vector_field_velocity_dependent(lagrangian6(), {exprs({"q1", "-q2"})}, ldiag({"1", "1"}), velocity6());
  CHECK(all_zero(agree.X.Phi(), x6.X.Phi()));

  CHECK_THROWS_AS(extend_vector_field_velocity_dependent(lagrangian7(), {exprs({"q1"})}, lambda_L7(), {}),
                  std::invalid_argument);
}

TEST_CASE("extension of Lambda") {
  const auto l5 = extend_lambda({exprs({"q1", "1"})}, ldiag({"q1", "q1"}), std::nullopt, {});
  CHECK(l5.holds());
  const std::vector<ExprVec> expected5{exprs({"q1", "0", "0", "0"}), exprs({"0", "q1", "0", "0"}),
                                       exprs({"-p1", "-p2", "q1", "0"}), exprs({"0", "0", "0", "0"})};
  REQUIRE(l5.L.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(all_zero(l5.L.rows[static_cast<std::size_t>(i)], expected5[static_cast<std::size_t>(i)]));

  const auto l6 = extend_lambda({exprs({"q1", "-q2"})}, ldiag({"1", "1"}), std::nullopt, {});
  CHECK(l6.holds());
  CHECK(l6.solved);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(zero(l6.L(i, j) - num(i == j ? 1 : 0)));

  const auto l0 = extend_lambda({exprs({"q1", "-q2"})}, LambdaMatrix::zero(2, LambdaSide::Lagrangian), std::nullopt, {});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(zero(l0.L(i, j)));

  // a swap Jacobian is neither diagonal nor triangular
  const ConfigVectorField swap{exprs({"q2", "q1"})};
  CHECK_THROWS_AS(extend_lambda(swap, ldiag({"1", "1"}), std::nullopt, {}), ExtensionError);
  CHECK(extend_lambda(swap, ldiag({"1", "1"}), ldiag({"1", "1"}), {}).holds());
  CHECK_THROWS_AS(extend_lambda(swap, ldiag({"1", "1"}), ldiag({"2", "1"}), {}), ExtensionError);
}

TEST_CASE("assembled pairs are lambda-symmetries with lambda-constant G") {
  const PhaseSystem s5{2, parse(H5)};
  const auto x5 = extend_vector_field({exprs({"q1", "1"})});
  const auto l5 = extend_lambda({exprs({"q1", "1"})}, ldiag({"q1", "q1"}), std::nullopt, {});
  CHECK(check_lambda_symmetry(s5, x5.X, l5.L, {}).holds());
  const auto g5 = check_lambda_constant_G(s5, x5.X, l5.L, x5.G, {});
  CHECK(g5.holds());
  CHECK(zero(g5.Gdot + parse("q1*(q1*p1+p2)")));

  const PhaseSystem s6 = example6();
  const auto x6 = extend_vector_field({exprs({"q1", "-q2"})});
  const auto l6 = extend_lambda({exprs({"q1", "-q2"})}, ldiag({"1", "1"}), std::nullopt, {});
  CHECK(check_lambda_symmetry(s6, x6.X, l6.L, {}).holds());
  const auto g6 = check_lambda_constant_G(s6, x6.X, l6.L, x6.G, {});
  CHECK(g6.holds());
  CHECK(zero(g6.Gdot + x6.G));
}

TEST_CASE("noether relation along trajectories") {
  const auto r5 = check_noether_lambda(lagrangian5(), {exprs({"q1", "1"})}, ldiag({"q1", "q1"}), ics5(), 0.5);
  CHECK(r5.traces.size() == 3);
  CHECK(r5.holds());
  CHECK(r5.max_residual() < 1e-5);

  const std::vector<InitialCondition> ics7{{{0.5}, {0.1}}, {{0.9}, {-0.2}}};
  const auto r7 = check_noether_lambda(lagrangian7(), {exprs({"q1"})}, lambda_L7(), ics7, 1.0);
  CHECK(r7.holds());

  // exact invariance: phi.p is conserved
  const LagrangianSystem chain{2, parse("(dq1^2+dq2^2)/2-(q1-q2)^2/2")};
  const auto r0 = check_noether_lambda(chain, {exprs({"1", "1"})}, LambdaMatrix::zero(2, LambdaSide::Lagrangian),
                                       {{{0.3, 0.9}, {0.2, -0.5}}}, 1.0);
  CHECK(r0.holds());

  // wrong Lambda is detected
  const auto bad = check_noether_lambda(lagrangian5(), {exprs({"q1", "1"})}, ldiag({"1", "1"}), ics5(), 0.5);
  CHECK_FALSE(bad.holds());
}

TEST_CASE("noether residual scales with the step") {
  const auto coarse = check_noether_lambda(lagrangian5(), {exprs({"q1", "1"})}, ldiag({"q1", "q1"}), ics5(), 0.5, 4e-3);
  const auto fine = check_noether_lambda(lagrangian5(), {exprs({"q1", "1"})}, ldiag({"q1", "q1"}), ics5(), 0.5, 2e-3);
  CHECK(fine.max_residual() < coarse.max_residual());
}

TEST_CASE("lala and corollary 3") {
  const auto x6 = extend_vector_field({exprs({"q1", "-q2"})});
  const auto l6 = extend_lambda({exprs({"q1", "-q2"})}, ldiag({"1", "1"}), std::nullopt, {});
  const auto r6 = check_lala_and_corollary3({exprs({"q1", "-q2"})}, ldiag({"1", "1"}), x6.X, l6.L, {});
  REQUIRE(r6.lambda.has_value());
  CHECK(r6.constant);
  CHECK(zero(*r6.lambda - num(1)));
  CHECK(r6.holds());
  CHECK_FALSE(r6.corollary.empty());

  const auto x5 = extend_vector_field({exprs({"q1", "1"})});
  const auto l5 = extend_lambda({exprs({"q1", "1"})}, ldiag({"q1", "q1"}), std::nullopt, {});
  const auto r5 = check_lala_and_corollary3({exprs({"q1", "1"})}, ldiag({"q1", "q1"}), x5.X, l5.L, {});
  REQUIRE(r5.lambda.has_value());
  CHECK_FALSE(r5.constant);
  CHECK(zero(*r5.lambda - var("q1")));
  CHECK(r5.corollary.empty());

  const auto l0 = extend_lambda({exprs({"q1", "-q2"})}, LambdaMatrix::zero(2, LambdaSide::Lagrangian), std::nullopt, {});
  const auto r0 =
      check_lala_and_corollary3({exprs({"q1", "-q2"})}, LambdaMatrix::zero(2, LambdaSide::Lagrangian), x6.X, l0.L, {});
  REQUIRE(r0.lambda.has_value());
  CHECK(r0.constant);
  CHECK(zero(*r0.lambda));
}

TEST_CASE("partial reduction: example 6") {
  PartialReductionInput in;
  in.eta = exprs({"q1*q2"});
  in.theta = parse("dq1/q1-log(q1)");
  in.reduced_L = parse("theta^2/2+deta1^2/(2*eta1^2)");
  in.particular_solution = exprs({"q1*log(q1)", "q2*(1/2-log(q1))"});
  in.initial_q = {{0.5, 0.7}, {1.2, 0.4}};
  const auto r = partial_reduction_check(lagrangian6(), {exprs({"q1", "-q2"})}, ldiag({"1", "1"}), in, {});
  CHECK(r.invariants_ok());
  CHECK(r.composition.holds());
  CHECK(r.theta_condition.holds());
  CHECK(r.euler_lagrange_ok());
  CHECK(r.holds());

  PartialReductionInput shifted = in;
  shifted.theta = parse("dq1/q1-log(q1)+q2");
  const auto s = partial_reduction_check(lagrangian6(), {exprs({"q1", "-q2"})}, ldiag({"1", "1"}), shifted, {});
  CHECK_FALSE(s.invariants_ok());
  CHECK_FALSE(s.holds());
}

TEST_CASE("partial reduction: example 7 sign branches") {
  PartialReductionInput in;
  in.theta = parse("(dq1/q1)*exp(-q1)+exp(-q1)");
  in.reduced_L = parse("theta^2/2");
  in.initial_q = {{0.5}, {0.9}};
  in.t1 = 1.0;

  in.particular_solution = exprs({"-q1"});
  const auto minus = partial_reduction_check(lagrangian7(), {exprs({"q1"})}, lambda_L7(), in, {});
  CHECK(minus.holds());

  // dq = q also solves the full equations but does not annihilate theta
  in.particular_solution = exprs({"q1"});
  const auto plus = partial_reduction_check(lagrangian7(), {exprs({"q1"})}, lambda_L7(), in, {});
  CHECK(plus.invariants_ok());
  CHECK(plus.euler_lagrange_ok());
  CHECK_FALSE(plus.theta_condition.holds());
  CHECK_FALSE(plus.holds());
}

TEST_CASE("constrained euler-lagrange residual") {
  const LagrangianSystem free{1, parse("dq1^2/2")};
  CHECK(zero(constrained_euler_lagrange_residual(free, exprs({"2"}))[0]));
  CHECK_FALSE(zero(constrained_euler_lagrange_residual(free, exprs({"q1"}))[0]));
  CHECK(zero(constrained_euler_lagrange_residual(lagrangian6(), exprs({"q1*log(q1)", "q2*(1/2-log(q1))"}))[0]));
}

}  // TEST_SUITE
