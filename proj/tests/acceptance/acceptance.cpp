// Acceptance gate: one pass/fail line per criterion.
//
//   lsym_acceptance [path/to/lsym]
//
// The CLI path is needed for the determinism criterion, which runs the
// corpus command twice.

#include <array>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lsym/lagrangian.hpp"
#include "lsym/lambda.hpp"
#include "lsym/numeric.hpp"
#include "lsym/simplify.hpp"
#include "lsym/symmetry.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace lsym;
using namespace lsym::test;

namespace {

class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  template <class T>
  void note(const std::string& key, T value) {
    std::ostringstream s;
    s << key << '=' << std::setprecision(3) << value;
    notes_.push_back(s.str());
  }
  void crash(const std::string& what) { failed_.push_back("exception: " + what); }

  [[nodiscard]] bool passed() const { return failed_.empty(); }
  [[nodiscard]] std::string summary() const {
    std::string out;
    const auto& items = passed() ? notes_ : failed_;
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? ", " : "") + items[k];
    return out;
  }

 private:
  std::vector<std::string> failed_;
  std::vector<std::string> notes_;
};

double max_drift(const Series& s) {
  double d = 0;
  for (double v : s.values) d = std::max(d, std::abs(v - s.values.front()));
  return d;
}

void example1(Criterion& c) {
  const PhaseSystem osc = oscillator();
  const auto scaling = field({"q1"}, {"p1"});
  const Expr S = compute_S(osc, scaling);
  c.expect(is_identically_zero(S - num(2), {}).tag == ZeroTag::ProvenZero, "S - 2 not ProvenZero");

  const PhaseSystem two{2, parse("(p1^2+q1^2)/2+(p2^2+q2^2)/2")};
  const auto opposite = field({"q1", "-q2"}, {"p1", "-p2"});
  c.expect(zero(compute_S(two, opposite)), "S != 0 for the n=2 field");
  c.expect(!generating_function_test(two, opposite, {}, {}).closed(), "closedness holds for the n=2 field");
  c.expect(classify_symmetry_case(two, opposite, {}, {}).tag == SymmetryCase::CaseII_SZeroNoG, "n=2 not case ii");

  const auto X1 = scale_field(scaling, num(2) * osc.H);
  const Expr S1 = compute_S(osc, X1);
  c.expect(zero(S1 - num(8) * osc.H), "S1 != 8H");
  c.expect(check_first_integral(osc, S1, {}).holds(), "S1 not a first integral");
  c.expect(classify_symmetry_case(osc, X1, {}, {}).tag == SymmetryCase::CaseIII_SNonconstant, "X1 not case iii");
  c.note("S", format(simplify(S)));
}

void example2_(Criterion& c) {
  const PhaseSystem sys = example2();
  c.expect(check_lambda_symmetry(sys, shift2(), lambda2(), {}).holds(), "lambda symmetry");
  const auto g = check_lambda_constant_G(sys, shift2(), lambda2(), parse("q1+q2"), {});
  c.expect(g.holds(), "DtG law");
  c.expect(zero(g.Gdot + parse("q1+q2")), "G-dot != -G");

  const auto r = reduced_system(sys, shift2(), lambda2(), chart2(), {});
  c.expect(r.holds(), "reduction law");
  c.expect(all_zero(r.W, exprs({"w1+2*w2", "-w2", "-w3"})) && zero(r.Z - var("z")), "reduced equations");
  c.expect(verify_time_dependent_integral(sys, parse("(q1+q2)*exp(t)"), {}).holds(), "time-dependent integral");

  const auto traj = integrate_hamiltonian(sys, {0.3, 0.5, 0.2, 0.4}, 0.0, 1.0, 1e-3);
  const double drift = max_drift(monitor(traj, {parse("(q1+q2)*exp(t)")})[0]);
  c.expect(!traj.truncated() && drift < 1e-6, "monitor drift");
  c.note("drift", drift);
}

void example3_(Criterion& c) {
  const PhaseSystem sys = example3();
  c.expect(check_lambda_symmetry(sys, dilation3(), lambda3(), {}).holds(), "lambda symmetry");
  c.expect(!scalar_lambda_reduction(lambda3(), dilation3().Phi(), {}).has_value(), "scalar lambda found");
  const auto g = check_lambda_constant_G(sys, dilation3(), lambda3(), parse("q1*p1+q2*p2"), {});
  c.expect(zero(g.Gdot + parse("((q1*p1)^2+(q2*p2)^2)/2")), "G-dot + (w1^2+w2^2)/2");

  const auto r = reduced_system(sys, dilation3(), lambda3(), chart3(), {});
  c.expect(r.holds(), "dW/dz = M");
  c.expect(zero(differentiate(r.W[0], "z")) && zero(r.M[0]), "W1 depends on z");
  c.expect(zero(differentiate(r.W[1], "z")) && zero(r.M[1]), "W2 depends on z");
  c.expect(!zero(r.M[2]) && !zero(differentiate(r.W[2], "z")), "M3 vanishes");
  c.expect(r.z_free.size() == 4 && r.z_free[0] && r.z_free[1] && !r.z_free[2], "z-free flags");
}

void example4_(Criterion& c) {
  const auto X = field({"q1^2*p1"}, {"0"});
  const auto L = LambdaMatrix::diagonal(exprs({"1/10", "0"}));
  const PhaseSystem sys = example4();
  c.expect(check_lambda_symmetry(sys, X, L, {}).holds(), "lambda symmetry");
  const auto s = check_lambda_constant_S(sys, X, L, {});
  c.expect(s.holds(), "DtS law");
  c.expect(zero(s.Sdot + parse("2*q1*p1/10")), "S-dot != -2 eps q p");
  c.expect(zero(s.div_lambda_phi - parse("2*q1*p1/10")), "div(Lambda Phi)");

  const PhaseSystem exact = example4("0");
  c.expect(check_point_symmetry(exact, X, {}).holds(), "eps=0 exact symmetry");
  c.expect(zero(compute_S(exact, X) - parse("2*q1*p1")), "eps=0 S != 2qp");
  c.expect(check_first_integral(exact, parse("2*q1*p1"), {}).holds(), "eps=0 S not conserved");
  const auto traj = integrate_hamiltonian(exact, {0.7, 0.9}, 0.0, 1.0, 1e-3);
  const double drift = max_drift(monitor(traj, {parse("2*q1*p1")})[0]);
  c.expect(drift < 1e-8, "eps=0 drift");
  c.note("drift", drift);
}

void example5(Criterion& c) {
  const ConfigVectorField XL{exprs({"q1", "1"})};
  const auto LL = ldiag({"q1", "q1"});
  c.expect(check_lagrangian_lambda_invariance(lagrangian5(), XL, LL, {}).holds(), "Lambda(L)-invariance");
  const auto ext = extend_vector_field(XL);
  c.expect(all_zero(ext.X.Phi(), exprs({"q1", "1", "-p1", "0"})), "extended X");
  const auto lam = extend_lambda(XL, LL, std::nullopt, {});
  const std::vector<ExprVec> expected{exprs({"q1", "0", "0", "0"}), exprs({"0", "q1", "0", "0"}),
                                      exprs({"-p1", "-p2", "q1", "0"}), exprs({"0", "0", "0", "0"})};
  bool entries = lam.L.size() == 4;
  for (std::size_t i = 0; entries && i < 4; ++i) entries = all_zero(lam.L.rows[i], expected[i]);
  c.expect(entries, "extended Lambda");

  const PhaseSystem sys{2, parse(H5)};
  c.expect(verify_legendre(lagrangian5(), velocity5(), sys.H, {}).holds(), "Legendre");
  c.expect(all_zero(canonical_equations(sys),
                    exprs({"q1^2*p1+q1^2+q1*p2", "p2*exp(2*q2)/q1^2+q1*p1+q1+p2",
                           "-q1*p1^2-2*q1*p1+p2^2*exp(2*q2)/q1^3-p1*p2-p2+exp(-q2)",
                           "-p2^2*exp(2*q2)/q1^2-q1*exp(-q2)"})),
           "Hamilton equations");
  const auto g = check_lambda_constant_G(sys, ext.X, lam.L, ext.G, {});
  c.expect(g.holds() && zero(g.Gdot + parse("q1*(q1*p1+p2)")), "G-dot != -q1 G");

  const auto noether = check_noether_lambda(lagrangian5(), XL, LL, ics5(), 0.5);
  c.expect(noether.traces.size() == 3 && noether.max_residual() < 1e-5, "Noether residual");
  c.note("noether", noether.max_residual());
}

void example6_(Criterion& c) {
  const ConfigVectorField XL{exprs({"q1", "-q2"})};
  const auto LL = ldiag({"1", "1"});
  c.expect(check_lagrangian_lambda_invariance(lagrangian6(), XL, LL, {}).holds(), "Lambda(L)-invariance");
  const auto ext = extend_vector_field(XL);
  const auto lam = extend_lambda(XL, LL, std::nullopt, {});
  const auto lala = check_lala_and_corollary3(XL, LL, ext.X, lam.L, {});
  c.expect(lala.constant && lala.lambda && zero(*lala.lambda - num(1)) && lala.holds(), "corollary 3");
  c.expect(verify_legendre(lagrangian6(), velocity6(), example6().H, {}).holds(), "Legendre");

  const PhaseSystem sys = example6();
  c.expect(verify_chart(sys, ext.X, chart6(), {}).holds(), "chart");
  const auto r = reduced_system(sys, ext.X, lam.L, chart6(), {});
  c.expect(r.holds(), "reduction law");
  c.expect(zero(r.W[0] - parse("w1*w3")), "w1-dot");
  c.expect(zero(r.W[1] - parse("w3-w2")), "w2-dot");
  c.expect(zero(r.W[1] - r.W[2] + parse("w2-w3")), "G-dot != -G");
  c.expect(zero(r.Z - parse("z+w2-w3")), "z-dot");

  PartialReductionInput in;
  in.eta = exprs({"q1*q2"});
  in.theta = parse("dq1/q1-log(q1)");
  in.reduced_L = parse("theta^2/2+deta1^2/(2*eta1^2)");
  in.particular_solution = exprs({"q1*log(q1)", "q2*(1/2-log(q1))"});
  in.initial_q = {{0.5, 0.7}, {1.2, 0.4}};
  in.tol = 1e-5;
  const auto pr = partial_reduction_check(lagrangian6(), XL, LL, in, {});
  c.expect(pr.holds(), "partial reduction");
  double worst = 0;
  for (double v : pr.el_residuals) worst = std::max(worst, v);
  c.expect(!pr.el_residuals.empty() && worst <= 1e-5, "constraint flow Euler-Lagrange residual");
  c.note("el", worst);
}

void example7_(Criterion& c) {
  const ConfigVectorField XL{exprs({"q1"})};
  c.expect(check_lagrangian_lambda_invariance(lagrangian7(), XL, lambda_L7(), {}).holds(), "Lambda(L)-invariance");
  const auto ext = extend_vector_field_velocity_dependent(lagrangian7(), XL, lambda_L7(), velocity7());
  c.expect(all_zero(ext.X.psi, exprs({"-q1*p1-p1"})), "psi != -qp-p");
  c.expect(!generating_function_test(example7(), ext.X, {}, {}).closed(), "closedness holds");
  const auto s = check_lambda_constant_S(example7(), ext.X, lambda7(), {});
  c.expect(s.holds() && zero(s.S + var("q1")), "S = -q law");
  const ReductionChart chart{exprs({"q1*p1*exp(q1)"}), parse("q1"), {{"q1", parse("z")}, {"p1", parse("w1*exp(-z)/z")}}, false};
  const auto r = reduced_system(example7(), ext.X, lambda7(), chart, {});
  c.expect(r.holds() && all_zero(r.W, exprs({"-z*w1"})) && zero(r.Z - parse("-z+z*w1*exp(z)")), "reduced equations");

  PartialReductionInput in;
  in.theta = parse("(dq1/q1)*exp(-q1)+exp(-q1)");
  in.reduced_L = parse("theta^2/2");
  in.initial_q = {{0.5}, {0.9}};
  std::string accepted, euler_lagrange;
  for (const char* branch : {"-q1", "q1"}) {
    in.particular_solution = exprs({branch});
    const auto pr = partial_reduction_check(lagrangian7(), XL, lambda_L7(), in, {});
    if (pr.holds()) accepted += std::string(accepted.empty() ? "" : "|") + "dq=" + branch;
    if (pr.euler_lagrange_ok()) euler_lagrange += std::string(euler_lagrange.empty() ? "" : "|") + "dq=" + branch;
  }
  c.expect(accepted == "dq=-q1", "theta=0 branch");
  c.note("theta=0", accepted);
  c.note("euler-lagrange", euler_lagrange);
}

void properties(Criterion& c) {
  const int brackets = bracket_axiom_failures(50, 50);
  const auto derivatives = derivative_sweep(7, 200);
  const int trips = round_trip_failures(2024, 1000);
  const double order = oscillator_order(40);
  const int identities = generated_field_identity_failures();
  c.expect(brackets == 0, "bracket axioms");
  c.expect(derivatives.checked == 200 && derivatives.failures == 0, "finite differences");
  c.expect(trips == 0, "round trip");
  c.expect(order >= 3.8, "integrator order");
  c.expect(identities == 0, "S1/Y1 identities");
  c.note("order", order);
  c.note("fd", derivatives.worst);
}

std::pair<int, std::string> run_command(const std::string& cmd) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  return {status, out};
}

void determinism(Criterion& c, const std::string& cli) {
  if (cli.empty()) {
    c.expect(false, "no CLI path given");
    return;
  }
  const std::string cmd = "'" + cli + "' corpus --seed 7 --report json";
  const auto [s1, a] = run_command(cmd);
  const auto [s2, b] = run_command(cmd);
  c.expect(s1 == 0 && s2 == 0, "corpus exit status");
  c.expect(!a.empty() && a == b, "outputs differ");
  c.note("bytes", a.size());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"Example 1 suite", example1},
      {"Example 2", example2_},
      {"Example 3", example3_},
      {"Example 4", example4_},
      {"Example 5", example5},
      {"Example 6 full pipeline", example6_},
      {"Example 7 velocity-dependent Lambda", example7_},
      {"property suites", properties},
      {"determinism", [&](Criterion& c) { determinism(c, cli); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Criterion c;
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.crash(e.what());
    }
    if (!c.passed()) ++failed;
    std::cout << "criterion " << k + 1 << ' ' << (c.passed() ? "pass" : "FAIL") << "  " << criteria[k].first;
    const std::string s = c.summary();
    if (!s.empty()) std::cout << "  (" << s << ')';
    std::cout << std::endl;
  }
  std::cout << (failed ? "acceptance FAIL" : "acceptance pass") << std::endl;
  return failed ? 1 : 0;
}
