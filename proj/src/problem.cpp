#include "lsym/problem.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lsym/parse.hpp"

namespace lsym {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(int n, Bindings replacements) : n_(n), repl_(std::move(replacements)) {}

  Expr expr(const json& j, const std::string& field) const {
    std::string text;
    if (j.is_string()) text = j.get<std::string>();
    else if (j.is_number()) text = j.dump();
    else throw SchemaError(field, "expected an expression string");
    try {
      return substitute(parse(text), repl_);
    } catch (const ParseError& e) {
      throw SchemaError(field, std::string(e.what()) + " at offset " + std::to_string(e.offset()));
    }
  }

  ExprVec exprs(const json& j, const std::string& field, std::optional<std::size_t> size = std::nullopt) const {
    if (!j.is_array()) throw SchemaError(field, "expected an array of expressions");
    if (size && j.size() != *size)
      throw SchemaError(field, "arity mismatch: expected " + std::to_string(*size) + " entries, got " +
                                   std::to_string(j.size()));
    ExprVec out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expr(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  LambdaMatrix matrix(const json& j, const std::string& field, int size, LambdaSide side) const {
    LambdaMatrix m;
    m.side = side;
    const json* rows = &j;
    if (j.is_object()) {
      m.velocity_dependent = j.value("velocity_dependent", false);
      if (j.contains("diagonal")) {
        m = LambdaMatrix::diagonal(exprs(j["diagonal"], field + ".diagonal"), side);
        m.velocity_dependent = j.value("velocity_dependent", false);
        rows = nullptr;
      } else if (j.contains("entries")) {
        rows = &j["entries"];
      } else {
        throw SchemaError(field, "expected entries or diagonal");
      }
    }
    if (rows) {
      if (!rows->is_array()) throw SchemaError(field, "expected a matrix");
      for (std::size_t i = 0; i < rows->size(); ++i)
        m.rows.push_back(exprs((*rows)[i], field + "[" + std::to_string(i) + "]"));
    }
    std::vector<std::string> velocities;
    for (int i = 1; i <= n_; ++i) {
      velocities.push_back(dq_name(i));
      if (side == LambdaSide::Hamiltonian) velocities.push_back(dp_name(i));
    }
    try {
      validate_lambda(m, size, velocities);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(field, std::string("arity mismatch: ") + e.what());
    }
    return m;
  }

  std::string name(const std::string& raw) const {
    auto it = repl_.find(raw);
    return it != repl_.end() && it->second.is_variable() ? it->second.name() : raw;
  }

 private:
  int n_;
  Bindings repl_;
};

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> strings(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : j) {
    if (!e.is_string()) throw SchemaError(field, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

ProblemFile from_json(const json& j, const std::string& fallback_name) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  ProblemFile pf;
  pf.name = j.value("name", fallback_name);

  if (!j.contains("n")) throw SchemaError("n", "missing required field");
  if (!j["n"].is_number_integer() || j["n"].get<int>() < 1) throw SchemaError("n", "expected a positive integer");
  pf.n = j["n"].get<int>();
  const int n = pf.n;

  const std::string kind = j.value("kind", "hamiltonian");
  if (kind == "hamiltonian") pf.kind = ProblemKind::Hamiltonian;
  else if (kind == "lagrangian") pf.kind = ProblemKind::Lagrangian;
  else throw SchemaError("kind", "expected hamiltonian or lagrangian");

  Bindings repl;
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw SchemaError("parameters", "expected an object");
    for (const auto& [key, value] : j["parameters"].items()) {
      Rational r;
      const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
      if (!parse_decimal(text, r)) throw SchemaError("parameters." + key, "expected a decimal number");
      pf.parameters[key] = r;
      repl.emplace(key, num(r));
    }
  }
  if (n == 1) {
    repl.emplace("q", var(q_name(1)));
    repl.emplace("p", var(p_name(1)));
    repl.emplace("dq", var(dq_name(1)));
    repl.emplace("dp", var(dp_name(1)));
  }
  const Reader rd(n, repl);
  const auto un = static_cast<std::size_t>(n);

  if (j.contains("hamiltonian")) pf.hamiltonian = rd.expr(j["hamiltonian"], "hamiltonian");
  if (j.contains("lagrangian")) pf.lagrangian = rd.expr(j["lagrangian"], "lagrangian");
  if (pf.kind == ProblemKind::Hamiltonian && !pf.hamiltonian)
    throw SchemaError("hamiltonian", "missing required field");
  if (pf.kind == ProblemKind::Lagrangian && !pf.lagrangian) throw SchemaError("lagrangian", "missing required field");

  if (!j.contains("vector_field")) throw SchemaError("vector_field", "missing required field");
  const json& vf = j["vector_field"];
  if (!vf.is_object() || !vf.contains("phi")) throw SchemaError("vector_field.phi", "missing required field");
  pf.phi = rd.exprs(vf["phi"], "vector_field.phi", un);
  if (vf.contains("psi")) pf.psi = rd.exprs(vf["psi"], "vector_field.psi", un);
  if (vf.contains("tau")) pf.tau = rd.expr(vf["tau"], "vector_field.tau");
  if (pf.kind == ProblemKind::Hamiltonian && !pf.psi) throw SchemaError("vector_field.psi", "missing required field");

  const LambdaSide side = pf.kind == ProblemKind::Hamiltonian ? LambdaSide::Hamiltonian : LambdaSide::Lagrangian;
  const int lsize = side == LambdaSide::Hamiltonian ? 2 * n : n;
  if (j.contains("lambda")) pf.lambda = rd.matrix(j["lambda"], "lambda", lsize, side);

  if (j.contains("box")) {
    if (!j["box"].is_object()) throw SchemaError("box", "expected an object");
    for (const auto& [key, value] : j["box"].items()) {
      const auto r = numbers(value, "box." + key);
      if (r.size() != 2) throw SchemaError("box." + key, "expected [lo, hi]");
      try {
        pf.box.set(rd.name(key), Interval{r[0], r[1]});
      } catch (const std::invalid_argument& e) {
        throw SchemaError("box." + key, e.what());
      }
    }
  }

  if (j.contains("chart")) {
    const json& c = j["chart"];
    ReductionChart chart;
    chart.w = rd.exprs(c.at("w"), "chart.w", un * 2 - 1);
    if (!c.contains("z")) throw SchemaError("chart.z", "missing required field");
    chart.z = rd.expr(c["z"], "chart.z");
    chart.normalized = c.value("normalized", true);
    if (!c.contains("inverse") || !c["inverse"].is_object()) throw SchemaError("chart.inverse", "missing required field");
    for (const auto& [key, value] : c["inverse"].items()) chart.inverse.emplace(rd.name(key), rd.expr(value, "chart.inverse." + key));
    for (int a = 1; a <= n; ++a)
      for (const std::string& u : {q_name(a), p_name(a)})
        if (chart.inverse.find(u) == chart.inverse.end()) throw SchemaError("chart.inverse", "missing " + u);
    pf.chart = std::move(chart);
  }

  if (j.contains("candidates")) {
    const json& c = j["candidates"];
    Candidates& k = pf.candidates;
    auto opt = [&](const char* key, std::optional<Expr>& out) {
      if (c.contains(key)) out = rd.expr(c[key], std::string("candidates.") + key);
    };
    auto optv = [&](const char* key, std::optional<ExprVec>& out, std::optional<std::size_t> size) {
      if (c.contains(key)) out = rd.exprs(c[key], std::string("candidates.") + key, size);
    };
    opt("G", k.G);
    opt("S_expected", k.S_expected);
    opt("Gdot_expected", k.Gdot_expected);
    opt("gamma", k.gamma);
    opt("Gamma", k.Gamma);
    opt("H_for_legendre", k.H_for_legendre);
    opt("theta", k.theta);
    opt("reduced_L", k.reduced_L);
    opt("Z_expected", k.Z_expected);
    optv("velocity_map", k.velocity_map, un);
    optv("hamilton_expected", k.hamilton_expected, 2 * un);
    optv("psi_expected", k.psi_expected, un);
    optv("prolongation_expected", k.prolongation_expected, 2 * un);
    optv("eta", k.eta, un - 1);
    optv("W_expected", k.W_expected, 2 * un - 1);
    if (c.contains("lambda_expected"))
      k.lambda_expected = rd.matrix(c["lambda_expected"], "candidates.lambda_expected", 2 * n, LambdaSide::Hamiltonian);
    if (c.contains("lambda2_candidate"))
      k.lambda2_candidate = rd.matrix(c["lambda2_candidate"], "candidates.lambda2_candidate", n, LambdaSide::Lagrangian);
    if (c.contains("case_expected")) k.case_expected = c["case_expected"].get<std::string>();
    if (c.contains("lambda_scalar_expected")) {
      const std::string text = c["lambda_scalar_expected"].is_string() ? c["lambda_scalar_expected"].get<std::string>()
                                                                       : c["lambda_scalar_expected"].dump();
      k.lambda_scalar_expected = text;
      if (text != "none") k.lambda_scalar_value = rd.expr(c["lambda_scalar_expected"], "candidates.lambda_scalar_expected");
    }
    if (c.contains("z_free_expected")) {
      std::vector<bool> flags;
      for (const json& b : c["z_free_expected"]) flags.push_back(b.get<bool>());
      if (flags.size() != 2 * un) throw SchemaError("candidates.z_free_expected", "arity mismatch");
      k.z_free_expected = flags;
    }
    if (c.contains("particular_solution")) {
      const json& ps = c["particular_solution"];
      if (ps.is_array() && !ps.empty() && ps[0].is_array()) {
        for (std::size_t i = 0; i < ps.size(); ++i)
          k.particular_solutions.push_back(
              rd.exprs(ps[i], "candidates.particular_solution[" + std::to_string(i) + "]", un));
      } else {
        k.particular_solutions.push_back(rd.exprs(ps, "candidates.particular_solution", un));
      }
    }
    if (c.contains("initial_conditions")) {
      const json& ics = c["initial_conditions"];
      if (!ics.is_array()) throw SchemaError("candidates.initial_conditions", "expected an array");
      for (std::size_t i = 0; i < ics.size(); ++i)
        k.initial_conditions.push_back(numbers(ics[i], "candidates.initial_conditions[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("monitors")) {
    const json& ms = j["monitors"];
    if (!ms.is_array()) throw SchemaError("monitors", "expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string f = "monitors[" + std::to_string(i) + "]";
      const json& m = ms[i];
      MonitorSpec spec;
      spec.label = m.value("label", "monitor" + std::to_string(i));
      if (!m.contains("expr")) throw SchemaError(f + ".expr", "missing required field");
      spec.expr = rd.expr(m["expr"], f + ".expr");
      if (!m.contains("u0")) throw SchemaError(f + ".u0", "missing required field");
      spec.u0 = numbers(m["u0"], f + ".u0");
      if (spec.u0.size() != 2 * un) throw SchemaError(f + ".u0", "arity mismatch");
      if (m.contains("t1")) spec.t1 = number(m["t1"], f + ".t1");
      if (m.contains("step")) spec.h = number(m["step"], f + ".step");
      if (m.contains("tol")) spec.tol = number(m["tol"], f + ".tol");
      if (m.contains("gamma")) spec.gamma = rd.expr(m["gamma"], f + ".gamma");
      pf.monitors.push_back(std::move(spec));
    }
  }
  if (j.contains("horizon")) pf.horizon = number(j["horizon"], "horizon");
  if (j.contains("select")) pf.select = strings(j["select"], "select");
  if (j.contains("expect_nonzero"))
    for (const std::string& s : strings(j["expect_nonzero"], "expect_nonzero")) pf.expect_nonzero.insert(s);

  if (j.contains("parts")) {
    if (!j["parts"].is_array()) throw SchemaError("parts", "expected an array");
    json base = j;
    base.erase("parts");
    base.erase("name");
    for (std::size_t i = 0; i < j["parts"].size(); ++i) {
      json merged = base;
      merged.merge_patch(j["parts"][i]);
      const std::string part_name = pf.name + "/" + j["parts"][i].value("name", std::to_string(i + 1));
      merged["name"] = part_name;
      try {
        pf.parts.push_back(from_json(merged, part_name));
      } catch (const SchemaError& e) {
        throw SchemaError("parts[" + std::to_string(i) + "]." + e.field(), e.message());
      }
    }
  }
  return pf;
}

}  // namespace

ProblemFile parse_problem(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j, name);
  } catch (const json::exception& e) {
    throw SchemaError("$", e.what());
  }
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path.stem().string());
}

}  // namespace lsym
