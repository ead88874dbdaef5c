#include "lsym/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace lsym {

Tape::Tape(const Expr& root, std::vector<std::string> variables) : variables_(std::move(variables)) {
  std::unordered_map<Expr, std::uint32_t, ExprHash> index;
  auto emit = [&](auto&& self, const Expr& e) -> std::uint32_t {
    if (auto it = index.find(e); it != index.end()) return it->second;
    Instr ins{};
    auto ops = e.operands();
    switch (e.kind()) {
      case NodeKind::Constant:
        ins.op = Op::Const;
        ins.a = static_cast<std::uint32_t>(constants_.size());
        constants_.push_back(to_double(e.value()));
        break;
      case NodeKind::Variable: {
        auto it = std::find(variables_.begin(), variables_.end(), e.name());
        if (it == variables_.end()) throw UnboundVariable(e.name());
        ins.op = Op::Var;
        ins.a = static_cast<std::uint32_t>(it - variables_.begin());
        break;
      }
      case NodeKind::Sum:
      case NodeKind::Product: {
        std::vector<std::uint32_t> kids;
        for (const Expr& op : ops) kids.push_back(self(self, op));
        ins.op = e.kind() == NodeKind::Sum ? Op::Add : Op::Mul;
        ins.first = static_cast<std::uint32_t>(args_.size());
        ins.count = static_cast<std::uint32_t>(kids.size());
        args_.insert(args_.end(), kids.begin(), kids.end());
        break;
      }
      case NodeKind::Power:
      case NodeKind::Quotient:
        ins.a = self(self, ops[0]);
        ins.b = self(self, ops[1]);
        ins.op = e.kind() == NodeKind::Power ? Op::Pow : Op::Div;
        break;
      case NodeKind::Negate:
        ins.a = self(self, ops[0]);
        ins.op = Op::Neg;
        break;
      case NodeKind::Function:
        ins.a = self(self, ops[0]);
        switch (e.function()) {
          case FunctionKind::Exp: ins.op = Op::Exp; break;
          case FunctionKind::Log: ins.op = Op::Log; break;
          case FunctionKind::Sin: ins.op = Op::Sin; break;
          case FunctionKind::Cos: ins.op = Op::Cos; break;
          case FunctionKind::Sqrt: ins.op = Op::Sqrt; break;
        }
        break;
    }
    const auto slot = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back(ins);
    nodes_.push_back(e);
    index.emplace(e, slot);
    return slot;
  };
  emit(emit, root);
}

EvalResult Tape::run(const double* vars, double* v) const {
  EvalResult res;
  const std::size_t n = ops_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Instr& ins = ops_[i];
    double x = 0.0;
    switch (ins.op) {
      case Op::Const: x = constants_[ins.a]; break;
      case Op::Var: x = vars[ins.a]; break;
      case Op::Add: {
        for (std::uint32_t k = 0; k < ins.count; ++k) {
          const double t = v[args_[ins.first + k]];
          x += t;
          res.sum_scale = std::max(res.sum_scale, std::fabs(t));
        }
        break;
      }
      case Op::Mul: {
        x = 1.0;
        for (std::uint32_t k = 0; k < ins.count; ++k) x *= v[args_[ins.first + k]];
        break;
      }
      case Op::Pow: x = std::pow(v[ins.a], v[ins.b]); break;
      case Op::Div:
        if (v[ins.b] == 0.0) {
          res.failed = static_cast<std::int32_t>(i);
          return res;
        }
        x = v[ins.a] / v[ins.b];
        break;
      case Op::Neg: x = -v[ins.a]; break;
      case Op::Exp: x = std::exp(v[ins.a]); break;
      case Op::Log:
        if (!(v[ins.a] > 0.0)) {
          res.failed = static_cast<std::int32_t>(i);
          return res;
        }
        x = std::log(v[ins.a]);
        break;
      case Op::Sin: x = std::sin(v[ins.a]); break;
      case Op::Cos: x = std::cos(v[ins.a]); break;
      case Op::Sqrt:
        if (v[ins.a] < 0.0) {
          res.failed = static_cast<std::int32_t>(i);
          return res;
        }
        x = std::sqrt(v[ins.a]);
        break;
    }
    if (!std::isfinite(x)) {
      res.failed = static_cast<std::int32_t>(i);
      return res;
    }
    v[i] = x;
  }
  res.value = v[n - 1];
  return res;
}

double evaluate(const Expr& e, const Point& point) {
  std::vector<std::string> names;
  std::vector<double> values;
  for (const std::string& name : free_variables(e)) {
    auto it = point.find(name);
    if (it == point.end()) throw UnboundVariable(name);
    names.push_back(name);
    values.push_back(it->second);
  }
  Tape tape(e, std::move(names));
  std::vector<double> scratch(tape.size());
  EvalResult r = tape.run(values.data(), scratch.data());
  if (r.failed >= 0)
    throw DomainError("domain error in " + format(tape.node(static_cast<std::size_t>(r.failed))),
                      tape.node(static_cast<std::size_t>(r.failed)));
  return r.value;
}

void eval_batch_serial(const Tape& tape, const double* points, std::size_t count, EvalResult* out) {
  const std::size_t stride = tape.variables().size();
  std::vector<double> scratch(tape.size());
  for (std::size_t i = 0; i < count; ++i) out[i] = tape.run(points + i * stride, scratch.data());
}

}  // namespace lsym
