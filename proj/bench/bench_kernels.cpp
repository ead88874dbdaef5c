// Serial vs OpenMP batch kernels.
//
//   lsym_bench --benchmark_filter=Batch

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lsym/evaluate.hpp"
#include "lsym/parse.hpp"
#include "lsym/zero_test.hpp"

namespace {

const char* kExpr = "q1^2*p1^2*exp(2*q1)/2-q1*p1+sin(q2*p2)*log(1+q1^2)+(p1-p2)^2/2";
const std::vector<std::string> kVars{"q1", "q2", "p1", "p2"};

std::vector<double> points(std::size_t count) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.2, 1.2);
  std::vector<double> xs(count * kVars.size());
  for (double& x : xs) x = u(rng);
  return xs;
}

template <void (*Kernel)(const lsym::Tape&, const double*, std::size_t, lsym::EvalResult*)>
void Batch(benchmark::State& state) {
  const lsym::Tape tape(lsym::parse(kExpr), kVars);
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto xs = points(count);
  std::vector<lsym::EvalResult> out(count);
  for (auto _ : state) {
    Kernel(tape, xs.data(), count, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void SampleZero(benchmark::State& state, bool parallel) {
  const lsym::Expr e = lsym::parse(std::string(kExpr) + "-(" + kExpr + ")*(1+1e-30)");
  lsym::ZeroConfig cfg;
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lsym::sample_zero(e, {}, cfg, parallel));
}

}  // namespace

BENCHMARK_TEMPLATE(Batch, lsym::eval_batch_serial)->RangeMultiplier(8)->Range(1 << 9, 1 << 18)->UseRealTime();
BENCHMARK_TEMPLATE(Batch, lsym::eval_batch_parallel)->RangeMultiplier(8)->Range(1 << 9, 1 << 18)->UseRealTime();
BENCHMARK_CAPTURE(SampleZero, serial, false)->Arg(100)->Arg(10000)->UseRealTime();
BENCHMARK_CAPTURE(SampleZero, parallel, true)->Arg(100)->Arg(10000)->UseRealTime();

BENCHMARK_MAIN();
