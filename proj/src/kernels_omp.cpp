#include <vector>

#include "lsym/evaluate.hpp"

namespace lsym {

#ifdef LSYM_HAVE_OPENMP

void eval_batch_parallel(const Tape& tape, const double* points, std::size_t count, EvalResult* out) {
  const std::size_t stride = tape.variables().size();
  const auto n = static_cast<long long>(count);
#pragma omp parallel
  {
    std::vector<double> scratch(tape.size());
#pragma omp for schedule(static)
    for (long long i = 0; i < n; ++i)
      out[i] = tape.run(points + static_cast<std::size_t>(i) * stride, scratch.data());
  }
}

bool openmp_enabled() { return true; }

#else

void eval_batch_parallel(const Tape& tape, const double* points, std::size_t count, EvalResult* out) {
  eval_batch_serial(tape, points, count, out);
}

bool openmp_enabled() { return false; }

#endif

void eval_batch(const Tape& tape, const double* points, std::size_t count, EvalResult* out) {
  // Small batches are not worth a thread team.
  if (count * tape.size() < 4096) {
    eval_batch_serial(tape, points, count, out);
  } else {
    eval_batch_parallel(tape, points, count, out);
  }
}

}  // namespace lsym
