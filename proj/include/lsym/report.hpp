#pragma once

// Check orchestration over a problem file and verdict reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsym/evaluate.hpp"
#include "lsym/problem.hpp"
#include "lsym/zero_test.hpp"

namespace lsym {

enum class Verdict { ProvenZero, NumericallyZero, NonZero, Skipped, Error };

std::string_view to_string(Verdict v);

struct CheckRecord {
  std::string part;  // empty for single-part problems
  std::string name;
  std::string eq;
  Verdict verdict = Verdict::Skipped;
  double max_residual = 0.0;
  std::optional<Point> witness;
  std::string detail;
  bool expected_nonzero = false;
  double wall_ms = 0.0;

  // An unexpected NonZero, an Error, or an expected failure that held.
  [[nodiscard]] bool failed() const;
};

struct Report {
  std::string problem;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;

  [[nodiscard]] bool ok() const;
};

struct RunConfig {
  ZeroConfig zero;
  // Empty: the problem's own selection, or every check.
  std::vector<std::string> selection;
};

// Stable check names in execution order for each problem kind.
const std::vector<std::string>& hamiltonian_checks();
const std::vector<std::string>& lagrangian_checks();
std::string_view check_equation(std::string_view name);

Report run_checks(const ProblemFile& problem, const RunConfig& cfg);

enum class ReportFormat { Text, Json };

struct EmitOptions {
  bool timing = false;  // include wall time (makes output run-dependent)
};

void emit_report(const Report& report, ReportFormat format, std::ostream& out, const EmitOptions& opts = {});
void emit_reports(const std::vector<Report>& reports, std::uint64_t seed, ReportFormat format, std::ostream& out,
                  const EmitOptions& opts = {});

}  // namespace lsym
