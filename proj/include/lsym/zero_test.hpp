#pragma once

// Deciding whether an expression vanishes identically on a box.
//
// First the canonical form is checked; if it is the zero constant the verdict
// is ProvenZero. Otherwise the original expression is sampled at seeded
// uniform points. Each residual is divided by 1 + (largest magnitude among
// the operands of any sum in the expression) so that cancellation between
// large terms is judged relative to their size.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lsym/evaluate.hpp"
#include "lsym/expr.hpp"

namespace lsym {

struct Interval {
  double lo = 0.2;
  double hi = 1.2;
};

class DomainBox {
 public:
  DomainBox() = default;
  explicit DomainBox(Interval fallback) : fallback_(fallback) {}

  // Throws std::invalid_argument unless lo < hi.
  void set(const std::string& variable, Interval range);
  [[nodiscard]] Interval get(std::string_view variable) const;
  [[nodiscard]] bool has(std::string_view variable) const { return ranges_.count(variable) > 0; }
  [[nodiscard]] const Interval& fallback() const { return fallback_; }
  [[nodiscard]] const std::map<std::string, Interval, std::less<>>& ranges() const { return ranges_; }

 private:
  Interval fallback_{};
  std::map<std::string, Interval, std::less<>> ranges_;
};

struct ZeroConfig {
  int samples = 100;
  std::uint64_t seed = 0;
  double abs_tol = 1e-9;
};

enum class ZeroTag { ProvenZero, NumericallyZero, NonZero };

std::string_view to_string(ZeroTag tag);

struct ZeroVerdict {
  ZeroTag tag = ZeroTag::ProvenZero;
  int samples = 0;  // points evaluated without domain errors
  double max_abs_residual = 0.0;
  double max_scaled_residual = 0.0;
  Point witness;              // NonZero only
  double witness_residual = 0.0;

  [[nodiscard]] bool holds() const { return tag != ZeroTag::NonZero; }
};

class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, Expr offender)
      : std::runtime_error(what), offender_(std::move(offender)) {}
  [[nodiscard]] const Expr& offender() const { return offender_; }

 private:
  Expr offender_;
};

ZeroVerdict is_identically_zero(const Expr& e, const DomainBox& box, const ZeroConfig& cfg = {});

// Sampling tier only (no symbolic shortcut); used by tests and benchmarks.
ZeroVerdict sample_zero(const Expr& e, const DomainBox& box, const ZeroConfig& cfg, bool parallel = true);

}  // namespace lsym
