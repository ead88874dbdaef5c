#pragma once

// Expression grammar:
//   identifiers  [A-Za-z_][A-Za-z0-9_]*
//   numbers      decimal with optional fraction and exponent, read exactly
//   binary       + - * /  (left-associative), ^ (right-associative, tightest)
//   unary        leading minus, binding looser than ^ and tighter than * /
//   calls        exp(e) log(e) sin(e) cos(e) sqrt(e)
// Whitespace is insignificant.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lsym/expr.hpp"

namespace lsym {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  // Byte offset into the input where the problem was detected.
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Expr parse(std::string_view text);

}  // namespace lsym
