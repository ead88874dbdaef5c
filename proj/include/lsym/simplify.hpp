#pragma once

// Canonical simplification.
//
// simplify() maps an expression to a canonical rational function: a sum of
// monomials over "atoms" (variables, function applications, irreducible
// powers of sums) divided by a product of primitive polynomial factors.
// Like terms are collected, products expanded (up to a size guard), and
// common polynomial factors cancelled by exact division.
//
// exp/log/sqrt are rewritten on the positive real branch: log(a*b) splits,
// log(exp(u)) = u, exp(c*log(u)) = u^c, (x^a)^b = x^(a*b). The result agrees
// with the input wherever logs and roots take positive arguments.

#include "lsym/expr.hpp"

namespace lsym {

Expr simplify(const Expr& e);

// True iff the canonical form of `e` is the zero constant.
bool simplifies_to_zero(const Expr& e);

}  // namespace lsym
