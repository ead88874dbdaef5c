#include "lsym/simplify.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>

namespace lsym {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

// Largest integer power of a sum that is expanded; beyond it the power stays opaque.
constexpr long kMaxExpand = 12;
constexpr int kMaxDivisionSteps = 20000;

using Mono = std::vector<std::pair<Expr, Rational>>;

int mono_cmp(const Mono& a, const Mono& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) return a[i].second > 0 ? 1 : -1;
    if (i == a.size() || b[j].first < a[i].first) return b[j].second > 0 ? -1 : 1;
    if (a[i].second != b[j].second) return a[i].second < b[j].second ? -1 : 1;
    ++i;
    ++j;
  }
  return 0;
}

struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const { return mono_cmp(a, b) < 0; }
};

using Poly = std::map<Mono, Rational, MonoLess>;

int poly_cmp(const Poly& a, const Poly& b) {
  auto ia = a.rbegin();
  auto ib = b.rbegin();
  for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
    if (int c = mono_cmp(ia->first, ib->first); c != 0) return c;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia == a.rend() && ib == b.rend()) return 0;
  return ia == a.rend() ? -1 : 1;
}

struct PolyLess {
  bool operator()(const Poly& a, const Poly& b) const { return poly_cmp(a, b) < 0; }
};

using Den = std::map<Poly, long, PolyLess>;

struct RatFunc {
  Poly num;
  Den den;
};

// ---- integer helpers -----------------------------------------------------

Integer floor_of(const Rational& r) {
  Integer n = numerator(r);
  const Integer d = denominator(r);
  Integer q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

bool integer_root(const Integer& v, long k, Integer& root) {
  if (v < 0) return false;
  if (v < 2) {
    root = v;
    return true;
  }
  Integer lo = 1;
  Integer hi = 2;
  auto power = [k](const Integer& x) {
    Integer out = 1;
    for (long i = 0; i < k; ++i) out *= x;
    return out;
  };
  while (power(hi) <= v) hi *= 2;
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    if (power(mid) <= v) lo = mid;
    else hi = mid;
  }
  if (power(lo) != v) return false;
  root = lo;
  return true;
}

// ---- monomial arithmetic (exact exponents, no constant folding) ----------

Mono mono_mul(const Mono& a, const Mono& b, const Rational& b_scale = 1) {
  Mono out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, b[j].second * b_scale);
      ++j;
    } else {
      Rational e = a[i].second + b[j].second * b_scale;
      if (e != 0) out.emplace_back(a[i].first, std::move(e));
      ++i;
      ++j;
    }
  }
  return out;
}

Mono mono_scale(const Mono& a, const Rational& s) {
  Mono out;
  if (s == 0) return out;
  out.reserve(a.size());
  for (const auto& [atom, e] : a) out.emplace_back(atom, e * s);
  return out;
}

// Per-atom minimum exponent over all terms (absent atoms count as 0).
Mono min_shift(const Poly& p) {
  std::map<Expr, Rational> mins;
  for (const auto& [m, c] : p)
    for (const auto& [a, e] : m) mins.emplace(a, Rational(0));
  for (auto& [a, lo] : mins) {
    bool first = true;
    for (const auto& [m, c] : p) {
      auto it = std::find_if(m.begin(), m.end(), [&](const auto& pr) { return pr.first == a; });
      const Rational e = it == m.end() ? Rational(0) : it->second;
      if (first || e < lo) lo = e;
      first = false;
    }
  }
  Mono out;
  for (auto& [a, lo] : mins)
    if (lo != 0) out.emplace_back(a, lo);
  return out;
}

Poly poly_shift_raw(const Poly& p, const Mono& s, const Rational& scale) {
  Poly out;
  for (const auto& [m, c] : p) out.emplace(mono_mul(m, s, scale), c);
  return out;
}

// Folds integer parts of constant-base atoms into the coefficient.
void normalize_term(Rational& coef, Mono& m) {
  for (auto it = m.begin(); it != m.end();) {
    if (!it->first.is_constant()) {
      ++it;
      continue;
    }
    const Rational& base = it->first.value();
    Rational e = it->second;
    const Integer fl = floor_of(e);
    if (fl != 0) {
      coef *= rational_pow(base, fl.convert_to<long>());
      e -= Rational(fl);
    }
    if (e != 0) {
      const Integer b = denominator(e);
      Integer rn;
      Integer rd;
      if (b <= 64 && integer_root(numerator(base), b.convert_to<long>(), rn) &&
          integer_root(denominator(base), b.convert_to<long>(), rd)) {
        coef *= rational_pow(Rational(rn, rd), numerator(e).convert_to<long>());
        e = 0;
      }
    }
    if (e == 0) {
      it = m.erase(it);
    } else {
      it->second = e;
      ++it;
    }
  }
}

void add_term(Poly& p, Rational coef, Mono m) {
  if (coef == 0) return;
  normalize_term(coef, m);
  auto [it, inserted] = p.try_emplace(std::move(m), coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) p.erase(it);
  }
}

Poly poly_mul_raw(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) add_term(out, ca * cb, mono_mul(ma, mb));
  return out;
}

void poly_add_into(Poly& acc, const Poly& b, const Rational& scale = 1) {
  for (const auto& [m, c] : b) add_term(acc, c * scale, m);
}

// Exact division with quotient exponents kept non-negative after shifting.
std::optional<Poly> divide_exact(const Poly& a, const Poly& f) {
  if (a.empty()) return Poly{};
  const Mono s = min_shift(a);
  Poly r = poly_shift_raw(a, s, -1);
  const auto& [lf_mono, lf_coef] = *f.rbegin();
  Poly q;
  for (int step = 0; !r.empty(); ++step) {
    if (step > kMaxDivisionSteps) return std::nullopt;
    const auto& [lm, lc] = *r.rbegin();
    Mono qm = mono_mul(lm, lf_mono, -1);
    for (const auto& pr : qm)
      if (pr.second < 0) return std::nullopt;
    const Rational qc = lc / lf_coef;
    Poly sub;
    for (const auto& [m, c] : f) sub.emplace(mono_mul(qm, m), c * qc);
    for (const auto& [m, c] : sub) {
      auto [it, inserted] = r.try_emplace(m, Rational(-c));
      if (!inserted) {
        it->second -= c;
        if (it->second == 0) r.erase(it);
      }
    }
    auto [it, inserted] = q.try_emplace(std::move(qm), qc);
    if (!inserted) {
      it->second += qc;
      if (it->second == 0) q.erase(it);
    }
  }
  Poly out;
  for (const auto& [m, c] : q) add_term(out, c, mono_mul(m, s));
  return out;
}

struct Primitive {
  Rational coef;
  Mono shift;
  Poly poly;
};

// p = coef * shift * poly with poly free of monomial content and leading coefficient 1.
Primitive primitive(const Poly& p) {
  Primitive out;
  out.shift = min_shift(p);
  Poly shifted = poly_shift_raw(p, out.shift, -1);
  out.coef = shifted.rbegin()->second;
  for (auto& [m, c] : shifted) c /= out.coef;
  out.poly = std::move(shifted);
  return out;
}

bool is_sum_atom(const Expr& atom) { return atom.kind() == NodeKind::Sum; }

// ---- the canonicalizer ----------------------------------------------------

class Canon {
 public:
  RatFunc canon(const Expr& e) {
    if (auto it = memo_.find(e); it != memo_.end()) return it->second;
    RatFunc r = compute(e);
    memo_.emplace(e, r);
    return r;
  }

  Expr render(const RatFunc& r) {
    ExprVec terms;
    for (auto it = r.num.rbegin(); it != r.num.rend(); ++it) terms.push_back(render_term(it->second, it->first));
    Expr n = add(std::move(terms));
    if (r.den.empty()) return n;
    ExprVec dens;
    for (const auto& [f, k] : r.den) dens.push_back(pow(render_poly(f), num(k)));
    return quot(n, mul(std::move(dens)));
  }

 private:
  static RatFunc constant(const Rational& c) {
    RatFunc r;
    if (c != 0) r.num.emplace(Mono{}, c);
    return r;
  }

  RatFunc atom(const Expr& key, const Rational& e) {
    RatFunc r;
    add_term(r.num, 1, Mono{{key, e}});
    return settle(std::move(r));
  }

  Expr render_poly(const Poly& p) { return render(RatFunc{p, {}}); }

  Expr render_mono(const Mono& m) { return render_term(1, m); }

  bool monomial_type(const Expr& x) {
    const RatFunc r = canon(x);
    return r.den.empty() && r.num.size() == 1 && r.num.begin()->second == 1;
  }

  Expr render_term(const Rational& c, const Mono& m) {
    ExprVec up{num(c)};
    ExprVec down;
    for (const auto& [a, e] : m) {
      if (a.kind() == NodeKind::Function && a.function() == FunctionKind::Exp &&
          monomial_type(a.operand(0))) {
        up.push_back(exp(mul({num(e), a.operand(0)})));
      } else if (e > 0) {
        up.push_back(pow(a, num(e)));
      } else {
        down.push_back(pow(a, num(-e)));
      }
    }
    Expr top = mul(std::move(up));
    if (down.empty()) return top;
    return quot(top, mul(std::move(down)));
  }

  // Re-expands sum atoms that reached an integer exponent.
  RatFunc settle(RatFunc r) {
    bool pending = false;
    for (const auto& [m, c] : r.num) {
      for (const auto& [a, e] : m) {
        if (is_sum_atom(a) && is_integer(e) && abs(e) <= kMaxExpand) {
          pending = true;
          break;
        }
      }
      if (pending) break;
    }
    if (!pending) return r;
    RatFunc kept;
    RatFunc expanded;
    for (const auto& [m, c] : r.num) {
      auto hit = std::find_if(m.begin(), m.end(), [](const auto& pr) {
        return is_sum_atom(pr.first) && is_integer(pr.second) && abs(pr.second) <= kMaxExpand;
      });
      if (hit == m.end()) {
        add_term(kept.num, c, m);
        continue;
      }
      Mono rest;
      for (const auto& pr : m)
        if (&pr != &*hit) rest.push_back(pr);
      RatFunc term;
      add_term(term.num, c, rest);
      const long k = numerator(hit->second).convert_to<long>();
      expanded = add_rf(expanded, mul_rf(term, pow_int(canon(hit->first), k)));
    }
    RatFunc out = add_rf(kept, expanded);
    if (!r.den.empty()) out = mul_rf(out, RatFunc{Poly{{Mono{}, Rational(1)}}, r.den});
    return out;
  }

  static void cancel(RatFunc& r) {
    if (r.num.empty()) {
      r.den.clear();
      return;
    }
    for (auto it = r.den.begin(); it != r.den.end();) {
      while (it->second > 0) {
        auto q = divide_exact(r.num, it->first);
        if (!q) break;
        r.num = std::move(*q);
        --it->second;
      }
      if (it->second == 0) it = r.den.erase(it);
      else ++it;
    }
  }

  static Poly expand_den(const Den& d) {
    Poly out{{Mono{}, Rational(1)}};
    for (const auto& [f, k] : d)
      for (long i = 0; i < k; ++i) out = poly_mul_raw(out, f);
    return out;
  }

  RatFunc mul_rf(const RatFunc& a, const RatFunc& b) {
    if (a.num.empty() || b.num.empty()) return {};
    RatFunc r = settle(RatFunc{poly_mul_raw(a.num, b.num), {}});
    for (const auto* d : {&a.den, &b.den})
      for (const auto& [f, k] : *d) r.den[f] += k;
    cancel(r);
    return r;
  }

  RatFunc add_rf(const RatFunc& a, const RatFunc& b) {
    if (a.num.empty()) return b;
    if (b.num.empty()) return a;
    if (a.den.size() == b.den.size() && std::equal(a.den.begin(), a.den.end(), b.den.begin())) {
      RatFunc r{a.num, a.den};
      poly_add_into(r.num, b.num);
      cancel(r);
      return r;
    }
    Den lcm = a.den;
    for (const auto& [f, k] : b.den) {
      long& slot = lcm[f];
      slot = std::max(slot, k);
    }
    auto missing = [&](const Den& have) {
      Den out;
      for (const auto& [f, k] : lcm) {
        auto it = have.find(f);
        const long got = it == have.end() ? 0 : it->second;
        if (k > got) out[f] = k - got;
      }
      return out;
    };
    RatFunc sa = mul_rf(RatFunc{a.num, {}}, RatFunc{expand_den(missing(a.den)), {}});
    RatFunc sb = mul_rf(RatFunc{b.num, {}}, RatFunc{expand_den(missing(b.den)), {}});
    RatFunc r;
    if (sa.den.empty() && sb.den.empty()) {
      r.num = std::move(sa.num);
      poly_add_into(r.num, sb.num);
      r.den = std::move(lcm);
      cancel(r);
      return r;
    }
    for (const auto& [f, k] : lcm) {
      sa.den[f] += k;
      sb.den[f] += k;
    }
    return add_rf(sa, sb);
  }

  static RatFunc scale(RatFunc r, const Rational& s) {
    if (s == 0) return {};
    for (auto& [m, c] : r.num) c *= s;
    return r;
  }

  RatFunc inverse(const RatFunc& a) {
    RatFunc base;
    if (a.num.size() == 1) {
      const auto& [m, c] = *a.num.begin();
      add_term(base.num, Rational(1) / c, mono_scale(m, -1));
    } else {
      Primitive pr = primitive(a.num);
      add_term(base.num, Rational(1) / pr.coef, mono_scale(pr.shift, -1));
      base.den[pr.poly] = 1;
    }
    base = settle(std::move(base));
    if (a.den.empty()) return base;
    return mul_rf(base, RatFunc{expand_den(a.den), {}});
  }

  RatFunc pow_int(const RatFunc& b, long k) {
    if (k == 0) return constant(1);
    if (k < 0) return pow_int(inverse(b), -k);
    RatFunc result = constant(1);
    RatFunc square = b;
    for (long e = k; e > 0; e >>= 1) {
      if (e & 1) result = mul_rf(result, square);
      if (e > 1) square = mul_rf(square, square);
    }
    return result;
  }

  RatFunc opaque_power(const RatFunc& b, const Rational& r) {
    return atom(Expr::make_node(NodeKind::Power, {render(b), num(r)}), 1);
  }

  RatFunc pow_rational(const RatFunc& b, const Rational& r) {
    if (r == 0) return constant(1);
    if (b.num.empty()) return r > 0 ? RatFunc{} : opaque_power(b, r);
    if (is_integer(r)) {
      if ((b.num.size() > 1 || !b.den.empty()) && abs(r) > kMaxExpand) return opaque_power(b, r);
      return pow_int(b, numerator(r).convert_to<long>());
    }
    Rational coef;
    Mono m;
    if (b.num.size() == 1) {
      coef = b.num.begin()->second;
      m = b.num.begin()->first;
    } else {
      Primitive pr = primitive(b.num);
      coef = pr.coef;
      m = mono_mul(pr.shift, Mono{{render_poly(pr.poly), Rational(1)}});
    }
    if (coef < 0) return opaque_power(b, r);
    Mono out = mono_scale(m, r);
    if (coef != 1) out = mono_mul(out, Mono{{num(coef), r}});
    for (const auto& [f, k] : b.den) out = mono_mul(out, Mono{{render_poly(f), Rational(-k) * r}});
    RatFunc res;
    add_term(res.num, 1, std::move(out));
    return settle(std::move(res));
  }

  RatFunc log_const(const Rational& c) {
    RatFunc r;
    const Integer n = numerator(c);
    const Integer d = denominator(c);
    if (n != 1) r = add_rf(r, atom(Expr::make_function(FunctionKind::Log, num(Rational(n))), 1));
    if (d != 1) r = add_rf(r, scale(atom(Expr::make_function(FunctionKind::Log, num(Rational(d))), 1), -1));
    return r;
  }

  RatFunc log_atom(const Expr& a) {
    if (a.kind() == NodeKind::Function && a.function() == FunctionKind::Exp) return canon(a.operand(0));
    if (a.is_constant()) return log_const(a.value());
    return atom(Expr::make_function(FunctionKind::Log, a), 1);
  }

  RatFunc log_mono(const Mono& m) {
    RatFunc r;
    for (const auto& [a, e] : m) r = add_rf(r, scale(log_atom(a), e));
    return r;
  }

  RatFunc canon_log(const RatFunc& a) {
    if (a.num.empty()) return atom(Expr::make_function(FunctionKind::Log, num(0)), 1);
    RatFunc r;
    if (a.num.size() == 1) {
      const auto& [m, c] = *a.num.begin();
      if (c < 0) return atom(Expr::make_function(FunctionKind::Log, render(a)), 1);
      r = add_rf(log_const(c), log_mono(m));
    } else {
      Primitive pr = primitive(a.num);
      if (pr.coef < 0) return atom(Expr::make_function(FunctionKind::Log, render(a)), 1);
      r = add_rf(log_const(pr.coef), log_mono(pr.shift));
      r = add_rf(r, atom(Expr::make_function(FunctionKind::Log, render_poly(pr.poly)), 1));
    }
    for (const auto& [f, k] : a.den)
      r = add_rf(r, scale(atom(Expr::make_function(FunctionKind::Log, render_poly(f)), 1), -k));
    return r;
  }

  RatFunc canon_exp(const RatFunc& a) {
    if (!a.den.empty()) return atom(Expr::make_function(FunctionKind::Exp, render(a)), 1);
    RatFunc r = constant(1);
    for (const auto& [m, c] : a.num) {
      if (m.size() == 1 && m.front().second == 1 && m.front().first.kind() == NodeKind::Function &&
          m.front().first.function() == FunctionKind::Log) {
        r = mul_rf(r, pow_rational(canon(m.front().first.operand(0)), c));
      } else {
        r = mul_rf(r, atom(Expr::make_function(FunctionKind::Exp, render_mono(m)), c));
      }
    }
    return r;
  }

  // Factor-wise, so a rendered denominator reads back as the same factors.
  RatFunc reciprocal(const Expr& d, const RatFunc& whole) {
    if (d.kind() == NodeKind::Product) {
      RatFunc r = constant(1);
      for (const Expr& op : d.operands()) r = mul_rf(r, reciprocal(op, canon(op)));
      return r;
    }
    if (d.kind() == NodeKind::Power && d.operand(1).is_constant() && is_integer(d.operand(1).value()) &&
        d.operand(1).value() > 0 && d.operand(1).value() <= kMaxExpand) {
      const Expr& base = d.operand(0);
      return pow_int(reciprocal(base, canon(base)), numerator(d.operand(1).value()).convert_to<long>());
    }
    return inverse(whole);
  }

  RatFunc compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Constant: return constant(e.value());
      case NodeKind::Variable: return atom(e, 1);
      case NodeKind::Sum: {
        RatFunc r;
        for (const Expr& op : e.operands()) r = add_rf(r, canon(op));
        return r;
      }
      case NodeKind::Product: {
        RatFunc r = constant(1);
        for (const Expr& op : e.operands()) {
          r = mul_rf(r, canon(op));
          if (r.num.empty()) break;
        }
        return r;
      }
      case NodeKind::Negate: return scale(canon(e.operand(0)), -1);
      case NodeKind::Quotient: {
        RatFunc d = canon(e.operand(1));
        if (d.num.empty()) return atom(normalize(e), 1);
        RatFunc n = canon(e.operand(0));
        if (n.num.empty()) return {};
        return mul_rf(n, reciprocal(e.operand(1), d));
      }
      case NodeKind::Power: {
        RatFunc b = canon(e.operand(0));
        RatFunc x = canon(e.operand(1));
        if (x.num.empty()) return constant(1);
        if (x.den.empty() && x.num.size() == 1 && x.num.begin()->first.empty())
          return pow_rational(b, x.num.begin()->second);
        if (b.num.empty()) return atom(Expr::make_node(NodeKind::Power, {render(b), render(x)}), 1);
        return canon_exp(mul_rf(x, canon_log(b)));
      }
      case NodeKind::Function: {
        RatFunc a = canon(e.operand(0));
        switch (e.function()) {
          case FunctionKind::Exp: return canon_exp(a);
          case FunctionKind::Log: return canon_log(a);
          case FunctionKind::Sqrt: return pow_rational(a, Rational(1, 2));
          case FunctionKind::Sin:
          case FunctionKind::Cos: {
            Expr folded = apply(e.function(), render(a));
            if (folded.is_constant()) return constant(folded.value());
            return atom(folded, 1);
          }
        }
        break;
      }
    }
    return atom(e, 1);
  }

  std::unordered_map<Expr, RatFunc, ExprHash> memo_;
};

}  // namespace

Expr simplify(const Expr& e) {
  Canon c;
  return c.render(c.canon(e));
}

bool simplifies_to_zero(const Expr& e) {
  Canon c;
  return c.canon(e).num.empty();
}

}  // namespace lsym
