#include "lsym/parse.hpp"

#include <cctype>
#include <vector>

namespace lsym {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok type;
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
          i = j;
          while (i < s.size() && is_digit(s[i])) ++i;
        } else {
          throw ParseError("malformed exponent in number", i);
        }
      }
      out.push_back({Tok::Number, s.substr(start, i - start), start});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(s[i])) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    Tok t;
    switch (c) {
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '^': t = Tok::Caret; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({t, s.substr(i, 1), i});
    ++i;
  }
  out.push_back({Tok::End, {}, s.size()});
  return out;
}

constexpr int kUnaryPower = 25;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Expr parse_all() {
    Expr e = parse_expr(0);
    if (peek().type != Tok::End) throw ParseError("unexpected trailing input", peek().offset);
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  // Left and right binding powers for infix operators; lbp 0 means "not infix".
  static void binding(Tok t, int& lbp, int& rbp) {
    switch (t) {
      case Tok::Plus:
      case Tok::Minus: lbp = 10; rbp = 11; return;
      case Tok::Star:
      case Tok::Slash: lbp = 20; rbp = 21; return;
      case Tok::Caret: lbp = 30; rbp = 30; return;
      default: lbp = 0; rbp = 0; return;
    }
  }

  Expr parse_expr(int min_bp) {
    Expr lhs = parse_prefix();
    for (;;) {
      const Token& op = peek();
      int lbp = 0;
      int rbp = 0;
      binding(op.type, lbp, rbp);
      if (lbp == 0 || lbp < min_bp) break;
      advance();
      Expr rhs = parse_expr(rbp);
      switch (op.type) {
        case Tok::Plus: lhs = add({lhs, rhs}); break;
        case Tok::Minus: lhs = add({lhs, neg(rhs)}); break;
        case Tok::Star: lhs = mul({lhs, rhs}); break;
        case Tok::Slash: lhs = quot(lhs, rhs); break;
        case Tok::Caret: lhs = pow(lhs, rhs); break;
        default: break;
      }
    }
    return lhs;
  }

  Expr parse_prefix() {
    const Token& tok = advance();
    switch (tok.type) {
      case Tok::Minus: return neg(parse_expr(kUnaryPower));
      case Tok::Number: {
        Rational r;
        if (!parse_decimal(tok.text, r)) throw ParseError("malformed number", tok.offset);
        return num(r);
      }
      case Tok::Ident: {
        FunctionKind fn;
        if (function_from_name(tok.text, fn)) {
          if (peek().type != Tok::LParen)
            throw ParseError("expected '(' after function name '" + std::string(tok.text) + "'",
                             peek().offset);
          advance();
          Expr arg = parse_expr(0);
          expect_rparen();
          return apply(fn, arg);
        }
        if (peek().type == Tok::LParen)
          throw ParseError("unknown function '" + std::string(tok.text) + "'", tok.offset);
        return var(std::string(tok.text));
      }
      case Tok::LParen: {
        Expr inner = parse_expr(0);
        expect_rparen();
        return inner;
      }
      case Tok::End: throw ParseError("unexpected end of input", tok.offset);
      default: throw ParseError("unexpected token '" + std::string(tok.text) + "'", tok.offset);
    }
  }

  void expect_rparen() {
    if (peek().type != Tok::RParen) throw ParseError("expected ')'", peek().offset);
    advance();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

}  // namespace lsym
