#include <cctype>
#include <numeric>

#include "probtest/polyfn.hpp"

namespace probtest {

namespace {

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (const auto& [v, e] : m.powers()) {
    if (!out.empty()) out += '*';
    out += v;
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out;
}

bool is_single_factor(const Polynomial& p) {
  if (p.terms().size() != 1) return false;
  const auto& [m, c] = *p.terms().begin();
  if (m.is_one()) return c > 0 && c.get_den() == 1;
  return c == 1 && m.powers().size() == 1 && m.powers().front().second == 1;
}

}  // namespace

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (m.is_one()) {
      out += format_rational(mag);
    } else {
      if (mag != 1) out += format_rational(mag) + '*';
      out += monomial_text(m);
    }
  }
  return out;
}

std::string to_string(const RationalFn& f) {
  Polynomial num = f.numerator();
  Polynomial den = f.denominator();
  if (num.is_zero()) return "0";

  // Scale both sides to integer coefficients with no common content.
  mpz_class scale = 1;
  for (const auto* p : {&num, &den}) {
    for (const auto& [_, c] : p->terms()) scale = lcm(scale, mpz_class(c.get_den()));
  }
  mpz_class content = 0;
  for (const auto* p : {&num, &den}) {
    for (const auto& [_, c] : p->terms()) content = gcd(content, mpz_class(c.get_num() * (scale / c.get_den())));
  }
  const Rational factor(scale, content);
  num = num.scaled(factor);
  den = den.scaled(factor);

  if (num.is_constant() && den.is_constant()) return format_rational(num.constant_value() / den.constant_value());
  const std::string num_text = num.terms().size() > 1 ? "(" + to_string(num) + ")" : to_string(num);
  if (den == Polynomial::constant(1)) return to_string(num);
  const std::string den_text = is_single_factor(den) ? to_string(den) : "(" + to_string(den) + ")";
  return num_text + " / " + den_text;
}

namespace {

class FnParser {
 public:
  explicit FnParser(std::string_view text) : text_(text) {}

  RationalFn parse() {
    RationalFn f = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw PolyError("column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalFn expr() {
    RationalFn acc = term();
    for (;;) {
      if (accept('+')) {
        acc = add(acc, term());
      } else if (accept('-')) {
        acc = sub(acc, term());
      } else {
        return acc;
      }
    }
  }

  RationalFn term() {
    RationalFn acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = mul(acc, unary());
      } else if (accept('/')) {
        acc = div(acc, unary());
      } else {
        return acc;
      }
    }
  }

  RationalFn unary() {
    if (accept('-')) return sub(RationalFn::zero(), unary());
    RationalFn base = primary();
    if (accept('^')) {
      const std::string digits = integer();
      const unsigned long e = std::stoul(digits);
      RationalFn out = RationalFn::one();
      for (unsigned long i = 0; i < e; ++i) out = mul(out, base);
      return out;
    }
    return base;
  }

  std::string integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::string(text_.substr(start, pos_ - start));
  }

  RationalFn primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RationalFn inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return RationalFn::scalar(Rational(mpz_class(integer())));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return RationalFn::var(std::string(text_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RationalFn parse_rational_fn(std::string_view text) { return FnParser(text).parse(); }

}  // namespace probtest
