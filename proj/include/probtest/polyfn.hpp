#pragma once

// Exact rational functions over action-name variables.
//
// A RationalFn is numerator / denominator where both are multivariate
// polynomials with arbitrary-precision rational coefficients. Variables are
// action labels and range over (0, inf), so every denominator built from
// sums of action variables is strictly positive and equality can be decided
// by cross-multiplication.

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace probtest {

using Rational = mpq_class;

/// Parses "p/q" or "p" into a canonical rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
/// "p/q", or "p" when the denominator is one.
std::string format_rational(const Rational& q);

class PolyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Product of variables with positive exponents, sorted by variable name.
class Monomial {
 public:
  using Power = std::pair<std::string, unsigned>;

  Monomial() = default;
  static Monomial variable(std::string name, unsigned exponent = 1);

  const std::vector<Power>& powers() const { return powers_; }
  unsigned degree() const;
  bool is_one() const { return powers_.empty(); }
  unsigned exponent_of(std::string_view var) const;

  Monomial operator*(const Monomial& other) const;
  bool divides(const Monomial& other) const;
  /// other / *this; requires divides(other).
  Monomial quotient_of(const Monomial& other) const;
  /// Greatest common divisor (componentwise minimum of exponents).
  static Monomial gcd(const Monomial& a, const Monomial& b);

  /// Graded lexicographic order: higher total degree is greater, ties broken
  /// lexicographically with variables ordered by name (a > b > ...).
  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<Power> powers_;
};

/// Sparse polynomial in canonical form: no zero coefficients, terms kept in
/// descending graded-lex order (leading term first).
class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, std::greater<>>;

  Polynomial() = default;
  static Polynomial constant(const Rational& c);
  static Polynomial variable(const std::string& name);
  static Polynomial term(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term value; zero for the zero polynomial.
  Rational constant_value() const;
  const Monomial& leading_monomial() const;
  const Rational& leading_coefficient() const;
  /// GCD of all monomials (the largest monomial dividing every term).
  Monomial monomial_content() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial times(const Monomial& m) const;
  Polynomial pow(unsigned e) const;
  Polynomial& operator+=(const Polynomial& other);

  /// *this / divisor when the division is exact, nullopt otherwise.
  std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

  Rational eval(const std::map<std::string, Rational>& point) const;
  std::vector<std::string> variables() const;

  bool operator==(const Polynomial& other) const = default;
  /// Arbitrary but total order, used as a map key for denominator factors.
  bool operator<(const Polynomial& other) const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

std::string to_string(const Polynomial& p);

/// An element of the rational-function set R over action variables.
///
/// The denominator is held as a multiset of monic, non-constant polynomial
/// factors. Factors that exactly divide the numerator are cancelled, so when
/// every factor is irreducible (sums of distinct variables are) the stored
/// form is unique and structural equality coincides with functional
/// equality. equals() never relies on that and cross-multiplies instead.
class RationalFn {
 public:
  using Factors = std::map<Polynomial, unsigned>;

  /// The zero function.
  RationalFn() = default;

  static RationalFn var(const std::string& action);
  /// Non-negative constant. Throws PolyError for q < 0.
  static RationalFn scalar(const Rational& q);
  static RationalFn zero() { return RationalFn(); }
  static RationalFn one() { return scalar(1); }
  /// Polynomial embedded as p / 1; coefficients may be negative.
  static RationalFn from_polynomial(Polynomial p);

  const Polynomial& numerator() const { return num_; }
  const Factors& denominator_factors() const { return den_; }
  Polynomial denominator() const;

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return den_.empty() && num_.is_constant(); }

  friend RationalFn add(const RationalFn& f, const RationalFn& g);
  friend RationalFn sub(const RationalFn& f, const RationalFn& g);
  friend RationalFn mul(const RationalFn& f, const RationalFn& g);
  /// Throws PolyError when g is the zero function.
  friend RationalFn div(const RationalFn& f, const RationalFn& g);

  RationalFn operator+(const RationalFn& g) const { return add(*this, g); }
  RationalFn operator*(const RationalFn& g) const { return mul(*this, g); }
  RationalFn operator/(const RationalFn& g) const { return div(*this, g); }
  RationalFn& operator+=(const RationalFn& g) { return *this = add(*this, g); }
  RationalFn scaled(const Rational& c) const;

  /// Exact value at a point with strictly positive coordinates. Throws
  /// PolyError on a missing variable or a non-positive value.
  Rational eval(const std::map<std::string, Rational>& point) const;

  std::vector<std::string> variables() const;

  /// Stored-form equality. Implies functional equality.
  /// Structural equality of the canonical expanded numerator and monic
  /// denominator; independent of how the denominator happens to be factored.
  bool operator==(const RationalFn& other) const;

 private:
  RationalFn(Polynomial num, Factors den);
  void cancel();

  Polynomial num_;
  Factors den_;
};

/// Functional equality on (0, inf)^n: f.num * g.den == g.num * f.den.
bool equals(const RationalFn& f, const RationalFn& g);

/// Renders as "num / den" with both sides scaled to coprime integer
/// coefficients, e.g. "(h + 2*t) / (2*h + 2*t)"; constants render as "p/q".
std::string to_string(const RationalFn& f);

/// Parses the rendering above (and general +, -, *, /, ^ expressions).
/// Throws PolyError with a column on malformed input.
RationalFn parse_rational_fn(std::string_view text);

}  // namespace probtest
