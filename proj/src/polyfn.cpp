#include "probtest/polyfn.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace probtest {

Rational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  const auto den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false)) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  mpz_class n(std::string(num.front() == '+' ? num.substr(1) : num));
  mpz_class d{std::string(den)};
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(std::string name, unsigned exponent) {
  Monomial m;
  if (exponent > 0) m.powers_.emplace_back(std::move(name), exponent);
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& [_, e] : powers_) d += e;
  return d;
}

unsigned Monomial::exponent_of(std::string_view var) const {
  for (const auto& [v, e] : powers_) {
    if (v == var) return e;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  auto i = powers_.begin();
  auto j = other.powers_.begin();
  while (i != powers_.end() || j != other.powers_.end()) {
    if (j == other.powers_.end() || (i != powers_.end() && i->first < j->first)) {
      out.powers_.push_back(*i++);
    } else if (i == powers_.end() || j->first < i->first) {
      out.powers_.push_back(*j++);
    } else {
      out.powers_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return out;
}

bool Monomial::divides(const Monomial& other) const {
  for (const auto& [v, e] : powers_) {
    if (other.exponent_of(v) < e) return false;
  }
  return true;
}

Monomial Monomial::quotient_of(const Monomial& other) const {
  Monomial out;
  for (const auto& [v, e] : other.powers_) {
    const unsigned mine = exponent_of(v);
    if (e > mine) out.powers_.emplace_back(v, e - mine);
  }
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  for (const auto& [v, e] : a.powers_) {
    const unsigned f = std::min(e, b.exponent_of(v));
    if (f > 0) out.powers_.emplace_back(v, f);
  }
  return out;
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  auto i = powers_.begin();
  auto j = other.powers_.begin();
  while (i != powers_.end() || j != other.powers_.end()) {
    // The alphabetically smaller variable ranks higher in lex order.
    if (j == other.powers_.end() || (i != powers_.end() && i->first < j->first)) {
      return std::strong_ordering::greater;
    }
    if (i == powers_.end() || j->first < i->first) return std::strong_ordering::less;
    if (auto c = i->second <=> j->second; c != 0) return c;
    ++i;
    ++j;
  }
  return std::strong_ordering::equal;
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(const Rational& c) { return term(Monomial(), c); }

Polynomial Polynomial::variable(const std::string& name) { return term(Monomial::variable(name), 1); }

Polynomial Polynomial::term(const Monomial& m, const Rational& c) {
  Polynomial p;
  p.add_term(m, c);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& coeff) {
  if (coeff == 0) return;
  Rational c = coeff;
  c.canonicalize();
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_value() const {
  auto it = terms_.find(Monomial());
  return it == terms_.end() ? Rational(0) : it->second;
}

const Monomial& Polynomial::leading_monomial() const {
  if (terms_.empty()) throw PolyError("leading term of the zero polynomial");
  return terms_.begin()->first;
}

const Rational& Polynomial::leading_coefficient() const {
  if (terms_.empty()) throw PolyError("leading term of the zero polynomial");
  return terms_.begin()->second;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return Monomial();
  Monomial g = terms_.begin()->first;
  for (const auto& [m, _] : terms_) g = Monomial::gcd(g, m);
  return g;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : other.terms_) out.add_term(m1 * m2, c1 * c2);
  }
  return out;
}

Polynomial Polynomial::scaled(const Rational& factor) const {
  Polynomial out;
  if (factor == 0) return out;
  Rational c = factor;
  c.canonicalize();
  for (const auto& [m, k] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, k * c);
  return out;
}

Polynomial Polynomial::times(const Monomial& m) const {
  Polynomial out;
  for (const auto& [t, k] : terms_) out.terms_.emplace_hint(out.terms_.end(), t * m, k);
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial out = constant(1);
  for (unsigned i = 0; i < e; ++i) out = out * *this;
  return out;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw PolyError("division by the zero polynomial");
  if (is_zero()) return Polynomial();
  // Cheap necessary conditions: under a monomial order the leading and the
  // trailing monomial of a product are the products of those of the factors.
  const Monomial& lead = divisor.leading_monomial();
  if (!lead.divides(leading_monomial())) return std::nullopt;
  if (!divisor.terms_.rbegin()->first.divides(terms_.rbegin()->first)) return std::nullopt;
  if (terms_.size() == 1 && divisor.terms_.size() > 1) return std::nullopt;

  const Rational& lead_coeff = divisor.leading_coefficient();
  Polynomial rest = *this;
  Polynomial quotient;
  while (!rest.is_zero()) {
    const Monomial m = rest.leading_monomial();
    // With a single divisor the remainder is unique, so a leading term that
    // the divisor's leading term does not divide means a non-zero remainder.
    if (!lead.divides(m)) return std::nullopt;
    const Monomial q = lead.quotient_of(m);
    const Rational c = rest.leading_coefficient() / lead_coeff;
    quotient.add_term(q, c);
    for (const auto& [dm, dc] : divisor.terms_) rest.add_term(dm * q, -(dc * c));
  }
  return quotient;
}

Rational Polynomial::eval(const std::map<std::string, Rational>& point) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (const auto& [var, e] : m.powers()) {
      auto it = point.find(var);
      if (it == point.end()) throw PolyError("no value for variable '" + var + "'");
      Rational x = it->second;
      x.canonicalize();
      for (unsigned i = 0; i < e; ++i) v *= x;
    }
    total += v;
  }
  return total;
}

std::vector<std::string> Polynomial::variables() const {
  std::set<std::string> vars;
  for (const auto& [m, _] : terms_) {
    for (const auto& [v, e] : m.powers()) vars.insert(v);
  }
  return {vars.begin(), vars.end()};
}

bool Polynomial::operator<(const Polynomial& other) const {
  auto i = terms_.begin();
  auto j = other.terms_.begin();
  for (; i != terms_.end() && j != other.terms_.end(); ++i, ++j) {
    if (auto c = i->first <=> j->first; c != 0) return c > 0;
    if (i->second != j->second) return i->second < j->second;
  }
  return i == terms_.end() && j != other.terms_.end();
}

// -------------------------------------------------------------- RationalFn

namespace {

// Splits p = coeff * monomial content * rest, with rest monic (or 1) and the
// variables of the content returned as individual factors.
struct FactorSplit {
  Rational coeff;
  RationalFn::Factors factors;
};

FactorSplit split_factors(const Polynomial& p) {
  FactorSplit out;
  const Monomial content = p.monomial_content();
  for (const auto& [v, e] : content.powers()) out.factors[Polynomial::variable(v)] += e;
  Polynomial rest;
  if (content.is_one()) {
    rest = p;
  } else {
    for (const auto& [m, c] : p.terms()) rest += Polynomial::term(content.quotient_of(m), c);
  }
  out.coeff = rest.leading_coefficient();
  if (!rest.is_constant()) out.factors[rest.scaled(1 / out.coeff)] += 1;
  return out;
}

Polynomial expand(const RationalFn::Factors& factors) {
  Polynomial out = Polynomial::constant(1);
  for (const auto& [f, e] : factors) out = out * f.pow(e);
  return out;
}

// Numerator multiplier that lifts a fraction over `own` to the common
// denominator `common` (which contains `own`).
Polynomial lift(const RationalFn::Factors& own, const RationalFn::Factors& common) {
  Polynomial out = Polynomial::constant(1);
  for (const auto& [f, e] : common) {
    auto it = own.find(f);
    const unsigned have = it == own.end() ? 0 : it->second;
    if (e > have) out = out * f.pow(e - have);
  }
  return out;
}

RationalFn::Factors lcm(const RationalFn::Factors& a, const RationalFn::Factors& b) {
  RationalFn::Factors out = a;
  for (const auto& [f, e] : b) {
    auto& slot = out[f];
    slot = std::max(slot, e);
  }
  return out;
}

}  // namespace

RationalFn::RationalFn(Polynomial num, Factors den) : num_(std::move(num)), den_(std::move(den)) { cancel(); }

namespace {

// Exact screen for f | n: at a rational point where f vanishes, n must vanish
// too. Returns false only when divisibility is impossible.
bool may_divide(const Polynomial& n, const Polynomial& f) {
  const std::vector<std::string> vars = f.variables();
  for (const auto& v : vars) {
    Polynomial lin;
    Polynomial rest;
    bool linear = true;
    for (const auto& [m, c] : f.terms()) {
      const unsigned e = m.exponent_of(v);
      if (e > 1) linear = false;
      if (e == 1) {
        lin += Polynomial::term(Monomial::variable(v).quotient_of(m), c);
      } else {
        rest += Polynomial::term(m, c);
      }
    }
    if (!linear) continue;
    std::map<std::string, Rational> at;
    unsigned next = 2;
    for (const auto& x : n.variables()) at[x] = next++;
    for (const auto& x : vars) {
      if (!at.contains(x)) at[x] = next++;
    }
    at.erase(v);
    at[v] = 0;
    const Rational a = lin.eval(at);
    if (a == 0) continue;
    at[v] = -rest.eval(at) / a;
    return n.eval(at) == 0;
  }
  return true;
}

}  // namespace

void RationalFn::cancel() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  for (auto it = den_.begin(); it != den_.end();) {
    while (it->second > 0) {
      if (!may_divide(num_, it->first)) break;
      auto q = num_.divide_exact(it->first);
      if (!q) break;
      num_ = std::move(*q);
      --it->second;
    }
    it = it->second == 0 ? den_.erase(it) : std::next(it);
  }
}

RationalFn RationalFn::var(const std::string& action) {
  if (action.empty()) throw PolyError("empty action label");
  return RationalFn(Polynomial::variable(action), {});
}

RationalFn RationalFn::scalar(const Rational& q) {
  if (q < 0) throw PolyError("scalar must be non-negative, got " + format_rational(q));
  return RationalFn(Polynomial::constant(q), {});
}

RationalFn RationalFn::from_polynomial(Polynomial p) { return RationalFn(std::move(p), {}); }

Polynomial RationalFn::denominator() const { return expand(den_); }

bool RationalFn::operator==(const RationalFn& other) const {
  if (num_ != other.num_) return false;
  return den_ == other.den_ || denominator() == other.denominator();
}

RationalFn add(const RationalFn& f, const RationalFn& g) {
  if (f.is_zero()) return g;
  if (g.is_zero()) return f;
  if (f.den_ == g.den_) return RationalFn(f.num_ + g.num_, f.den_);
  RationalFn::Factors common = lcm(f.den_, g.den_);
  Polynomial num = f.num_ * lift(f.den_, common) + g.num_ * lift(g.den_, common);
  return RationalFn(std::move(num), std::move(common));
}

RationalFn sub(const RationalFn& f, const RationalFn& g) { return add(f, g.scaled(-1)); }

RationalFn mul(const RationalFn& f, const RationalFn& g) {
  if (f.is_zero() || g.is_zero()) return RationalFn();
  RationalFn::Factors den = f.den_;
  for (const auto& [p, e] : g.den_) den[p] += e;
  return RationalFn(f.num_ * g.num_, std::move(den));
}

RationalFn div(const RationalFn& f, const RationalFn& g) {
  if (g.is_zero()) throw PolyError("division by the zero function");
  FactorSplit split = split_factors(g.num_);
  RationalFn reciprocal(expand(g.den_).scaled(1 / split.coeff), std::move(split.factors));
  return mul(f, reciprocal);
}

RationalFn RationalFn::scaled(const Rational& c) const {
  RationalFn out = *this;
  out.num_ = num_.scaled(c);
  if (out.num_.is_zero()) out.den_.clear();
  return out;
}

Rational RationalFn::eval(const std::map<std::string, Rational>& point) const {
  for (const auto& var : variables()) {
    auto it = point.find(var);
    if (it == point.end()) throw PolyError("no value for variable '" + var + "'");
    if (it->second <= 0) throw PolyError("variable '" + var + "' must be positive");
  }
  const Rational den = denominator().eval(point);
  if (den == 0) throw PolyError("denominator vanishes at the given point");
  return num_.eval(point) / den;
}

std::vector<std::string> RationalFn::variables() const {
  std::set<std::string> vars;
  for (const auto& v : num_.variables()) vars.insert(v);
  for (const auto& [p, _] : den_) {
    for (const auto& v : p.variables()) vars.insert(v);
  }
  return {vars.begin(), vars.end()};
}

bool equals(const RationalFn& f, const RationalFn& g) {
  if (f == g) return true;
  return f.numerator() * g.denominator() == g.numerator() * f.denominator();
}

}  // namespace probtest
