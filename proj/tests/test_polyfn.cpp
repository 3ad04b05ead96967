#include <doctest.h>

#include <map>
#include <random>

#include "probtest/polyfn.hpp"

using namespace probtest;

namespace {

RationalFn v(const char* name) { return RationalFn::var(name); }
RationalFn q(long n, long d) { return RationalFn::scalar(Rational(n, d)); }

// Random functions whose denominators are products of sums of distinct
// variables, the only shape Res ever produces.
struct FnGen {
  std::mt19937_64 rng;
  std::vector<std::string> vars{"a", "b", "c"};

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  RationalFn sum_of_vars() {
    RationalFn s = RationalFn::zero();
    bool any = false;
    for (const auto& x : vars) {
      if (pick(2) == 0) {
        s += RationalFn::var(x);
        any = true;
      }
    }
    return any ? s : RationalFn::var(vars[pick(vars.size())]);
  }

  RationalFn operator()(int depth) {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(3)) {
        case 0:
          return RationalFn::scalar(Rational(static_cast<long>(pick(4)), static_cast<long>(1 + pick(3))));
        case 1:
          return RationalFn::var(vars[pick(vars.size())]);
        default:
          return RationalFn::var(vars[pick(vars.size())]) / sum_of_vars();
      }
    }
    switch (pick(3)) {
      case 0:
        return (*this)(depth - 1) + (*this)(depth - 1);
      case 1:
        return (*this)(depth - 1) * (*this)(depth - 1);
      default:
        return (*this)(depth - 1) / sum_of_vars();
    }
  }

  std::map<std::string, Rational> point() {
    std::map<std::string, Rational> at;
    for (const auto& x : vars) {
      at[x] = Rational(static_cast<long>(1 + pick(12)), static_cast<long>(1 + pick(4)));
      at[x].canonicalize();
    }
    return at;
  }
};

}  // namespace

TEST_SUITE("polyfn") {
  TEST_CASE("constructors") {
    CHECK(to_string(v("h")) == "h");
    CHECK(v("a").eval({{"a", Rational(3)}}) == 3);
    CHECK(equals(v("a") / v("a"), RationalFn::one()));
    CHECK(to_string(q(1, 2)) == "1/2");
    CHECK_THROWS_AS(RationalFn::scalar(Rational(-1, 2)), PolyError);
  }

  TEST_CASE("unreduced rational inputs are normalised") {
    CHECK(RationalFn::scalar(Rational(2, 4)) == q(1, 2));
    CHECK(to_string(v("a").scaled(Rational(3, 3))) == "a");
    CHECK(v("a").eval({{"a", Rational(4, 2)}}) == 2);
  }

  TEST_CASE("identities") {
    const RationalFn f = v("a") / (v("a") + v("b"));
    CHECK(RationalFn::zero() + f == f);
    CHECK(f + RationalFn::zero() == f);
    CHECK(RationalFn::one() * f == f);
    CHECK(equals(f * ((v("a") + v("b")) / v("a")), RationalFn::one()));
  }

  TEST_CASE("weighted symbolic probabilities sum to a constant") {
    const RationalFn ab = v("a") + v("b");
    const RationalFn sum = q(1, 2) * (v("a") / ab) + q(1, 2) * (v("b") / ab);
    CHECK(sum == q(1, 2));
    CHECK(to_string(sum) == "1/2");
  }

  TEST_CASE("equality by cross-multiplication") {
    const RationalFn h = v("h");
    const RationalFn t = v("t");
    const RationalFn factored = (h + q(2, 1) * t) / (q(2, 1) * (h + t));
    const RationalFn expanded = (h + q(2, 1) * t) / (q(2, 1) * h + q(2, 1) * t);
    CHECK(equals(factored, expanded));
    CHECK(to_string(factored) == "(h + 2*t) / (2*h + 2*t)");
    CHECK_FALSE(equals(v("a") / (v("a") + v("b")), v("b") / (v("a") + v("b"))));
  }

  TEST_CASE("evaluation") {
    CHECK((v("a") / (v("a") + v("b"))).eval({{"a", Rational(1)}, {"b", Rational(1)}}) == Rational(1, 2));
    CHECK(q(3, 4).eval({}) == Rational(3, 4));
    const RationalFn f = (v("h") + q(2, 1) * v("t")) / (q(2, 1) * (v("h") + v("t")));
    CHECK(f.eval({{"h", Rational(1)}, {"t", Rational(1)}}) == Rational(3, 4));
    CHECK_THROWS_AS(f.eval({{"h", Rational(1)}}), PolyError);
    CHECK_THROWS_AS(f.eval({{"h", Rational(0)}, {"t", Rational(1)}}), PolyError);
  }

  TEST_CASE("division by zero is rejected") { CHECK_THROWS_AS(v("a") / RationalFn::zero(), PolyError); }

  TEST_CASE("parse") {
    CHECK(parse_rational_fn("(h + 2*t) / (2*h + 2*t)") == (v("h") + q(2, 1) * v("t")) / (q(2, 1) * (v("h") + v("t"))));
    CHECK(parse_rational_fn("1/2") == q(1, 2));
    CHECK(parse_rational_fn("a^2 - a*a") == RationalFn::zero());
    CHECK_THROWS_AS(parse_rational_fn("(a + "), PolyError);
    CHECK_THROWS_AS(parse_rational_fn("a $ b"), PolyError);
  }

  TEST_CASE("text round trip is exact") {
    FnGen gen{std::mt19937_64(5)};
    for (int i = 0; i < 300; ++i) {
      const RationalFn f = gen(3);
      const RationalFn back = parse_rational_fn(to_string(f));
      CHECK(back == f);
      CHECK(to_string(back) == to_string(f));
    }
  }

  TEST_CASE("ring laws hold structurally") {
    FnGen gen{std::mt19937_64(17)};
    for (int i = 0; i < 200; ++i) {
      const RationalFn f = gen(2);
      const RationalFn g = gen(2);
      const RationalFn h = gen(2);
      CHECK(f + g == g + f);
      CHECK(f * g == g * f);
      CHECK((f + g) + h == f + (g + h));
      CHECK((f * g) * h == f * (g * h));
      CHECK(f * (g + h) == f * g + f * h);
    }
  }

  TEST_CASE("canonical form is idempotent") {
    FnGen gen{std::mt19937_64(23)};
    for (int i = 0; i < 200; ++i) {
      const RationalFn f = gen(3);
      CHECK(f * RationalFn::one() == f);
      CHECK(f + RationalFn::zero() == f);
    }
  }

  TEST_CASE("equals is an equivalence relation and agrees with evaluation") {
    FnGen gen{std::mt19937_64(29)};
    for (int i = 0; i < 150; ++i) {
      const RationalFn f = gen(3);
      const RationalFn s = gen.sum_of_vars();
      const RationalFn g = (f * s) / s;
      const RationalFn h = f.scaled(Rational(1, 3)) + f.scaled(Rational(2, 3));
      const RationalFn other = gen(3);
      CHECK(equals(f, f));
      CHECK(equals(f, g) == equals(g, f));
      CHECK(equals(f, g));
      CHECK(equals(g, h));
      CHECK(equals(f, h));
      const bool same = equals(f, other);
      bool separated = false;
      for (int k = 0; k < 100; ++k) {
        const auto at = gen.point();
        const bool agree = f.eval(at) == other.eval(at);
        if (same) CHECK(agree);
        separated = separated || !agree;
      }
      CHECK(same != separated);
    }
  }
}
