#include <doctest.h>

#include "probtest/cspp.hpp"
#include "probtest/harness.hpp"
#include "probtest/readytrace.hpp"

using namespace probtest;

namespace {

Pts C(const char* text) { return compile(parse_process(text)); }

ReadyTrace T(const char* text) { return parse_trace(text); }

}  // namespace

TEST_SUITE("readytrace") {
  TEST_CASE("first-level menu distribution") {
    CHECK(p1(C(fixtures::kFourWay)) == MenuDistribution{{{"a", "b"}, Rational(1, 2)},
                                                     {{"a", "c"}, Rational(1, 4)},
                                                     {{"a", "e"}, Rational(1, 4)}});
    CHECK(p1(C("0")) == MenuDistribution{{Menu{}, Rational(1)}});
    CHECK(p1(C("h [] t")) == MenuDistribution{{{"h", "t"}, Rational(1)}});
    const Pts s = C(fixtures::kCoinEarly);
    CHECK(p1(s, s.root()) == MenuDistribution{{{"h", "t"}, Rational(1)}});
  }

  TEST_CASE("conditional trace probabilities") {
    const Pts s = C(fixtures::kCoinEarly);
    CHECK(pn(s, T("{h,t} -h-> {p}")) == Rational(1, 2));
    CHECK(pn(s, T("{h,t} -h-> {}")) == Rational(1, 2));
    CHECK(pn(s, T("{h,t}")) == Rational(1));
    CHECK(pn(C(fixtures::kCoinLate), T("{h,t} -t-> {p}")) == Rational(1, 2));

    // Conditioning on the menu {a,b} isolates the first branch, so the
    // c-continuation is certain on the left and impossible on the right.
    CHECK(pn(C(fixtures::kMenuLeft), T("{a,b} -b-> {c}")) == Rational(1));
    CHECK(pn(C(fixtures::kMenuRight), T("{a,b} -b-> {c}")) == Rational(0));

    CHECK(pn(C(fixtures::kFourWay), T("{a,b} -a-> {d}")) == Rational(3, 4));
    CHECK_FALSE(pn(C(fixtures::kMenuLeft), T("{c} -c-> {}")).has_value());
    CHECK_FALSE(pn(C("a->b"), T("{a} -a-> {c} -c-> {}")).has_value());
  }

  TEST_CASE("trace text") {
    const ReadyTrace t = T("{h,t} -h-> {p} -p-> {}");
    CHECK(t.length() == 3);
    CHECK(t.actions == std::vector<Action>{"h", "p"});
    CHECK(to_string(t) == "{h,t} -h-> {p} -p-> {}");
    CHECK(T(to_string(t).c_str()) == t);
    CHECK_THROWS_AS(T("{h} -t-> {}"), TraceError);
    CHECK_THROWS_AS(T("{h} -h->"), TraceError);
    CHECK_THROWS_AS(T(""), TraceError);
  }

  TEST_CASE("enumeration") {
    const auto dead = enumerate_ready_traces(C("0"), 0);
    REQUIRE(dead.size() == 1);
    CHECK(dead[0].trace == T("{}"));
    CHECK(dead[0].probability == 1);

    const Pts a = C("a");
    const auto traces = enumerate_ready_traces(a, a.root());
    REQUIRE(traces.size() == 2);
    CHECK(traces[0].trace == T("{a}"));
    CHECK(traces[1].trace == T("{a} -a-> {}"));
    CHECK(enumerate_ready_traces(a, a.root(), 1).size() == 1);

    const Pts s = C(fixtures::kCoinEarly);
    bool found = false;
    for (const auto& w : enumerate_ready_traces(s, s.root(), 2)) {
      if (w.trace == T("{h,t} -h-> {p}")) {
        CHECK(w.probability == Rational(1, 2));
        found = true;
      }
    }
    CHECK(found);
  }

  TEST_CASE("equivalence verdicts") {
    const TraceVerdict coin = ready_trace_equiv(C(fixtures::kCoinEarly), C(fixtures::kCoinLate));
    CHECK(coin.equivalent);
    CHECK(to_string(coin) == "equivalent (ready traces)");

    const TraceVerdict guess = ready_trace_equiv(C(fixtures::kMenuLeft), C(fixtures::kMenuRight));
    REQUIRE_FALSE(guess.equivalent);
    CHECK(*guess.trace == T("{a,b} -b-> {c}"));
    CHECK(guess.left == Rational(1));
    CHECK(guess.right == Rational(0));
    CHECK(to_string(guess) == "distinguished by ready trace {a,b} -b-> {c}: 1 vs 0");
    CHECK(to_json(guess).find("\"equivalent\": false") != std::string::npos);

    CHECK_FALSE(ready_trace_equiv(C("a"), C("a [] b")).equivalent);
    CHECK(ready_trace_equiv(C("p{1/2: a->b, 1/2: a->c}"), C("a->p{1/2: b, 1/2: c}")).equivalent);
  }

  TEST_CASE("enumerated values agree with the literal definition") {
    GenConfig cfg;
    cfg.max_depth = 3;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
      Rng rng(seed);
      const Pts p = compile(fill(random_context(cfg, rng), random_term(cfg, rng)));
      for (const auto& w : enumerate_ready_traces(p, p.root())) {
        CHECK(pn(p, w.trace) == w.probability);
      }
    }
  }

  TEST_CASE("the verdict is an equivalence relation") {
    GenConfig cfg;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      Rng rng(seed);
      const TermPtr x = random_term(cfg, rng);
      const TermPtr y = lift_random(x, rng).value_or(x);
      const TermPtr z = rng.chance(1, 2) ? lift_random(y, rng).value_or(y) : mutate(y, cfg, rng);
      const Pts px = compile(x);
      const Pts py = compile(y);
      const Pts pz = compile(z);
      CAPTURE(to_string(x));
      CAPTURE(to_string(z));
      CHECK(ready_trace_equiv(px, px).equivalent);
      CHECK(ready_trace_equiv(px, py).equivalent);
      const bool xz = ready_trace_equiv(px, pz).equivalent;
      CHECK(xz == ready_trace_equiv(pz, px).equivalent);
      CHECK(xz == ready_trace_equiv(py, pz).equivalent);
    }
  }
}
