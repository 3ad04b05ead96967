#include <doctest.h>

#include <algorithm>

#include "probtest/cspp.hpp"
#include "probtest/harness.hpp"
#include "probtest/pts.hpp"
#include "probtest/readytrace.hpp"

using namespace probtest;

namespace {

bool mentions(const Validation& v, const std::string& needle) {
  return std::any_of(v.diagnostics.begin(), v.diagnostics.end(),
                     [&](const std::string& d) { return d.find(needle) != std::string::npos; });
}

// The coin machine with its probabilistic choice first, built edge by edge.
Pts coin_machine() {
  PtsBuilder b;
  const StateId root = b.add_state(StateKind::Probabilistic);
  const StateId left = b.add_state();
  const StateId right = b.add_state();
  const StateId l_h = b.add_state();
  const StateId l_t = b.add_state();
  const StateId r_h = b.add_state();
  const StateId r_t = b.add_state();
  const StateId l_done = b.add_state();
  const StateId r_done = b.add_state();
  b.add_branch(root, Rational(1, 2), left);
  b.add_branch(root, Rational(1, 2), right);
  b.add_action(left, "h", l_h);
  b.add_action(left, "t", l_t);
  b.add_action(l_h, "p", l_done);
  b.add_action(right, "h", r_h);
  b.add_action(right, "t", r_t);
  b.add_action(r_t, "p", r_done);
  return b.build(root);
}

}  // namespace

TEST_SUITE("pts") {
  TEST_CASE("the coin machine is a valid system") {
    const Pts s = coin_machine();
    const Validation v = validate(s);
    CHECK(v.ok());
    CHECK(v.acyclic);
    CHECK(isomorphic(s, compile(parse_process(fixtures::kCoinEarly))));
    CHECK(s.alphabet() == Menu{"h", "p", "t"});
  }

  TEST_CASE("invalid weights are reported") {
    PtsBuilder b;
    const StateId root = b.add_state(StateKind::Probabilistic);
    b.add_branch(root, Rational(1, 2), b.add_state());
    b.add_branch(root, Rational(1, 3), b.add_state());
    CHECK(mentions(validate(b.build(root)), "weights sum"));
  }

  TEST_CASE("reactive determinism is checked") {
    PtsBuilder b;
    const StateId root = b.add_state();
    b.add_action(root, "a", b.add_state());
    b.add_action(root, "a", b.add_state());
    CHECK(mentions(validate(b.build(root)), "reactive determinism violated"));
  }

  TEST_CASE("other structural violations") {
    PtsBuilder b;
    const StateId root = b.add_state(StateKind::Probabilistic);
    const StateId inner = b.add_state(StateKind::Probabilistic);
    b.add_branch(root, Rational(1), inner);
    CHECK(mentions(validate(b.build(root)), "probabilistic transition to probabilistic state"));
    CHECK(mentions(validate(b.build(root)), "without transitions"));
  }

  TEST_CASE("cycles are flagged and rejected downstream") {
    PtsBuilder b;
    const StateId root = b.add_state();
    b.add_action(root, "a", root);
    const Pts p = b.build(root);
    CHECK_FALSE(validate(p).acyclic);
    CHECK_THROWS_AS(p1(p), CyclicInputError);
    CHECK_THROWS_AS(ready_trace_equiv(p, p), CyclicInputError);
  }

  TEST_CASE("menus") {
    const Pts u = compile(parse_test(fixtures::kCoinTest));
    CHECK(menu(u, u.root()) == Menu{"h", "t"});
    const Pts s = coin_machine();
    CHECK(menu(s, 1) == Menu{"h", "t"});
    CHECK(menu(s, 7).empty());
    CHECK_THROWS_AS(menu(s, s.root()), PtsError);
  }

  TEST_CASE("derived process conditions on the observed menu") {
    const Pts s = compile(parse_process(fixtures::kFourWay));
    const Pts d = derived(s, s.root(), {"a", "b"}, "a");
    CHECK(validate(d).ok());
    REQUIRE(d.is_probabilistic(d.root()));
    std::map<Menu, Rational> weights;
    for (const auto& [t, w] : d.state(d.root()).branches) weights[menu(d, t)] += w;
    CHECK(weights == std::map<Menu, Rational>{{{"c"}, Rational(1, 4)}, {{"d"}, Rational(3, 4)}});
  }

  TEST_CASE("derived of a nondeterministic state follows the action") {
    const Pts s = compile(parse_process("a->(b [] c)"));
    const Pts d = derived(s, s.root(), {"a"}, "a");
    CHECK(menu(d, d.root()) == Menu{"b", "c"});
    CHECK_THROWS_WITH_AS(derived(s, s.root(), {"a", "b"}, "a"), doctest::Contains("menu not offered"), PtsError);
    CHECK_THROWS_AS(derived(s, s.root(), {"a"}, "b"), PtsError);
  }

  TEST_CASE("derived merges coincident targets") {
    // Two branches with menu {a} whose a-successors share one state.
    PtsBuilder b;
    const StateId root = b.add_state(StateKind::Probabilistic);
    const StateId x = b.add_state();
    const StateId y = b.add_state();
    const StateId z = b.add_state();
    const StateId shared = b.add_state();
    const StateId other = b.add_state();
    b.add_branch(root, Rational(1, 3), x);
    b.add_branch(root, Rational(1, 3), y);
    b.add_branch(root, Rational(1, 3), z);
    b.add_action(x, "a", shared);
    b.add_action(y, "a", shared);
    b.add_action(z, "b", other);
    const Pts p = b.build(root);

    // Unmerged edge list per the definition, then summed per target.
    std::vector<std::pair<StateId, Rational>> edges;
    Rational mass = 0;
    for (const auto& [t, w] : p.state(root).branches) {
      if (menu(p, t) == Menu{"a"}) mass += w;
    }
    for (const auto& [t, w] : p.state(root).branches) {
      if (menu(p, t) == Menu{"a"}) edges.emplace_back(*p.successor(t, "a"), w / mass);
    }
    std::map<StateId, Rational> summed;
    for (const auto& [t, w] : edges) summed[t] += w;
    REQUIRE(summed.size() == 1);

    const Pts d = derived(p, root, {"a"}, "a");
    CHECK(validate(d).ok());
    REQUIRE(d.state(d.root()).branches.size() == 1);
    CHECK(d.state(d.root()).branches.begin()->second == summed.begin()->second);
  }

  TEST_CASE("derived preserves the invariants on generated processes") {
    GenConfig cfg;
    cfg.max_depth = 3;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      Rng rng(seed);
      const Pts p = compile(fill(random_context(cfg, rng), random_term(cfg, rng)));
      for (const auto& [m, w] : p1(p)) {
        for (const auto& a : m) {
          const Pts d = derived(p, p.root(), m, a);
          CHECK(validate(d).ok());
          if (d.is_probabilistic(d.root())) {
            Rational total = 0;
            for (const auto& [t, pi] : d.state(d.root()).branches) total += pi;
            CHECK(total == 1);
          }
        }
      }
    }
  }

  TEST_CASE("json round trip") {
    const Pts s = compile(parse_process(fixtures::kFourWay));
    const Pts back = pts_from_json(to_json(s));
    CHECK(isomorphic(s, back));
    CHECK(to_json(back) == to_json(s));
    CHECK_THROWS_AS(pts_from_json("{\"states\": 3}"), PtsError);
    CHECK_THROWS_AS(pts_from_json("not json"), PtsError);
    CHECK_THROWS_AS(pts_from_json(R"({"root":0,"states":[{"id":0,"kind":"nondet"}],"actions":[{"from":0,"label":"a","to":4}]})"),
                    PtsError);
  }

  TEST_CASE("dot export draws probabilistic edges dashed") {
    const std::string dot = to_dot(coin_machine(), "s");
    CHECK(dot.find("style=dashed, label=\"1/2\"") != std::string::npos);
    CHECK(dot.find("label=\"h\"") != std::string::npos);
  }
}
