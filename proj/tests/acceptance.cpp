// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "probtest/cspp.hpp"
#include "probtest/harness.hpp"
#include "probtest/readytrace.hpp"
#include "probtest/testing.hpp"

using namespace probtest;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Pts C(const char* text) { return compile(parse_process(text)); }
Pts CT(const char* text) { return compile(parse_test(text)); }
RationalFn v(const char* name) { return RationalFn::var(name); }

constexpr std::size_t kSamples = 200;
constexpr std::size_t kFunctionPairs = 1000;

GenConfig suite_config() {
  GenConfig cfg;
  cfg.alphabet_size = 3;
  cfg.max_depth = 3;
  cfg.max_branching = 2;
  cfg.max_denominator = 4;
  cfg.seed = 20240917;
  return cfg;
}

std::string summary(const PropertyReport& r) {
  std::ostringstream out;
  out << r.name << " " << r.passed << "/" << r.samples;
  for (const auto& [name, value] : r.counters) out << " " << name << "=" << value;
  if (!r.failures.empty()) out << "; first failure (seed " << r.failures.front().seed << "): " << r.failures.front().detail;
  return out.str();
}

Outcome suite(const PropertyReport& r, std::size_t min_samples) {
  return {r.ok() && r.samples >= min_samples, summary(r)};
}

Outcome coin_machine_flagship() {
  const RationalFn r = res(C(fixtures::kCoinEarly), CT(fixtures::kCoinTest));
  return {r == RationalFn::scalar(Rational(1, 2)), "res = " + to_string(r)};
}

Outcome guesser_symbolic() {
  const RationalFn expected = (v("h") + v("t").scaled(2)) / (v("h") + v("t")).scaled(2);
  const RationalFn s = res(C(fixtures::kCoinEarly), CT(fixtures::kGuessTest));
  const RationalFn sbar = res(C(fixtures::kCoinLate), CT(fixtures::kGuessTest));
  return {equals(s, expected) && equals(sbar, expected), "s: " + to_string(s) + ", s-bar: " + to_string(sbar)};
}

Outcome coin_machine_equivalence() {
  const Pts s = C(fixtures::kCoinEarly);
  const Pts sbar = C(fixtures::kCoinLate);
  const TraceVerdict rt = ready_trace_equiv(s, sbar);
  const TestVerdict tv = testing_equiv_bounded(s, sbar, 3);
  return {rt.equivalent && tv.equivalent, to_string(rt) + "; " + to_string(tv)};
}

Outcome menu_sensitive_pair() {
  const Pts left = C(fixtures::kMenuLeft);
  const Pts right = C(fixtures::kMenuRight);
  const ReadyTrace trace = parse_trace("{a,b} -b-> {c}");
  const auto pl = pn(left, trace);
  const auto pr = pn(right, trace);
  const bool traces_ok = pl == Rational(1, 2) && pr == Rational(0);

  // Hand evaluation of the result function on both sides.
  const RationalFn ab = v("a") + v("b");
  const RationalFn half = RationalFn::scalar(Rational(1, 2));
  const RationalFn want_left = half * (v("a") / ab + v("b") / ab);
  const RationalFn want_right = half * (v("a") / ab) + half;
  const Pts test = CT(fixtures::kMenuTest);
  const RationalFn rl = res(left, test);
  const RationalFn rr = res(right, test);
  const bool res_ok = equals(rl, want_left) && equals(rr, want_right) && !equals(rl, rr);

  auto text = [](const std::optional<Rational>& x) { return x ? format_rational(*x) : std::string("undefined"); };
  return {traces_ok && res_ok, "pn " + text(pl) + " vs " + text(pr) + " (expected 1/2 vs 0" +
                                   (traces_ok ? "" : ", MISMATCH") + "); res " + to_string(rl) + " vs " +
                                   to_string(rr) + (res_ok ? "" : " (MISMATCH)")};
}

Outcome derived_weights() {
  const Pts s = C(fixtures::kFourWay);
  const Pts d = derived(s, s.root(), {"a", "b"}, "a");
  std::map<Menu, Rational> weights;
  if (d.is_probabilistic(d.root())) {
    for (const auto& [t, w] : d.state(d.root()).branches) weights[menu(d, t)] += w;
  }
  const bool ok = weights == std::map<Menu, Rational>{{{"c"}, Rational(1, 4)}, {{"d"}, Rational(3, 4)}};
  std::string detail;
  for (const auto& [m, w] : weights) detail += to_string(m) + ": " + format_rational(w) + " ";
  return {ok, detail};
}

Outcome lossy_channel() {
  const Pts composed = compile(Term::shared(parse_process(fixtures::kChannelWriter), parse_process(fixtures::kChannelReader)));
  PtsBuilder b;
  const StateId root = b.add_state(StateKind::Probabilistic);
  for (const char* coin : {"head", "tail"}) {
    const StateId start = b.add_state();
    const StateId mid = b.add_state(StateKind::Probabilistic);
    b.add_branch(root, Rational(1, 2), start);
    b.add_action(start, "wrt", mid);
    for (const char* guess : {"head", "tail"}) {
      const StateId read = b.add_state();
      const StateId after = b.add_state();
      b.add_branch(mid, Rational(1, 2), read);
      b.add_action(read, "rev", after);
      if (std::string(coin) == guess) {
        const StateId done = b.add_state();
        b.add_action(after, coin, done);
        b.add_action(done, "smile", b.add_state());
      }
    }
  }
  const bool ok = validate(composed).ok() && isomorphic(composed, b.build(root));
  return {ok, std::to_string(composed.size()) + " states"};
}

struct Gate {
  int failures = 0;

  void run(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > limit_seconds) {
      out.pass = false;
      out.detail += "; over time budget";
    }
    if (!out.pass) ++failures;
    std::printf("%s  %2d  %-34s %8.2fs  %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
  }
};

}  // namespace

int main() {
  const GenConfig cfg = suite_config();
  Gate gate;
  gate.run(1, "coin machine result is 1/2", 1, coin_machine_flagship);
  gate.run(2, "guesser symbolic result", 1, guesser_symbolic);
  gate.run(3, "coin machines equivalent", 5, coin_machine_equivalence);
  gate.run(4, "menu-sensitive pair distinguished", 1, menu_sensitive_pair);
  gate.run(5, "derived process weights", 1, derived_weights);
  gate.run(6, "lossy channel composition", 1, lossy_channel);

  std::optional<CoincidenceReport> coincidence;
  gate.run(7, "coincidence suite", 300, [&] {
    coincidence = check_coincidence(cfg, kSamples);
    return suite(coincidence->coincidence, kSamples);
  });
  gate.run(8, "congruence suite", 300, [&] { return suite(check_congruence(cfg, kSamples), kSamples); });
  gate.run(9, "distributivity suites", 300, [&] {
    const Outcome ext = suite(check_external_distributivity(cfg, kSamples), kSamples);
    const Outcome ctx = suite(check_context_distributivity(cfg, kSamples), kSamples);
    return Outcome{ext.pass && ctx.pass, ext.detail + "; " + ctx.detail};
  });
  gate.run(10, "witness synthesis", 300, [&] {
    if (!coincidence) return Outcome{false, "coincidence suite did not run"};
    std::size_t distinguished = 0;
    for (const auto& [name, value] : coincidence->coincidence.counters) {
      if (name == "distinguished") distinguished = value;
    }
    const PropertyReport& r = coincidence->synthesis;
    return Outcome{r.ok() && r.samples == distinguished && distinguished > 0, summary(r)};
  });
  gate.run(11, "probability axioms", 300, [&] { return suite(check_probability_axioms(cfg, kSamples), kSamples); });
  gate.run(12, "rational function soundness", 300,
           [&] { return suite(check_polyfn_soundness(cfg, kFunctionPairs, 100), kFunctionPairs); });

  std::cout << (gate.failures == 0 ? "all criteria passed" : std::to_string(gate.failures) + " criteria failed")
            << '\n';
  return gate.failures == 0 ? 0 : 1;
}
