#include <chrono>
#include <functional>
#include <map>

#include <json.hpp>

#include "probtest/harness.hpp"
#include "probtest/readytrace.hpp"
#include "probtest/testing.hpp"

namespace probtest {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint64_t sample_seed(const GenConfig& cfg, std::size_t i) { return splitmix64(cfg.seed + i); }

// Runs `body` once per sample, turning exceptions into counterexamples.
// `body` returns an empty string on success, otherwise a description.
void run_samples(PropertyReport& report, const GenConfig& cfg, std::size_t n,
                 const std::function<std::string(std::uint64_t, Rng&)>& body) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seed = sample_seed(cfg, i);
    Rng rng(seed);
    ++report.samples;
    std::string failure;
    try {
      failure = body(seed, rng);
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure.empty()) {
      ++report.passed;
    } else {
      report.failures.push_back({seed, failure});
    }
  }
}

void pinned(PropertyReport& report, const std::string& what, const std::function<bool()>& check) {
  ++report.samples;
  try {
    if (check()) {
      ++report.passed;
      return;
    }
    report.failures.push_back({0, "pinned case failed: " + what});
  } catch (const std::exception& e) {
    report.failures.push_back({0, "pinned case " + what + ": " + e.what()});
  }
}

void bump(PropertyReport& report, const std::string& counter) {
  for (auto& [name, value] : report.counters) {
    if (name == counter) {
      ++value;
      return;
    }
  }
  report.counters.emplace_back(counter, 1);
}

TermPtr random_choice(const GenConfig& cfg, Rng& rng) {
  const std::size_t k = rng.between(2, std::max<std::size_t>(2, std::min(cfg.max_branching, cfg.max_denominator)));
  std::vector<WeightedTerm> parts;
  for (const auto& w : random_weights(k, std::max<std::size_t>(cfg.max_denominator, k), rng)) {
    parts.push_back({w, random_term(cfg, rng)});
  }
  return Term::prob(std::move(parts));
}

TermPtr lifted(TermPtr t, Rng& rng) {
  const std::size_t rounds = rng.between(1, 2);
  for (std::size_t i = 0; i < rounds; ++i) {
    if (auto next = lift_random(t, rng)) t = *next;
  }
  return t;
}

bool has_prob_states(const Pts& p) {
  for (const auto& st : p.states()) {
    if (st.kind == StateKind::Probabilistic) return true;
  }
  return false;
}

std::string describe(const std::string& label, const TermPtr& s, const TermPtr& t) {
  return label + ": " + to_string(s) + "  vs  " + to_string(t);
}

std::string equiv_failure(const TermPtr& s, const TermPtr& t, const PriorityOrder& order) {
  const TraceVerdict v = ready_trace_equiv(compile(s, order), compile(t, order));
  if (v.equivalent) return {};
  return describe("not equivalent", s, t) + "; " + to_string(v);
}

}  // namespace

CoincidenceReport check_coincidence(const GenConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  const Stopwatch clock;
  CoincidenceReport out;
  out.coincidence.name = "coincidence";
  out.synthesis.name = "synthesis";

  auto compare = [&](const Pts& s, const Pts& t, const std::string& label, std::uint64_t seed) -> std::string {
    const TraceVerdict rt = ready_trace_equiv(s, t);
    const TestVerdict tv = testing_equiv_bounded(s, t);
    bump(out.coincidence, rt.equivalent ? "equivalent" : "distinguished");
    if (rt.equivalent != tv.equivalent) return label + "; " + to_string(rt) + "; " + to_string(tv);
    if (!rt.equivalent) {
      ++out.synthesis.samples;
      std::string failure;
      try {
        const auto test = synthesize_distinguishing_test(s, t);
        if (!test) {
          failure = "synthesis returned nothing";
        } else {
          const Pts compiled = compile(*test);
          if (has_prob_states(compiled)) {
            failure = "synthesised test " + to_string(*test) + " is probabilistic";
          } else if (equals(res(s, compiled), res(t, compiled))) {
            failure = "synthesised test " + to_string(*test) + " does not distinguish";
          }
        }
      } catch (const std::exception& e) {
        failure = std::string("synthesis: ") + e.what();
      }
      if (failure.empty()) {
        ++out.synthesis.passed;
      } else {
        out.synthesis.failures.push_back({seed, label + "; " + failure});
      }
    }
    return {};
  };

  pinned(out.coincidence, "coin machine pair", [&] {
    const auto s = parse_process(fixtures::kCoinEarly);
    const auto t = parse_process(fixtures::kCoinLate);
    return compare(compile(s), compile(t), describe("pinned", s, t), 0).empty() &&
           ready_trace_equiv(compile(s), compile(t)).equivalent;
  });
  pinned(out.coincidence, "menu-sensitive pair", [&] {
    const auto s = parse_process(fixtures::kMenuLeft);
    const auto t = parse_process(fixtures::kMenuRight);
    return compare(compile(s), compile(t), describe("pinned", s, t), 0).empty() &&
           !ready_trace_equiv(compile(s), compile(t)).equivalent;
  });

  run_samples(out.coincidence, cfg, n_samples, [&](std::uint64_t seed, Rng& rng) {
    const PriorityOrder order = random_priority(cfg, rng);
    TermPtr s;
    TermPtr t;
    switch (rng.below(4)) {
      case 0:
        s = random_term(cfg, rng);
        t = random_term(cfg, rng);
        break;
      case 1:
        s = fill(random_context(cfg, rng, 1), random_choice(cfg, rng));
        t = lifted(s, rng);
        break;
      case 2:
        s = fill(random_context(cfg, rng, 1), random_term(cfg, rng));
        t = mutate(s, cfg, rng);
        break;
      default:
        std::tie(s, t) = context_distribution(random_context(cfg, rng, 1), random_choice(cfg, rng));
        break;
    }
    return compare(compile(s, order), compile(t, order), describe("pair", s, t), seed);
  });
  out.coincidence.seconds = clock.seconds();
  out.synthesis.seconds = out.coincidence.seconds;
  return out;
}

PropertyReport check_congruence(const GenConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  const Stopwatch clock;
  PropertyReport report;
  report.name = "congruence";
  pinned(report, "prefix distribution under |[]| with e.d", [] {
    const auto p = parse_process("e->a->p{1/2: b, 1/2: c}");
    const auto q = parse_process("e->p{1/2: a->b, 1/2: a->c}");
    const auto ctx = parse_process("e->d");
    return ready_trace_equiv(compile(p), compile(q)).equivalent &&
           ready_trace_equiv(compile(Term::shared(p, ctx)), compile(Term::shared(q, ctx))).equivalent;
  });
  run_samples(report, cfg, n_samples, [&](std::uint64_t, Rng& rng) -> std::string {
    const PriorityOrder order = random_priority(cfg, rng);
    const TermPtr p = fill(random_context(cfg, rng, 1), random_choice(cfg, rng));
    const TermPtr q = lifted(p, rng);
    if (auto f = equiv_failure(p, q, order); !f.empty()) return "rewrite broke equivalence: " + f;
    const Context ctx = random_context(cfg, rng, 2);
    return equiv_failure(fill(ctx, p), fill(ctx, q), order);
  });
  report.seconds = clock.seconds();
  return report;
}

PropertyReport check_external_distributivity(const GenConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  const Stopwatch clock;
  PropertyReport report;
  report.name = "external-distributivity";
  pinned(report, "prefix over p{}", [] {
    return ready_trace_equiv(compile(parse_process("a->p{1/2: b, 1/2: c}")),
                             compile(parse_process("p{1/2: a->b, 1/2: a->c}")))
        .equivalent;
  });
  pinned(report, "singleton p{}", [] {
    const auto x = parse_process("a->b [] c");
    return ready_trace_equiv(compile(Term::prob({{Rational(1), x}})), compile(x)).equivalent;
  });
  pinned(report, "coin machine pair", [] {
    return ready_trace_equiv(compile(parse_process(fixtures::kCoinLate)), compile(parse_process(fixtures::kCoinEarly)))
        .equivalent;
  });
  GenConfig inner = cfg;
  inner.max_depth = std::max<std::size_t>(1, cfg.max_depth - 1);
  run_samples(report, cfg, n_samples, [&](std::uint64_t, Rng& rng) {
    const PriorityOrder order = random_priority(cfg, rng);
    std::vector<Action> labels;
    for (const auto& a : cfg.actions()) {
      if (rng.chance(1, 2)) labels.push_back(a);
    }
    if (labels.empty()) labels.push_back(cfg.actions()[rng.below(cfg.alphabet_size)]);
    const std::size_t j = cfg.max_denominator >= 2 ? rng.between(1, std::min(cfg.max_branching, cfg.max_denominator)) : 1;
    const auto weights = random_weights(j, cfg.max_denominator, rng);
    std::vector<std::vector<TermPtr>> x(labels.size());
    for (auto& row : x) {
      for (std::size_t k = 0; k < j; ++k) row.push_back(random_term(inner, rng));
    }
    const auto [lhs, rhs] = external_distribution(labels, weights, x);
    return equiv_failure(lhs, rhs, order);
  });
  report.seconds = clock.seconds();
  return report;
}

PropertyReport check_context_distributivity(const GenConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  const Stopwatch clock;
  PropertyReport report;
  report.name = "context-distributivity";
  run_samples(report, cfg, n_samples, [&](std::uint64_t, Rng& rng) {
    const PriorityOrder order = random_priority(cfg, rng);
    const Context ctx = random_context(cfg, rng, 3);
    const auto [lhs, rhs] = context_distribution(ctx, random_choice(cfg, rng));
    return equiv_failure(lhs, rhs, order);
  });
  report.seconds = clock.seconds();
  return report;
}

PropertyReport check_probability_axioms(const GenConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  const Stopwatch clock;
  PropertyReport report;
  report.name = "probability-axioms";
  run_samples(report, cfg, n_samples, [&](std::uint64_t, Rng& rng) -> std::string {
    const PriorityOrder order = random_priority(cfg, rng);
    const TermPtr term = fill(random_context(cfg, rng, 2), random_term(cfg, rng));
    const Pts p = compile(term, order);
    const std::string where = " in " + to_string(term);
    if (const Validation v = validate(p); !v.ok() || !v.acyclic) return "compiled graph invalid" + where;

    Rational total = 0;
    for (const auto& [m, w] : p1(p)) {
      if (w < 0 || w > 1) return "P1 value outside [0,1]" + where;
      total += w;
    }
    if (total != 1) return "P1 sums to " + format_rational(total) + where;

    const auto traces = enumerate_ready_traces(p, p.root());
    std::map<std::string, Rational> value;
    std::map<std::string, Rational> level_sum;
    for (const auto& [trace, w] : traces) {
      value[to_string(trace)] = w;
      ReadyTrace prefix = trace;
      prefix.menus.back().clear();
      level_sum[to_string(prefix)] += w;
    }
    for (const auto& [prefix, sum] : level_sum) {
      if (sum != 1) return "conditional menus after " + prefix + " sum to " + format_rational(sum) + where;
    }
    for (const auto& [trace, w] : traces) {
      Rational chain = 1;
      for (std::size_t k = 1; k <= trace.length(); ++k) {
        ReadyTrace prefix{{trace.menus.begin(), trace.menus.begin() + static_cast<std::ptrdiff_t>(k)},
                          {trace.actions.begin(), trace.actions.begin() + static_cast<std::ptrdiff_t>(k - 1)}};
        chain *= value.at(to_string(prefix));
      }
      const Rational joint = brute_joint(p, p.root(), trace.menus, trace.actions);
      if (chain != joint) {
        return "chain rule fails on " + to_string(trace) + ": " + format_rational(chain) + " vs " +
               format_rational(joint) + where;
      }
      const auto literal = pn(p, trace);
      if (!literal || *literal != w) return "derived-process value differs on " + to_string(trace) + where;
    }
    bump(report, "traces");
    return {};
  });
  report.seconds = clock.seconds();
  return report;
}

namespace {

RationalFn sum_of(const std::vector<Action>& vars) {
  RationalFn out = RationalFn::zero();
  for (const auto& v : vars) out += RationalFn::var(v);
  return out;
}

std::vector<Action> random_subset(const std::vector<Action>& all, Rng& rng) {
  std::vector<Action> out;
  for (const auto& a : all) {
    if (rng.chance(1, 2)) out.push_back(a);
  }
  if (out.empty()) out.push_back(all[rng.below(all.size())]);
  return out;
}

RationalFn random_fn(const std::vector<Action>& vars, Rng& rng, std::size_t depth) {
  if (depth == 0 || rng.chance(1, 3)) {
    switch (rng.below(3)) {
      case 0:
        return RationalFn::scalar(Rational(static_cast<unsigned long>(rng.below(5)),
                                           static_cast<unsigned long>(rng.between(1, 4))));
      case 1:
        return RationalFn::var(vars[rng.below(vars.size())]);
      default:
        return RationalFn::var(vars[rng.below(vars.size())]) / sum_of(random_subset(vars, rng));
    }
  }
  switch (rng.below(3)) {
    case 0:
      return random_fn(vars, rng, depth - 1) + random_fn(vars, rng, depth - 1);
    case 1:
      return random_fn(vars, rng, depth - 1) * random_fn(vars, rng, depth - 1);
    default:
      return random_fn(vars, rng, depth - 1) / sum_of(random_subset(vars, rng));
  }
}

}  // namespace

PropertyReport check_polyfn_soundness(const GenConfig& cfg, std::size_t n_pairs, std::size_t points) {
  cfg.validate();
  const Stopwatch clock;
  PropertyReport report;
  report.name = "polyfn-soundness";
  const auto vars = cfg.actions();
  run_samples(report, cfg, n_pairs, [&](std::uint64_t, Rng& rng) -> std::string {
    const RationalFn f = random_fn(vars, rng, 3);
    RationalFn g;
    switch (rng.below(4)) {
      case 0: {
        const RationalFn s = sum_of(random_subset(vars, rng));
        g = (f * s) / s;
        break;
      }
      case 1: {
        Rational q(static_cast<unsigned long>(rng.between(1, 3)), 4UL);
        q.canonicalize();
        g = f.scaled(q) + f.scaled(1 - q);
        break;
      }
      case 2:
        g = f + RationalFn::scalar(Rational(1, static_cast<unsigned long>(rng.between(1, 9))));
        break;
      default:
        g = random_fn(vars, rng, 3);
        break;
    }
    const bool same = equals(f, g);
    bump(report, same ? "equal pairs" : "unequal pairs");
    bool separated = false;
    for (std::size_t i = 0; i < points; ++i) {
      std::map<std::string, Rational> at;
      for (const auto& v : vars) {
        at[v] = Rational(static_cast<unsigned long>(rng.between(1, 20)), static_cast<unsigned long>(rng.between(1, 5)));
        at[v].canonicalize();
      }
      const bool agree = f.eval(at) == g.eval(at);
      if (same && !agree) return "equal functions differ numerically: " + to_string(f) + " vs " + to_string(g);
      separated = separated || !agree;
    }
    if (!same && !separated) {
      return "no sample point separates " + to_string(f) + " and " + to_string(g);
    }
    return {};
  });
  report.seconds = clock.seconds();
  return report;
}

bool HarnessReport::ok() const {
  for (const auto& p : properties) {
    if (!p.ok()) return false;
  }
  return true;
}

HarnessReport run_all(const GenConfig& cfg, std::size_t n_samples) {
  HarnessReport out;
  out.config = cfg;
  auto [coincidence, synthesis] = check_coincidence(cfg, n_samples);
  out.properties.push_back(std::move(coincidence));
  out.properties.push_back(std::move(synthesis));
  out.properties.push_back(check_congruence(cfg, n_samples));
  out.properties.push_back(check_external_distributivity(cfg, n_samples));
  out.properties.push_back(check_context_distributivity(cfg, n_samples));
  out.properties.push_back(check_probability_axioms(cfg, n_samples));
  out.properties.push_back(check_polyfn_soundness(cfg, n_samples));
  return out;
}

std::string to_json(const HarnessReport& r) {
  nlohmann::json doc;
  doc["config"] = {{"alphabet_size", r.config.alphabet_size},
                   {"max_depth", r.config.max_depth},
                   {"max_branching", r.config.max_branching},
                   {"max_denominator", r.config.max_denominator},
                   {"seed", r.config.seed}};
  doc["ok"] = r.ok();
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : r.properties) {
    nlohmann::json entry{{"name", p.name},
                         {"samples", p.samples},
                         {"passed", p.passed},
                         {"failed", p.failures.size()},
                         {"seconds", p.seconds}};
    nlohmann::json counters = nlohmann::json::object();
    for (const auto& [name, value] : p.counters) counters[name] = value;
    entry["counters"] = counters;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : p.failures) failures.push_back({{"seed", f.seed}, {"detail", f.detail}});
    entry["counterexamples"] = failures;
    props.push_back(std::move(entry));
  }
  doc["properties"] = std::move(props);
  return doc.dump(2);
}

}  // namespace probtest
