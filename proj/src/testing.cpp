#include "probtest/testing.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "probtest/readytrace.hpp"

namespace probtest {

namespace {

class ResEvaluator {
 public:
  ResEvaluator(const Pts& process, const Pts& test) : p_(process), t_(test) {
    p_.require_acyclic();
    t_.require_acyclic();
  }

  const RationalFn& operator()(StateId s, StateId t) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | t;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    RationalFn out = compute(s, t);
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  RationalFn compute(StateId s, StateId t) {
    const bool t_prob = t_.is_probabilistic(t);
    if (!t_prob && t_.can(t, kOmega)) return RationalFn::one();
    if (p_.is_probabilistic(s)) {
      RationalFn sum = RationalFn::zero();
      for (const auto& [si, pi] : p_.state(s).branches) sum += (*this)(si, t).scaled(pi);
      return sum;
    }
    if (t_prob) {
      RationalFn sum = RationalFn::zero();
      for (const auto& [ti, pi] : t_.state(t).branches) sum += (*this)(s, ti).scaled(pi);
      return sum;
    }
    Polynomial total;
    RationalFn weighted = RationalFn::zero();
    for (const auto& e : p_.state(s).actions) {
      const auto next = t_.successor(t, e.label);
      if (!next) continue;
      total += Polynomial::variable(e.label);
      weighted += RationalFn::var(e.label) * (*this)(e.target, *next);
    }
    if (total.is_zero()) return RationalFn::zero();
    return weighted / RationalFn::from_polynomial(total);
  }

  const Pts& p_;
  const Pts& t_;
  std::unordered_map<std::uint64_t, RationalFn> memo_;
};

// Tests as a shared DAG: a node is `w` (no branches) or an external choice.
struct TestNode {
  std::vector<std::pair<Action, std::size_t>> branches;
  std::size_t depth = 0;
  std::size_t size = 1;
  StateId state = 0;
};

class TestForest {
 public:
  TestForest() {
    done_ = builder_.add_state();
    const StateId w = builder_.add_state();
    builder_.add_action(w, kOmega, done_);
    nodes_.push_back(TestNode{{}, 0, 1, w});
  }

  static constexpr std::size_t kOmegaNode = 0;

  std::size_t add_choice(std::vector<std::pair<Action, std::size_t>> branches) {
    TestNode node;
    node.state = builder_.add_state();
    node.size = 0;
    for (const auto& [a, child] : branches) {
      builder_.add_action(node.state, a, nodes_[child].state);
      node.depth = std::max(node.depth, 1 + nodes_[child].depth);
      node.size += 1 + nodes_[child].size;
    }
    node.branches = std::move(branches);
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  const TestNode& node(std::size_t i) const { return nodes_[i]; }
  Pts graph() const { return builder_.build(done_); }

  TermPtr term(std::size_t i) const {
    const TestNode& n = nodes_[i];
    if (n.branches.empty()) return Term::omega();
    std::vector<Branch> branches;
    for (const auto& [a, child] : n.branches) branches.push_back({a, term(child)});
    return Term::choice(std::move(branches));
  }

 private:
  PtsBuilder builder_;
  StateId done_;
  std::vector<TestNode> nodes_;
};

// All tests over the per-position relevant actions, up to `depth`.
// `relevant(pos)` yields the candidate actions at a position and `step`
// advances a position along an action.
template <typename Position, typename Relevant, typename Step, typename Key>
std::vector<std::size_t> build_tests(TestForest& forest, const Position& root, std::size_t depth,
                                     Relevant&& relevant, Step&& step, Key&& key) {
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>> memo;
  std::function<std::vector<std::size_t>(const Position&, std::size_t)> go =
      [&](const Position& pos, std::size_t d) -> std::vector<std::size_t> {
    const auto mkey = std::make_pair(key(pos), d);
    if (auto it = memo.find(mkey); it != memo.end()) return it->second;
    std::vector<std::size_t> out{TestForest::kOmegaNode};
    const std::vector<Action> actions = d == 0 ? std::vector<Action>{} : relevant(pos);
    std::vector<std::vector<std::size_t>> children;
    for (const auto& a : actions) children.push_back(go(step(pos, a), d - 1));
    // Every nonempty subset of actions, every combination of continuations.
    for (std::size_t mask = 1; mask < (std::size_t{1} << actions.size()); ++mask) {
      std::vector<std::size_t> chosen;
      for (std::size_t i = 0; i < actions.size(); ++i) {
        if (mask & (std::size_t{1} << i)) chosen.push_back(i);
      }
      std::vector<std::size_t> digit(chosen.size(), 0);
      for (;;) {
        std::vector<std::pair<Action, std::size_t>> branches;
        for (std::size_t k = 0; k < chosen.size(); ++k) {
          branches.emplace_back(actions[chosen[k]], children[chosen[k]][digit[k]]);
        }
        out.push_back(forest.add_choice(std::move(branches)));
        std::size_t k = 0;
        for (; k < chosen.size(); ++k) {
          if (++digit[k] < children[chosen[k]].size()) break;
          digit[k] = 0;
        }
        if (k == chosen.size()) break;
      }
    }
    memo.emplace(mkey, out);
    return out;
  };
  return go(root, depth);
}

// Sets of nondeterministic states a process may be in after an action prefix.
using StateSet = std::vector<StateId>;

StateSet start_set(const Pts& p) {
  if (!p.is_probabilistic(p.root())) return {p.root()};
  StateSet out;
  for (const auto& [s, _] : p.state(p.root()).branches) out.push_back(s);
  return out;
}

StateSet advance(const Pts& p, const StateSet& from, const Action& a) {
  StateSet out;
  for (StateId s : from) {
    const auto next = p.successor(s, a);
    if (!next) continue;
    if (!p.is_probabilistic(*next)) {
      out.push_back(*next);
    } else {
      for (const auto& [u, _] : p.state(*next).branches) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string set_key(const StateSet& s) {
  std::string out;
  for (StateId id : s) out += std::to_string(id) + ",";
  return out;
}

}  // namespace

RationalFn res(const Pts& process, const Pts& test) {
  ResEvaluator eval(process, test);
  return eval(process.root(), test.root());
}

std::vector<TermPtr> enumerate_tests(const Menu& alphabet, std::size_t depth) {
  TestForest forest;
  const std::vector<Action> actions(alphabet.begin(), alphabet.end());
  struct Unit {};
  auto ids = build_tests(
      forest, Unit{}, depth, [&](const Unit&) { return actions; }, [](const Unit&, const Action&) { return Unit{}; },
      [](const Unit&) { return std::string{}; });
  std::vector<std::pair<std::tuple<std::size_t, std::size_t, std::string>, TermPtr>> keyed;
  for (std::size_t id : ids) {
    TermPtr t = forest.term(id);
    keyed.push_back({{forest.node(id).depth, forest.node(id).size, to_string(t)}, t});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<TermPtr> out;
  for (auto& [_, t] : keyed) out.push_back(std::move(t));
  return out;
}

std::size_t default_test_depth(const Pts& s, const Pts& t) {
  return std::max(s.action_depth(), t.action_depth()) + 1;
}

TestVerdict testing_equiv_bounded(const Pts& s, const Pts& t, std::optional<std::size_t> depth) {
  s.require_acyclic();
  t.require_acyclic();
  const std::size_t bound = depth.value_or(default_test_depth(s, t));

  using Position = std::pair<StateSet, StateSet>;
  TestForest forest;
  auto relevant = [&](const Position& pos) {
    Menu m;
    for (StateId u : pos.first) m.merge(menu(s, u));
    for (StateId u : pos.second) m.merge(menu(t, u));
    return std::vector<Action>(m.begin(), m.end());
  };
  auto step = [&](const Position& pos, const Action& a) {
    return Position{advance(s, pos.first, a), advance(t, pos.second, a)};
  };
  auto key = [](const Position& pos) { return set_key(pos.first) + "|" + set_key(pos.second); };
  std::vector<std::size_t> ids = build_tests(forest, Position{start_set(s), start_set(t)}, bound, relevant, step, key);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) {
    const TestNode& a = forest.node(x);
    const TestNode& b = forest.node(y);
    return std::tie(a.depth, a.size) < std::tie(b.depth, b.size);
  });

  const Pts graph = forest.graph();
  ResEvaluator left(s, graph);
  ResEvaluator right(t, graph);
  TestVerdict v;
  v.depth = bound;
  // Within a (depth, size) group the witness with the smallest rendering wins.
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    std::optional<std::pair<std::string, std::size_t>> best;
    while (j < ids.size() && forest.node(ids[j]).depth == forest.node(ids[i]).depth &&
           forest.node(ids[j]).size == forest.node(ids[i]).size) {
      const StateId st = forest.node(ids[j]).state;
      ++v.tests_run;
      if (!equals(left(s.root(), st), right(t.root(), st))) {
        std::string text = to_string(forest.term(ids[j]));
        if (!best || text < best->first) best = {std::move(text), ids[j]};
      }
      ++j;
    }
    if (best) {
      const StateId st = forest.node(best->second).state;
      v.equivalent = false;
      v.test = forest.term(best->second);
      v.left = left(s.root(), st);
      v.right = right(t.root(), st);
      return v;
    }
    i = j;
  }
  return v;
}

namespace {

RationalFn run(const Pts& p, const TermPtr& test) { return res(p, compile(test)); }

bool distinguishes(const Pts& s, const Pts& t, const TermPtr& test) {
  const Pts compiled = compile(test);
  return !equals(res(s, compiled), res(t, compiled));
}

TermPtr omega_probes(const std::vector<Action>& actions) {
  std::vector<Branch> branches;
  for (const auto& a : actions) branches.push_back({a, Term::omega()});
  return Term::choice(std::move(branches));
}

// Subsets in increasing cardinality, lexicographic within a cardinality.
std::vector<std::vector<Action>> subsets_by_size(const std::vector<Action>& items) {
  std::vector<std::vector<Action>> out;
  for (std::size_t k = 0; k <= items.size(); ++k) {
    std::vector<bool> pick(items.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      std::vector<Action> subset;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (pick[i]) subset.push_back(items[i]);
      }
      out.push_back(std::move(subset));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

bool smaller_menu(const Menu& x, const Menu& y) { return std::pair(x.size(), x) < std::pair(y.size(), y); }

TermPtr synthesize(const Pts& s, const Pts& t) {
  const MenuDistribution ds = p1(s);
  const MenuDistribution dt = p1(t);

  if (ds != dt) {
    std::optional<Menu> chosen;
    auto consider = [&](const Menu& m) {
      const Rational a = ds.contains(m) ? ds.at(m) : Rational(0);
      const Rational b = dt.contains(m) ? dt.at(m) : Rational(0);
      if (a != b && (!chosen || smaller_menu(m, *chosen))) chosen = m;
    };
    for (const auto& [m, _] : ds) consider(m);
    for (const auto& [m, _] : dt) consider(m);
    Menu all = s.alphabet();
    all.merge(t.alphabet());
    std::vector<Action> outside;
    for (const auto& a : all) {
      if (!chosen->contains(a)) outside.push_back(a);
    }
    TermPtr test = omega_probes(outside);
    if (distinguishes(s, t, test)) return test;
    throw std::logic_error("menu probe " + to_string(test) + " does not distinguish");
  }

  Menu first_level;
  for (const auto& [m, _] : ds) first_level.insert(m.begin(), m.end());

  for (const auto& [m, _] : ds) {
    for (const auto& a : m) {
      const Pts sd = derived(s, s.root(), m, a);
      const Pts td = derived(t, t.root(), m, a);
      if (ready_trace_equiv(sd, td).equivalent) continue;
      const TermPtr inner = synthesize(sd, td);

      // Smallest menu offering `a` after which `inner` tells the two apart.
      std::optional<Menu> m1;
      for (const auto& [candidate, __] : ds) {
        if (!candidate.contains(a) || (m1 && !smaller_menu(candidate, *m1))) continue;
        if (!equals(run(derived(s, s.root(), candidate, a), inner), run(derived(t, t.root(), candidate, a), inner))) {
          m1 = candidate;
        }
      }
      if (!m1) continue;
      std::vector<Action> rest;
      for (const auto& b : first_level) {
        if (!m1->contains(b)) rest.push_back(b);
      }
      for (const auto& probes : subsets_by_size(rest)) {
        std::vector<Branch> branches{{a, inner}};
        for (const auto& b : probes) branches.push_back({b, Term::omega()});
        TermPtr test = Term::choice(std::move(branches));
        if (distinguishes(s, t, test)) return test;
      }
    }
  }
  throw std::logic_error("no verified distinguishing test found");
}

}  // namespace

std::optional<TermPtr> synthesize_distinguishing_test(const Pts& s, const Pts& t) {
  s.require_acyclic();
  t.require_acyclic();
  if (ready_trace_equiv(s, t).equivalent) return std::nullopt;
  return synthesize(s, t);
}

std::string to_string(const TestVerdict& v) {
  if (v.equivalent) {
    return "equivalent up to depth " + std::to_string(v.depth) + " (bounded testing, " + std::to_string(v.tests_run) +
           " tests)";
  }
  return "distinguished by test " + to_string(v.test) + ": " + to_string(*v.left) + " vs " + to_string(*v.right);
}

std::string to_json(const TestVerdict& v) {
  nlohmann::json doc;
  doc["method"] = "testing";
  doc["equivalent"] = v.equivalent;
  doc["depth"] = v.depth;
  doc["tests_run"] = v.tests_run;
  if (!v.equivalent) {
    doc["test"] = to_string(v.test);
    doc["left"] = to_string(*v.left);
    doc["right"] = to_string(*v.right);
  }
  return doc.dump(2);
}

}  // namespace probtest
