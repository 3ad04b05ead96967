#include "probtest/pts.hpp"

#include <algorithm>
#include <functional>

namespace probtest {

Pts::Pts(std::vector<State> states, StateId root) : states_(std::move(states)), root_(root) {
  if (root_ >= states_.size()) throw PtsError("root " + std::to_string(root_) + " is not a state");
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (const auto& e : states_[s].actions) {
      if (e.target >= states_.size()) throw PtsError("state " + std::to_string(s) + ": dangling action edge");
    }
    for (const auto& [t, _] : states_[s].branches) {
      if (t >= states_.size()) throw PtsError("state " + std::to_string(s) + ": dangling probabilistic edge");
    }
  }
}

const State& Pts::state(StateId s) const {
  if (s >= states_.size()) throw PtsError("no state " + std::to_string(s));
  return states_[s];
}

std::optional<StateId> Pts::successor(StateId s, const Action& a) const {
  for (const auto& e : state(s).actions) {
    if (e.label == a) return e.target;
  }
  return std::nullopt;
}

namespace {

std::vector<StateId> successors(const State& st) {
  std::vector<StateId> out;
  for (const auto& e : st.actions) out.push_back(e.target);
  for (const auto& [t, _] : st.branches) out.push_back(t);
  return out;
}

std::vector<StateId> reachable(const std::vector<State>& states, StateId root) {
  std::vector<StateId> order{root};
  std::vector<bool> seen(states.size(), false);
  seen[root] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (StateId t : successors(states[order[i]])) {
      if (!seen[t]) {
        seen[t] = true;
        order.push_back(t);
      }
    }
  }
  return order;
}

// Iterative three-colour DFS; false when a back edge is reachable from root.
bool acyclic_from(const std::vector<State>& states, StateId root) {
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> colour(states.size(), kWhite);
  std::vector<std::pair<StateId, std::vector<StateId>>> stack;
  stack.emplace_back(root, successors(states[root]));
  colour[root] = kGrey;
  while (!stack.empty()) {
    auto& [s, pending] = stack.back();
    if (pending.empty()) {
      colour[s] = kBlack;
      stack.pop_back();
      continue;
    }
    const StateId t = pending.back();
    pending.pop_back();
    if (colour[t] == kGrey) return false;
    if (colour[t] == kWhite) {
      colour[t] = kGrey;
      stack.emplace_back(t, successors(states[t]));
    }
  }
  return true;
}

}  // namespace

Menu Pts::alphabet() const {
  Menu out;
  for (StateId s : reachable(states_, root_)) {
    for (const auto& e : states_[s].actions) {
      if (e.label != kOmega) out.insert(e.label);
    }
  }
  return out;
}

bool Pts::is_acyclic() const { return acyclic_from(states_, root_); }

void Pts::require_acyclic() const {
  if (!is_acyclic()) throw CyclicInputError("process graph is cyclic; only finite acyclic processes are supported");
}

std::size_t Pts::action_depth(StateId s) const {
  require_acyclic();
  std::vector<std::optional<std::size_t>> memo(states_.size());
  std::function<std::size_t(StateId)> depth = [&](StateId u) -> std::size_t {
    if (memo[u]) return *memo[u];
    std::size_t best = 0;
    for (const auto& e : states_[u].actions) best = std::max(best, 1 + depth(e.target));
    for (const auto& [t, _] : states_[u].branches) best = std::max(best, depth(t));
    memo[u] = best;
    return best;
  };
  return depth(s);
}

Pts Pts::rerooted(StateId root) const {
  Pts out = *this;
  out.root_ = root;
  state(root);
  return out;
}

Pts Pts::compacted() const {
  const std::vector<StateId> order = reachable(states_, root_);
  std::vector<StateId> index(states_.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = static_cast<StateId>(i);
  std::vector<State> states;
  states.reserve(order.size());
  for (StateId old : order) {
    State st;
    st.kind = states_[old].kind;
    for (const auto& e : states_[old].actions) st.actions.push_back({e.label, index[e.target]});
    for (const auto& [t, w] : states_[old].branches) st.branches[index[t]] += w;
    states.push_back(std::move(st));
  }
  return Pts(std::move(states), 0);
}

StateId PtsBuilder::add_state(StateKind kind) {
  states_.push_back(State{kind, {}, {}});
  return static_cast<StateId>(states_.size() - 1);
}

void PtsBuilder::add_action(StateId from, const Action& label, StateId to) {
  states_.at(from).actions.push_back({label, to});
}

void PtsBuilder::add_branch(StateId from, const Rational& weight, StateId to) {
  Rational w = weight;
  w.canonicalize();
  states_.at(from).branches[to] += w;
}

Validation validate(const Pts& p) {
  Validation v;
  auto report = [&](std::size_t s, const std::string& what) {
    v.diagnostics.push_back("state " + std::to_string(s) + ": " + what);
  };
  for (std::size_t s = 0; s < p.size(); ++s) {
    const State& st = p.states()[s];
    if (st.kind == StateKind::Nondeterministic) {
      if (!st.branches.empty()) report(s, "nondeterministic state has probabilistic transitions");
      std::set<Action> seen;
      for (const auto& e : st.actions) {
        if (e.label.empty()) report(s, "empty action label");
        if (!seen.insert(e.label).second) {
          report(s, "reactive determinism violated: several '" + e.label + "' transitions");
        }
      }
      continue;
    }
    if (!st.actions.empty()) report(s, "probabilistic state has action transitions");
    if (st.branches.empty()) report(s, "probabilistic state without transitions (must be nondeterministic)");
    Rational total = 0;
    for (const auto& [t, w] : st.branches) {
      if (w <= 0 || w > 1) report(s, "weight " + format_rational(w) + " outside (0,1]");
      if (p.states()[t].kind == StateKind::Probabilistic) {
        report(s, "probabilistic transition to probabilistic state " + std::to_string(t));
      }
      total += w;
    }
    if (!st.branches.empty() && total != 1) report(s, "weights sum to " + format_rational(total) + " != 1");
  }
  v.acyclic = p.is_acyclic();
  return v;
}

Menu menu(const Pts& p, StateId s) {
  const State& st = p.state(s);
  if (st.kind == StateKind::Probabilistic) throw PtsError("menu of probabilistic state " + std::to_string(s));
  Menu out;
  for (const auto& e : st.actions) out.insert(e.label);
  return out;
}

Pts derived(const Pts& p, StateId s, const Menu& m, const Action& a) {
  if (!m.contains(a)) throw PtsError("menu not offered: action " + a + " is not in " + to_string(m));
  if (!p.is_probabilistic(s)) {
    if (menu(p, s) != m) throw PtsError("menu not offered: " + to_string(m));
    return p.rerooted(*p.successor(s, a)).compacted();
  }

  Rational mass = 0;
  for (const auto& [t, w] : p.state(s).branches) {
    if (menu(p, t) == m) mass += w;
  }
  if (mass == 0) throw PtsError("menu not offered: " + to_string(m));

  std::vector<State> states = p.states();
  State fresh;
  fresh.kind = StateKind::Probabilistic;
  for (const auto& [t, w] : p.state(s).branches) {
    if (menu(p, t) != m) continue;
    const StateId next = *p.successor(t, a);
    const State& after = p.state(next);
    if (after.kind != StateKind::Probabilistic) {
      fresh.branches[next] += w / mass;
    } else {
      for (const auto& [u, rho] : after.branches) fresh.branches[u] += w * rho / mass;
    }
  }
  const auto root = static_cast<StateId>(states.size());
  states.push_back(std::move(fresh));
  return Pts(std::move(states), root).compacted();
}

bool isomorphic(const Pts& a, const Pts& b) {
  auto canonical = [](const Pts& p) {
    std::vector<std::optional<std::string>> memo(p.size());
    std::function<std::string(StateId)> canon = [&](StateId s) -> std::string {
      if (memo[s]) return *memo[s];
      const State& st = p.state(s);
      std::vector<std::string> children;
      for (const auto& e : st.actions) children.push_back(e.label + ":" + canon(e.target));
      for (const auto& [t, w] : st.branches) children.push_back(format_rational(w) + "~" + canon(t));
      std::sort(children.begin(), children.end());
      std::string out = st.kind == StateKind::Probabilistic ? "P(" : "N(";
      for (const auto& c : children) out += c + ",";
      out += ")";
      memo[s] = out;
      return out;
    };
    return canon(p.root());
  };
  a.require_acyclic();
  b.require_acyclic();
  return canonical(a) == canonical(b);
}

std::string to_string(const Menu& m) {
  std::string out = "{";
  for (const auto& a : m) {
    if (out.size() > 1) out += ',';
    out += a;
  }
  return out + "}";
}

}  // namespace probtest
