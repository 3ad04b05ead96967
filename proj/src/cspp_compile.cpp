#include <map>
#include <unordered_map>

#include "probtest/cspp.hpp"

namespace probtest {

namespace {

// One rule application of the operational semantics. A term has either
// probabilistic steps or action steps, never both.
using ActionSteps = std::vector<std::pair<Action, TermPtr>>;
using ProbSteps = std::map<std::string, std::pair<Rational, TermPtr>>;

void add_prob(ProbSteps& out, const Rational& w, const TermPtr& t) {
  auto [it, fresh] = out.try_emplace(t->key(), w, t);
  if (!fresh) it->second.first += w;
}

class Semantics {
 public:
  explicit Semantics(const PriorityOrder& order) : order_(order) {}

  ActionSteps actions(const TermPtr& t) const {
    ActionSteps out;
    switch (t->kind()) {
      case Term::Kind::Empty:
      case Term::Kind::Prob:
        break;
      case Term::Kind::Choice:
        for (const auto& b : t->branches()) out.emplace_back(b.label, b.next);
        break;
      case Term::Kind::Priority: {
        const ActionSteps inner = actions(t->body());
        for (const auto& [a, next] : inner) {
          bool dominated = false;
          for (const auto& [b, _] : inner) dominated = dominated || order_.higher(b, a);
          if (!dominated) out.emplace_back(a, Term::priority(next));
        }
        break;
      }
      case Term::Kind::Sync: {
        const ActionSteps right = actions(t->right());
        for (const auto& [a, l] : actions(t->left())) {
          for (const auto& [b, r] : right) {
            if (a == b) out.emplace_back(a, Term::sync(l, r));
          }
        }
        break;
      }
      case Term::Kind::Shared: {
        const Menu& sync_set = t->sync_set();
        const ActionSteps left = actions(t->left());
        const ActionSteps right = actions(t->right());
        for (const auto& [a, l] : left) {
          if (!sync_set.contains(a)) {
            out.emplace_back(a, Term::shared_with(l, t->right(), sync_set));
            continue;
          }
          for (const auto& [b, r] : right) {
            if (a == b) out.emplace_back(a, Term::shared_with(l, r, sync_set));
          }
        }
        for (const auto& [b, r] : right) {
          if (!sync_set.contains(b)) out.emplace_back(b, Term::shared_with(t->left(), r, sync_set));
        }
        break;
      }
    }
    return out;
  }

  ProbSteps prob(const TermPtr& t) const {
    ProbSteps out;
    switch (t->kind()) {
      case Term::Kind::Empty:
      case Term::Kind::Choice:
        break;
      case Term::Kind::Prob:
        for (const auto& part : t->parts()) {
          if (!part.term->is_probabilistic()) {
            add_prob(out, part.weight, part.term);
            continue;
          }
          for (const auto& [_, step] : prob(part.term)) add_prob(out, part.weight * step.first, step.second);
        }
        break;
      case Term::Kind::Priority:
        for (const auto& [_, step] : prob(t->body())) add_prob(out, step.first, Term::priority(step.second));
        break;
      case Term::Kind::Sync:
      case Term::Kind::Shared: {
        const bool lp = t->left()->is_probabilistic();
        const bool rp = t->right()->is_probabilistic();
        auto compose = [&](const TermPtr& l, const TermPtr& r) {
          return t->kind() == Term::Kind::Sync ? Term::sync(l, r) : Term::shared_with(l, r, t->sync_set());
        };
        if (lp && rp) {
          const ProbSteps right = prob(t->right());
          for (const auto& [_, ls] : prob(t->left())) {
            for (const auto& [__, rs] : right) add_prob(out, ls.first * rs.first, compose(ls.second, rs.second));
          }
        } else if (lp) {
          for (const auto& [_, ls] : prob(t->left())) add_prob(out, ls.first, compose(ls.second, t->right()));
        } else if (rp) {
          for (const auto& [_, rs] : prob(t->right())) add_prob(out, rs.first, compose(t->left(), rs.second));
        }
        break;
      }
    }
    return out;
  }

 private:
  const PriorityOrder& order_;
};

}  // namespace

Pts compile(const TermPtr& t, const PriorityOrder& order) {
  const Semantics sem(order);
  std::vector<State> states;
  std::vector<TermPtr> terms;
  std::unordered_map<std::string, StateId> index;

  auto intern = [&](const TermPtr& term) {
    auto [it, fresh] = index.try_emplace(term->key(), static_cast<StateId>(terms.size()));
    if (fresh) {
      terms.push_back(term);
      states.push_back(State{term->is_probabilistic() ? StateKind::Probabilistic : StateKind::Nondeterministic, {}, {}});
    }
    return it->second;
  };

  intern(t);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const TermPtr term = terms[i];
    if (term->is_probabilistic()) {
      for (const auto& [_, step] : sem.prob(term)) {
        const StateId target = intern(step.second);
        states[i].branches[target] += step.first;
      }
    } else {
      for (const auto& [a, next] : sem.actions(term)) {
        const StateId target = intern(next);
        for (const auto& e : states[i].actions) {
          if (e.label == a) throw TermError("compiled term is not reactive: several '" + a + "' steps");
        }
        states[i].actions.push_back({a, target});
      }
    }
  }
  return Pts(std::move(states), 0);
}

}  // namespace probtest
