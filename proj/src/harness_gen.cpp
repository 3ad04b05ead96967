#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

#include "probtest/harness.hpp"

namespace probtest {

void GenConfig::validate() const {
  auto in = [](std::size_t v, std::size_t hi, const char* what) {
    if (v == 0 || v > hi) {
      throw std::invalid_argument(std::string(what) + " must be in 1.." + std::to_string(hi));
    }
  };
  in(alphabet_size, 4, "alphabet size");
  in(max_depth, 4, "max depth");
  in(max_branching, 3, "max branching");
  in(max_denominator, 8, "max denominator");
}

std::vector<Action> GenConfig::actions() const {
  static const std::vector<Action> all{"a", "b", "c", "d"};
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(alphabet_size, 4))};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t bound = n;
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::vector<Rational> random_weights(std::size_t n, std::size_t max_den, Rng& rng) {
  const std::size_t q = rng.between(std::min(n, max_den), max_den);
  if (q < n) throw std::invalid_argument("too many branches for the weight denominator");
  // A random composition of q into n positive parts.
  std::vector<std::size_t> cuts;
  std::vector<std::size_t> pool(q - 1);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t k = rng.below(pool.size());
    cuts.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(q);
  std::vector<Rational> out;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    out.emplace_back(static_cast<unsigned long>(c - prev), static_cast<unsigned long>(q));
    out.back().canonicalize();
    prev = c;
  }
  return out;
}

namespace {

std::vector<Action> pick_labels(const std::vector<Action>& actions, std::size_t k, Rng& rng) {
  std::vector<Action> pool = actions;
  std::vector<Action> out;
  for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
    const std::size_t j = rng.below(pool.size());
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return out;
}

TermPtr gen(const GenConfig& cfg, Rng& rng, std::size_t depth, bool allow_prob) {
  if (depth == 0) return Term::empty();
  const std::size_t roll = rng.below(10);
  if (roll == 0) return Term::empty();
  if (allow_prob && cfg.max_branching >= 2 && cfg.max_denominator >= 2 && roll >= 7) {
    const std::size_t k = rng.between(2, std::min(cfg.max_branching, cfg.max_denominator));
    const auto weights = random_weights(k, cfg.max_denominator, rng);
    std::vector<WeightedTerm> parts;
    for (const auto& w : weights) parts.push_back({w, gen(cfg, rng, depth, false)});
    return Term::prob(std::move(parts));
  }
  const std::size_t k = rng.between(1, std::min(cfg.max_branching, cfg.alphabet_size));
  std::vector<Branch> branches;
  for (const auto& a : pick_labels(cfg.actions(), k, rng)) branches.push_back({a, gen(cfg, rng, depth - 1, true)});
  return Term::choice(std::move(branches));
}

}  // namespace

TermPtr random_term(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  return gen(cfg, rng, rng.between(1, cfg.max_depth), true);
}

TermPtr random_term(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  return random_term(cfg, rng);
}

namespace {

TermPtr small_term(const GenConfig& cfg, Rng& rng) {
  GenConfig small = cfg;
  small.max_depth = 1;
  return random_term(small, rng);
}

TermPtr apply_layer(const ContextLayer& layer, const TermPtr& t, const std::optional<Menu>& pinned) {
  switch (layer.kind) {
    case ContextLayer::Kind::Choice: {
      std::vector<Branch> branches = layer.others;
      branches.push_back({layer.label, t});
      return Term::choice(std::move(branches));
    }
    case ContextLayer::Kind::Prob: {
      std::vector<WeightedTerm> parts{{layer.weight, t}};
      parts.insert(parts.end(), layer.rest.begin(), layer.rest.end());
      return Term::prob(std::move(parts));
    }
    case ContextLayer::Kind::Priority:
      return Term::priority(t);
    case ContextLayer::Kind::SyncLeft:
      return Term::sync(t, layer.other);
    case ContextLayer::Kind::SyncRight:
      return Term::sync(layer.other, t);
    case ContextLayer::Kind::SharedLeft:
      return pinned ? Term::shared_with(t, layer.other, *pinned) : Term::shared(t, layer.other);
    case ContextLayer::Kind::SharedRight:
      return pinned ? Term::shared_with(layer.other, t, *pinned) : Term::shared(layer.other, t);
  }
  return t;
}

}  // namespace

Context random_context(const GenConfig& cfg, Rng& rng, std::size_t max_layers) {
  Context ctx;
  const std::size_t n = rng.below(max_layers + 1);
  for (std::size_t i = 0; i < n; ++i) {
    ContextLayer layer;
    switch (rng.below(5)) {
      case 0: {
        layer.kind = ContextLayer::Kind::Choice;
        const auto labels = pick_labels(cfg.actions(), rng.between(1, std::min(cfg.max_branching, cfg.alphabet_size)),
                                        rng);
        layer.label = labels.front();
        for (std::size_t j = 1; j < labels.size(); ++j) layer.others.push_back({labels[j], small_term(cfg, rng)});
        break;
      }
      case 1: {
        if (cfg.max_branching < 2 || cfg.max_denominator < 2) {
          layer.kind = ContextLayer::Kind::Priority;
          break;
        }
        layer.kind = ContextLayer::Kind::Prob;
        const auto weights = random_weights(2, cfg.max_denominator, rng);
        layer.weight = weights[0];
        layer.rest.push_back({weights[1], small_term(cfg, rng)});
        break;
      }
      case 2:
        layer.kind = ContextLayer::Kind::Priority;
        break;
      case 3:
        layer.kind = rng.chance(1, 2) ? ContextLayer::Kind::SyncLeft : ContextLayer::Kind::SyncRight;
        layer.other = small_term(cfg, rng);
        break;
      default:
        layer.kind = rng.chance(1, 2) ? ContextLayer::Kind::SharedLeft : ContextLayer::Kind::SharedRight;
        layer.other = small_term(cfg, rng);
        break;
    }
    ctx.layers.push_back(std::move(layer));
  }
  return ctx;
}

TermPtr fill(const Context& ctx, const TermPtr& x) {
  TermPtr t = x;
  for (const auto& layer : ctx.layers) t = apply_layer(layer, t, std::nullopt);
  return t;
}

TermPtr fill_like(const Context& ctx, const TermPtr& x, const TermPtr& reference) {
  TermPtr ref = reference;
  TermPtr t = x;
  for (const auto& layer : ctx.layers) {
    ref = apply_layer(layer, ref, std::nullopt);
    std::optional<Menu> pinned;
    if (ref->kind() == Term::Kind::Shared) pinned = ref->sync_set();
    t = apply_layer(layer, t, pinned);
  }
  return t;
}

std::string to_string(const Context& ctx) { return to_string(fill(ctx, Term::prefix("HOLE", Term::empty()))); }

std::pair<TermPtr, TermPtr> external_distribution(const std::vector<Action>& labels,
                                                  const std::vector<Rational>& weights,
                                                  const std::vector<std::vector<TermPtr>>& x) {
  std::vector<Branch> left;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::vector<WeightedTerm> parts;
    for (std::size_t j = 0; j < weights.size(); ++j) parts.push_back({weights[j], x[i][j]});
    left.push_back({labels[i], Term::prob(std::move(parts))});
  }
  std::vector<WeightedTerm> right;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    std::vector<Branch> branches;
    for (std::size_t i = 0; i < labels.size(); ++i) branches.push_back({labels[i], x[i][j]});
    right.push_back({weights[j], Term::choice(std::move(branches))});
  }
  return {Term::choice(std::move(left)), Term::prob(std::move(right))};
}

std::pair<TermPtr, TermPtr> context_distribution(const Context& ctx, const TermPtr& choice) {
  if (choice->kind() != Term::Kind::Prob) throw std::invalid_argument("context_distribution needs a p{...} term");
  std::vector<WeightedTerm> parts;
  for (const auto& part : choice->parts()) parts.push_back({part.weight, fill_like(ctx, part.term, choice)});
  return {fill(ctx, choice), Term::prob(std::move(parts))};
}

namespace {

// Rebuilds a node with new children. A |[]| node whose set was the computed
// one stays computed; a pinned set is kept, widened if needed so that the
// composition stays reactive.
TermPtr rebuild(const TermPtr& t, const std::vector<TermPtr>& kids) {
  switch (t->kind()) {
    case Term::Kind::Empty:
      return t;
    case Term::Kind::Choice: {
      std::vector<Branch> branches;
      for (std::size_t i = 0; i < kids.size(); ++i) branches.push_back({t->branches()[i].label, kids[i]});
      return Term::choice(std::move(branches));
    }
    case Term::Kind::Prob: {
      std::vector<WeightedTerm> parts;
      for (std::size_t i = 0; i < kids.size(); ++i) parts.push_back({t->parts()[i].weight, kids[i]});
      return Term::prob(std::move(parts));
    }
    case Term::Kind::Priority:
      return Term::priority(kids[0]);
    case Term::Kind::Sync:
      return Term::sync(kids[0], kids[1]);
    case Term::Kind::Shared: {
      if (t->sync_set() == shared_alphabet(t->left(), t->right())) return Term::shared(kids[0], kids[1]);
      Menu l = t->sync_set();
      l.merge(shared_alphabet(kids[0], kids[1]));
      return Term::shared_with(kids[0], kids[1], std::move(l));
    }
  }
  return t;
}

std::vector<TermPtr> children(const TermPtr& t) {
  std::vector<TermPtr> out;
  switch (t->kind()) {
    case Term::Kind::Empty:
      break;
    case Term::Kind::Choice:
      for (const auto& b : t->branches()) out.push_back(b.next);
      break;
    case Term::Kind::Prob:
      for (const auto& p : t->parts()) out.push_back(p.term);
      break;
    case Term::Kind::Priority:
      out.push_back(t->body());
      break;
    case Term::Kind::Sync:
    case Term::Kind::Shared:
      out.push_back(t->left());
      out.push_back(t->right());
      break;
  }
  return out;
}

void preorder(const TermPtr& t, std::vector<TermPtr>& out) {
  out.push_back(t);
  for (const auto& c : children(t)) preorder(c, out);
}

TermPtr replace_at(const TermPtr& t, std::size_t target, std::size_t& counter,
                   const std::function<TermPtr(const TermPtr&)>& fn) {
  if (counter++ == target) return fn(t);
  std::vector<TermPtr> kids = children(t);
  bool changed = false;
  for (auto& k : kids) {
    TermPtr next = replace_at(k, target, counter, fn);
    changed = changed || next != k;
    k = std::move(next);
  }
  return changed ? rebuild(t, kids) : t;
}

// ⊕ moved out of child `slot` of node t.
TermPtr lift(const TermPtr& t, std::size_t slot) {
  const std::vector<TermPtr> kids = children(t);
  const TermPtr& inner = kids[slot];
  if (t->kind() == Term::Kind::Prob) {
    std::vector<WeightedTerm> parts;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i != slot) {
        parts.push_back(t->parts()[i]);
        continue;
      }
      for (const auto& p : inner->parts()) parts.push_back({t->parts()[i].weight * p.weight, p.term});
    }
    return Term::prob(std::move(parts));
  }
  std::vector<WeightedTerm> parts;
  for (const auto& p : inner->parts()) {
    std::vector<TermPtr> replaced = kids;
    replaced[slot] = p.term;
    TermPtr node;
    if (t->kind() == Term::Kind::Shared) {
      node = Term::shared_with(replaced[0], replaced[1], t->sync_set());
    } else {
      node = rebuild(t, replaced);
    }
    parts.push_back({p.weight, node});
  }
  return Term::prob(std::move(parts));
}

}  // namespace

std::optional<TermPtr> lift_random(const TermPtr& t, Rng& rng) {
  std::vector<TermPtr> nodes;
  preorder(t, nodes);
  std::vector<std::pair<std::size_t, std::size_t>> sites;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto kids = children(nodes[i]);
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (kids[k]->kind() == Term::Kind::Prob) sites.emplace_back(i, k);
    }
  }
  if (sites.empty()) return std::nullopt;
  const auto [node, slot] = sites[rng.below(sites.size())];
  std::size_t counter = 0;
  return replace_at(t, node, counter, [slot = slot](const TermPtr& n) { return lift(n, slot); });
}

TermPtr mutate(const TermPtr& t, const GenConfig& cfg, Rng& rng) {
  std::vector<TermPtr> nodes;
  preorder(t, nodes);
  const std::size_t target = rng.below(nodes.size());
  std::size_t counter = 0;
  return replace_at(t, target, counter, [&](const TermPtr&) { return small_term(cfg, rng); });
}

PriorityOrder random_priority(const GenConfig& cfg, Rng& rng) {
  const auto actions = cfg.actions();
  std::vector<std::pair<Action, Action>> pairs;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (std::size_t j = i + 1; j < actions.size(); ++j) {
      if (rng.chance(1, 3)) pairs.emplace_back(actions[i], actions[j]);
    }
  }
  return PriorityOrder(pairs);
}

Rational brute_joint(const Pts& p, StateId s, const std::vector<Menu>& menus, const std::vector<Action>& actions) {
  std::function<Rational(StateId, std::size_t)> walk = [&](StateId u, std::size_t i) -> Rational {
    const State& st = p.state(u);
    if (st.kind == StateKind::Probabilistic) {
      Rational sum = 0;
      for (const auto& [v, pi] : st.branches) sum += pi * walk(v, i);
      return sum;
    }
    Menu here;
    for (const auto& e : st.actions) here.insert(e.label);
    if (here != menus[i]) return 0;
    if (i + 1 == menus.size()) return 1;
    for (const auto& e : st.actions) {
      if (e.label == actions[i]) return walk(e.target, i + 1);
    }
    return 0;
  };
  return walk(s, 0);
}

}  // namespace probtest
