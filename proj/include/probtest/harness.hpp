#pragma once

// Randomised generation of processes, contexts and rewrites, and the
// property suites that check the algebraic laws and the coincidence of the
// two equivalences on generated instances.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "probtest/cspp.hpp"
#include "probtest/polyfn.hpp"

namespace probtest {

struct GenConfig {
  std::size_t alphabet_size = 3;
  std::size_t max_depth = 2;
  std::size_t max_branching = 2;
  std::size_t max_denominator = 4;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument outside alphabet <= 4, depth <= 4,
  /// branching <= 3, denominators <= 8, all positive.
  void validate() const;
  /// The first `alphabet_size` of a, b, c, d.
  std::vector<Action> actions() const;
};

std::uint64_t splitmix64(std::uint64_t x);

/// mt19937_64 with its own uniform reductions so that sequences do not depend
/// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n);
  /// Uniform in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

 private:
  std::mt19937_64 engine_;
};

/// A random process made of 0, prefixes, external and probabilistic choice.
TermPtr random_term(const GenConfig& cfg, Rng& rng);
TermPtr random_term(const GenConfig& cfg);

/// n weights with denominators <= max_den, each in (0,1], summing to 1.
std::vector<Rational> random_weights(std::size_t n, std::size_t max_den, Rng& rng);

/// One operator wrapped around the hole.
struct ContextLayer {
  enum class Kind { Choice, Prob, Priority, SyncLeft, SyncRight, SharedLeft, SharedRight };
  Kind kind = Kind::Priority;
  Action label;                    // Choice: the hole's prefix
  std::vector<Branch> others;      // Choice: remaining branches
  Rational weight;                 // Prob: weight of the hole
  std::vector<WeightedTerm> rest;  // Prob: remaining parts
  TermPtr other;                   // parallel partner
};

/// A process with one hole; layers run from the hole outwards.
struct Context {
  std::vector<ContextLayer> layers;
};

Context random_context(const GenConfig& cfg, Rng& rng, std::size_t max_layers = 2);
TermPtr fill(const Context& ctx, const TermPtr& x);
/// Fills with `x` while keeping the synchronisation sets that each |[]|
/// layer has when filled with `reference`.
TermPtr fill_like(const Context& ctx, const TermPtr& x, const TermPtr& reference);
std::string to_string(const Context& ctx);

/// Σ_i a_i.⊕_j π_j x_ij and ⊕_j π_j Σ_i a_i.x_ij.
std::pair<TermPtr, TermPtr> external_distribution(const std::vector<Action>& labels,
                                                  const std::vector<Rational>& weights,
                                                  const std::vector<std::vector<TermPtr>>& x);
/// C[⊕_i π_i x_i] and ⊕_i π_i C[x_i].
std::pair<TermPtr, TermPtr> context_distribution(const Context& ctx, const TermPtr& choice);

/// Applies one distributivity law at a random operator whose operand is a
/// probabilistic choice, moving the choice outwards. nullopt if there is no
/// such position.
std::optional<TermPtr> lift_random(const TermPtr& t, Rng& rng);

/// Replaces a random subterm by a fresh random term.
TermPtr mutate(const TermPtr& t, const GenConfig& cfg, Rng& rng);

/// Random priority order over the configured alphabet.
PriorityOrder random_priority(const GenConfig& cfg, Rng& rng);

/// Joint probability of observing the menus of `trace` given its actions,
/// summed over the paths of the raw graph.
Rational brute_joint(const Pts& p, StateId s, const std::vector<Menu>& menus, const std::vector<Action>& actions);

struct Counterexample {
  std::uint64_t seed = 0;
  std::string detail;
};

struct PropertyReport {
  std::string name;
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::vector<Counterexample> failures;
  double seconds = 0;
  /// Free-form counters, e.g. how many pairs were distinguished.
  std::vector<std::pair<std::string, std::size_t>> counters;

  bool ok() const { return failures.empty() && passed == samples; }
};

/// Ready-trace and bounded testing verdicts agree. Also reports, for every
/// distinguished pair, whether synthesis produced a verified test without
/// probabilistic transitions.
struct CoincidenceReport {
  PropertyReport coincidence;
  PropertyReport synthesis;
};

CoincidenceReport check_coincidence(const GenConfig& cfg, std::size_t n_samples);
PropertyReport check_congruence(const GenConfig& cfg, std::size_t n_samples);
PropertyReport check_external_distributivity(const GenConfig& cfg, std::size_t n_samples);
PropertyReport check_context_distributivity(const GenConfig& cfg, std::size_t n_samples);
PropertyReport check_probability_axioms(const GenConfig& cfg, std::size_t n_samples);
/// Symbolic equality against exact evaluation at `points` random positive
/// points per pair.
PropertyReport check_polyfn_soundness(const GenConfig& cfg, std::size_t n_pairs, std::size_t points = 100);

struct HarnessReport {
  GenConfig config;
  std::vector<PropertyReport> properties;

  bool ok() const;
};

HarnessReport run_all(const GenConfig& cfg, std::size_t n_samples);
std::string to_json(const HarnessReport& r);

/// Processes from the worked examples, in concrete syntax.
namespace fixtures {
inline constexpr const char* kCoinEarly = "p{1/2: h->p [] t, 1/2: h [] t->p}";
inline constexpr const char* kCoinLate = "h->p{1/2: p, 1/2: 0} [] t->p{1/2: 0, 1/2: p}";
inline constexpr const char* kCoinTest = "h->p->w [] t->p->w";
inline constexpr const char* kGuessTest = "h->p->w [] t->w";
inline constexpr const char* kMenuLeft = "p{1/2: a [] b->c, 1/2: b->d [] e}";
inline constexpr const char* kMenuRight = "p{1/2: a [] b->d, 1/2: b->c [] e}";
inline constexpr const char* kMenuTest = "a->w [] b->c->w";
inline constexpr const char* kFourWay =
    "p{1/8: a->c [] b->e, 3/8: a->d [] b->f, 1/4: a->d [] c->e, 1/4: a->d [] e->f}";
inline constexpr const char* kChannelWriter = "p{1/2: wrt->rev->head, 1/2: wrt->rev->tail}";
inline constexpr const char* kChannelReader = "wrt->p{1/2: rev->head->smile, 1/2: rev->tail->smile}";
}  // namespace fixtures

}  // namespace probtest
