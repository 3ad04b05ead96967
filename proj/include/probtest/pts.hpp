#pragma once

// Reactive probabilistic transition systems.
//
// States are either nondeterministic (outgoing action transitions, at most
// one per label) or probabilistic (outgoing weighted transitions summing to
// one and leading to nondeterministic states). A process is a root state
// together with everything reachable from it.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "probtest/polyfn.hpp"

namespace probtest {

using Action = std::string;
using Menu = std::set<Action>;
using StateId = std::uint32_t;

/// Success action of tests; never part of a process alphabet.
inline const Action kOmega = "w";

enum class StateKind : std::uint8_t { Nondeterministic, Probabilistic };

struct ActionEdge {
  Action label;
  StateId target;
};

struct State {
  StateKind kind = StateKind::Nondeterministic;
  std::vector<ActionEdge> actions;
  /// Probabilistic successors keyed by target; parallel edges are summed.
  std::map<StateId, Rational> branches;
};

class PtsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by every probability or equivalence computation on cyclic input.
class CyclicInputError : public PtsError {
 public:
  using PtsError::PtsError;
};

class Pts {
 public:
  Pts(std::vector<State> states, StateId root);

  StateId root() const { return root_; }
  std::size_t size() const { return states_.size(); }
  const State& state(StateId s) const;
  const std::vector<State>& states() const { return states_; }

  bool is_probabilistic(StateId s) const { return state(s).kind == StateKind::Probabilistic; }
  /// Target of the first action edge of s labelled `a`, if any.
  std::optional<StateId> successor(StateId s, const Action& a) const;
  bool can(StateId s, const Action& a) const { return successor(s, a).has_value(); }

  /// Labels on edges reachable from the root, omega excluded.
  Menu alphabet() const;
  bool is_acyclic() const;
  /// Throws CyclicInputError unless the reachable graph is acyclic.
  void require_acyclic() const;
  /// Longest path (counting action edges only) from s.
  std::size_t action_depth(StateId s) const;
  std::size_t action_depth() const { return action_depth(root_); }

  /// Same process with a different root.
  Pts rerooted(StateId root) const;
  /// Only the states reachable from the root, renumbered in BFS order.
  Pts compacted() const;

 private:
  std::vector<State> states_;
  StateId root_;
};

/// Incremental construction; probabilistic edges to the same target merge.
class PtsBuilder {
 public:
  StateId add_state(StateKind kind = StateKind::Nondeterministic);
  void add_action(StateId from, const Action& label, StateId to);
  void add_branch(StateId from, const Rational& weight, StateId to);
  Pts build(StateId root) const { return Pts(states_, root); }

 private:
  std::vector<State> states_;
};

struct Validation {
  std::vector<std::string> diagnostics;
  bool acyclic = true;

  bool ok() const { return diagnostics.empty(); }
};

/// Checks every structural invariant of a PTS. Never throws.
Validation validate(const Pts& p);

/// I(s). Throws PtsError for probabilistic states.
Menu menu(const Pts& p, StateId s);

/// The conditional continuation s_(M,a): what s becomes once menu M was
/// offered and a was performed. Throws PtsError("menu not offered") when M
/// is not a menu of s (or of a probabilistic successor of s) or a is not in M.
Pts derived(const Pts& p, StateId s, const Menu& m, const Action& a);

/// Structural isomorphism of the tree unfoldings from the roots, ignoring
/// state identities.
bool isomorphic(const Pts& a, const Pts& b);

std::string to_string(const Menu& m);

// Serialisation (pts_io.cpp).
std::string to_json(const Pts& p);
/// Throws PtsError on malformed documents.
Pts pts_from_json(const std::string& text);
/// Graphviz rendering: solid labelled edges for actions, dashed edges with
/// weights for probabilistic transitions.
std::string to_dot(const Pts& p, const std::string& name = "pts");

}  // namespace probtest
