#pragma once

// CSP_p: finite reactive probabilistic processes.
//
//   P ::= 0 | a1.P1 [] ... [] an.Pn | p{w1: P1, ..., wn: Pn} | prio(P)
//       | P || P | P |[]| P
//
// Tests are the same terms with an extra success leaf `w` (omega).

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probtest/pts.hpp"

namespace probtest {

class Term;
using TermPtr = std::shared_ptr<const Term>;

struct Branch {
  Action label;
  TermPtr next;
};

struct WeightedTerm {
  Rational weight;
  TermPtr term;
};

class TermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Term {
 public:
  enum class Kind { Empty, Choice, Prob, Priority, Sync, Shared };

  static TermPtr empty();
  /// External choice; labels must be pairwise distinct. An empty branch list
  /// is the empty process.
  static TermPtr choice(std::vector<Branch> branches);
  static TermPtr prefix(Action a, TermPtr next);
  /// The test leaf omega.0.
  static TermPtr omega();
  /// Weights in (0,1] summing to exactly 1.
  static TermPtr prob(std::vector<WeightedTerm> parts);
  static TermPtr priority(TermPtr body);
  /// Lock-step synchronisation.
  static TermPtr sync(TermPtr left, TermPtr right);
  /// Parallel composition synchronising on the shared alphabet of the
  /// operands and interleaving everything else.
  static TermPtr shared(TermPtr left, TermPtr right);
  /// Shared parallel composition with an explicitly pinned synchronisation
  /// set. Used for derivatives and rewrites, where the set of the original
  /// composition must be kept.
  static TermPtr shared_with(TermPtr left, TermPtr right, Menu sync_set);

  Kind kind() const { return kind_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<WeightedTerm>& parts() const { return parts_; }
  const TermPtr& body() const { return left_; }
  const TermPtr& left() const { return left_; }
  const TermPtr& right() const { return right_; }
  const Menu& sync_set() const { return sync_; }

  /// Labels occurring syntactically, omega excluded.
  const Menu& alphabet() const { return alphabet_; }
  bool has_omega() const { return has_omega_; }
  /// True when the term's first step is probabilistic.
  bool is_probabilistic() const { return probabilistic_; }
  /// Injective structural key; equal keys mean identical terms.
  const std::string& key() const { return key_; }

 private:
  explicit Term(Kind kind) : kind_(kind) {}
  void finish();

  Kind kind_;
  std::vector<Branch> branches_;
  std::vector<WeightedTerm> parts_;
  TermPtr left_;
  TermPtr right_;
  Menu sync_;
  Menu alphabet_;
  bool has_omega_ = false;
  bool probabilistic_ = false;
  std::string key_;
};

Menu alphabet(const TermPtr& t);
/// alphabet(p) ∩ alphabet(q): the synchronisation set of p |[]| q.
Menu shared_alphabet(const TermPtr& p, const TermPtr& q);

/// Concrete syntax. Compositions whose synchronisation set differs from the
/// computed shared alphabet render as `|[a,b]|`, which the parser rejects.
std::string to_string(const TermPtr& t);

/// Maximal action depth of the term (longest chain of prefixes, with
/// parallel operands adding up).
std::size_t term_depth(const TermPtr& t);

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a process; `w` (omega) is rejected.
TermPtr parse_process(std::string_view text);
/// Parses a test; `w` may appear as a branch.
TermPtr parse_test(std::string_view text);

/// Warnings for the associativity side condition of |[]|: within a chain of
/// shared compositions, no operand may share actions with two others that
/// also share actions with each other.
std::vector<std::string> lint(const TermPtr& t);

/// Strict partial order on actions, stored transitively closed.
class PriorityOrder {
 public:
  PriorityOrder() = default;
  /// Pairs (higher, lower). Throws TermError if the closure is not a strict
  /// partial order.
  explicit PriorityOrder(const std::vector<std::pair<Action, Action>>& pairs);
  /// Lines of the form "a > b"; blank lines and '#' comments ignored.
  static PriorityOrder parse(std::string_view text);

  bool higher(const Action& a, const Action& b) const { return closure_.contains({a, b}); }
  const std::set<std::pair<Action, Action>>& pairs() const { return closure_; }

 private:
  std::set<std::pair<Action, Action>> closure_;
};

/// Reachable transition graph of a term under the structural operational
/// semantics. Structurally equal derivatives share one state.
Pts compile(const TermPtr& t, const PriorityOrder& order = {});

}  // namespace probtest
