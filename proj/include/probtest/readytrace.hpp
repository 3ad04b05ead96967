#pragma once

// Bayesian ready-trace semantics: the probability of observing a menu
// conditioned on the menus and actions observed so far.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probtest/pts.hpp"

namespace probtest {

/// (M1, a1, M2, ..., a(n-1), Mn) with a_i in M_i.
struct ReadyTrace {
  std::vector<Menu> menus;
  std::vector<Action> actions;

  std::size_t length() const { return menus.size(); }
  bool operator==(const ReadyTrace&) const = default;
};

class TraceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws TraceError unless the shape and a_i ∈ M_i hold.
void check_trace(const ReadyTrace& trace);
/// `{h,t} -h-> {p} -p-> {}`
std::string to_string(const ReadyTrace& trace);
ReadyTrace parse_trace(std::string_view text);

using MenuDistribution = std::map<Menu, Rational>;

/// P1: distribution of the initially observed menu.
MenuDistribution p1(const Pts& p, StateId s);
inline MenuDistribution p1(const Pts& p) { return p1(p, p.root()); }

/// Pn(Mn | M1, a1, ..., a(n-1)), computed through derived processes.
/// nullopt means undefined. A trace of length one yields P1(M1).
std::optional<Rational> pn(const Pts& p, StateId s, const ReadyTrace& trace);
inline std::optional<Rational> pn(const Pts& p, const ReadyTrace& trace) { return pn(p, p.root(), trace); }

struct WeightedTrace {
  ReadyTrace trace;
  Rational probability;
};

/// Longest action path plus one: enough for every trace to reach its final
/// (possibly empty) menu.
std::size_t default_trace_length(const Pts& p);

/// Every trace of length <= max_len whose conditional probability is defined
/// and positive, depth-first in menu order.
std::vector<WeightedTrace> enumerate_ready_traces(const Pts& p, StateId root,
                                                  std::optional<std::size_t> max_len = std::nullopt);

struct TraceVerdict {
  bool equivalent = true;
  std::optional<ReadyTrace> trace;
  std::optional<Rational> left;
  std::optional<Rational> right;
};

TraceVerdict ready_trace_equiv(const Pts& s, const Pts& t);

std::string to_string(const TraceVerdict& v);
std::string to_json(const TraceVerdict& v);

}  // namespace probtest
