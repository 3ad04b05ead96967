#include "probtest/readytrace.hpp"

#include <cctype>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace probtest {

void check_trace(const ReadyTrace& trace) {
  if (trace.menus.empty()) throw TraceError("a ready trace has at least one menu");
  if (trace.actions.size() + 1 != trace.menus.size()) throw TraceError("menus and actions must alternate");
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    if (!trace.menus[i].contains(trace.actions[i])) {
      throw TraceError("action " + trace.actions[i] + " is not in menu " + to_string(trace.menus[i]));
    }
  }
}

std::string to_string(const ReadyTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.menus.size(); ++i) {
    if (i > 0) out += " -" + trace.actions[i - 1] + "-> ";
    out += to_string(trace.menus[i]);
  }
  return out;
}

ReadyTrace parse_trace(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& what) -> TraceError {
    return TraceError("trace column " + std::to_string(pos + 1) + ": " + what);
  };
  auto ident = [&] {
    skip();
    const std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
    if (start == pos) throw fail("expected an action");
    return std::string(text.substr(start, pos - start));
  };
  auto menu = [&] {
    skip();
    if (pos >= text.size() || text[pos] != '{') throw fail("expected '{'");
    ++pos;
    Menu m;
    skip();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      return m;
    }
    for (;;) {
      m.insert(ident());
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        return m;
      }
      throw fail("expected ',' or '}'");
    }
  };

  ReadyTrace trace;
  trace.menus.push_back(menu());
  for (;;) {
    skip();
    if (pos >= text.size()) break;
    if (text[pos] != '-') throw fail("expected '-a->'");
    ++pos;
    trace.actions.push_back(ident());
    if (text.substr(pos, 2) != "->") throw fail("expected '->'");
    pos += 2;
    trace.menus.push_back(menu());
  }
  check_trace(trace);
  return trace;
}

MenuDistribution p1(const Pts& p, StateId s) {
  p.require_acyclic();
  MenuDistribution out;
  std::function<void(StateId, const Rational&)> walk = [&](StateId u, const Rational& w) {
    if (!p.is_probabilistic(u)) {
      out[menu(p, u)] += w;
      return;
    }
    for (const auto& [t, pi] : p.state(u).branches) walk(t, w * pi);
  };
  walk(s, 1);
  return out;
}

std::optional<Rational> pn(const Pts& p, StateId s, const ReadyTrace& trace) {
  check_trace(trace);
  const MenuDistribution first = p1(p, s);
  auto prob_of = [](const MenuDistribution& d, const Menu& m) {
    const auto it = d.find(m);
    return it == d.end() ? Rational(0) : it->second;
  };
  if (trace.length() == 1) return prob_of(first, trace.menus.front());
  if (prob_of(first, trace.menus.front()) == 0) return std::nullopt;
  const Pts next = derived(p, s, trace.menus.front(), trace.actions.front());
  ReadyTrace rest{{trace.menus.begin() + 1, trace.menus.end()}, {trace.actions.begin() + 1, trace.actions.end()}};
  return pn(next, next.root(), rest);
}

namespace {

// A distribution over nondeterministic states: what an observer knows about
// the current state of a process. Sorted by state, no zero weights.
using Belief = std::map<StateId, Rational>;

Belief initial_belief(const Pts& p, StateId s) {
  if (!p.is_probabilistic(s)) return {{s, 1}};
  return Belief(p.state(s).branches.begin(), p.state(s).branches.end());
}

MenuDistribution menus_of(const Pts& p, const Belief& b) {
  MenuDistribution out;
  for (const auto& [s, w] : b) out[menu(p, s)] += w;
  return out;
}

// Conditioning on (M, a): the belief form of the derived process.
Belief condition(const Pts& p, const Belief& b, const Menu& m, const Action& a) {
  Rational mass = 0;
  for (const auto& [s, w] : b) {
    if (menu(p, s) == m) mass += w;
  }
  Belief out;
  for (const auto& [s, w] : b) {
    if (menu(p, s) != m) continue;
    const StateId next = *p.successor(s, a);
    if (!p.is_probabilistic(next)) {
      out[next] += w / mass;
    } else {
      for (const auto& [u, rho] : p.state(next).branches) out[u] += w * rho / mass;
    }
  }
  return out;
}

std::string belief_key(const Belief& b) {
  std::string out;
  for (const auto& [s, w] : b) out += std::to_string(s) + ":" + format_rational(w) + ";";
  return out;
}

}  // namespace

std::size_t default_trace_length(const Pts& p) { return p.action_depth() + 1; }

std::vector<WeightedTrace> enumerate_ready_traces(const Pts& p, StateId root, std::optional<std::size_t> max_len) {
  p.require_acyclic();
  const std::size_t limit = max_len.value_or(default_trace_length(p));
  std::vector<WeightedTrace> out;
  ReadyTrace prefix;
  std::function<void(const Belief&)> walk = [&](const Belief& b) {
    for (const auto& [m, w] : menus_of(p, b)) {
      prefix.menus.push_back(m);
      out.push_back({prefix, w});
      if (prefix.menus.size() < limit) {
        for (const auto& a : m) {
          prefix.actions.push_back(a);
          walk(condition(p, b, m, a));
          prefix.actions.pop_back();
        }
      }
      prefix.menus.pop_back();
    }
  };
  if (limit > 0) walk(initial_belief(p, root));
  return out;
}

TraceVerdict ready_trace_equiv(const Pts& s, const Pts& t) {
  s.require_acyclic();
  t.require_acyclic();
  std::unordered_set<std::string> known_equal;
  ReadyTrace prefix;

  std::function<std::optional<TraceVerdict>(const Belief&, const Belief&)> differ =
      [&](const Belief& bs, const Belief& bt) -> std::optional<TraceVerdict> {
    const std::string key = belief_key(bs) + "|" + belief_key(bt);
    if (known_equal.contains(key)) return std::nullopt;
    const MenuDistribution ds = menus_of(s, bs);
    const MenuDistribution dt = menus_of(t, bt);
    if (ds != dt) {
      // First menu in order whose probabilities disagree.
      auto is = ds.begin();
      auto it = dt.begin();
      Menu m;
      for (;;) {
        if (it == dt.end() || (is != ds.end() && is->first < it->first)) {
          m = is->first;
          break;
        }
        if (is == ds.end() || it->first < is->first) {
          m = it->first;
          break;
        }
        if (is->second != it->second) {
          m = is->first;
          break;
        }
        ++is;
        ++it;
      }
      TraceVerdict v;
      v.equivalent = false;
      ReadyTrace witness = prefix;
      witness.menus.push_back(m);
      v.trace = witness;
      v.left = ds.contains(m) ? ds.at(m) : Rational(0);
      v.right = dt.contains(m) ? dt.at(m) : Rational(0);
      return v;
    }
    for (const auto& [m, _] : ds) {
      for (const auto& a : m) {
        prefix.menus.push_back(m);
        prefix.actions.push_back(a);
        auto found = differ(condition(s, bs, m, a), condition(t, bt, m, a));
        prefix.menus.pop_back();
        prefix.actions.pop_back();
        if (found) return found;
      }
    }
    known_equal.insert(key);
    return std::nullopt;
  };

  if (auto found = differ(initial_belief(s, s.root()), initial_belief(t, t.root()))) return *found;
  return TraceVerdict{};
}

namespace {

std::string value_text(const std::optional<Rational>& v) { return v ? format_rational(*v) : "undefined"; }

}  // namespace

std::string to_string(const TraceVerdict& v) {
  if (v.equivalent) return "equivalent (ready traces)";
  return "distinguished by ready trace " + to_string(*v.trace) + ": " + value_text(v.left) + " vs " +
         value_text(v.right);
}

std::string to_json(const TraceVerdict& v) {
  nlohmann::json doc;
  doc["method"] = "ready-trace";
  doc["equivalent"] = v.equivalent;
  if (!v.equivalent) {
    doc["trace"] = to_string(*v.trace);
    doc["left"] = value_text(v.left);
    doc["right"] = value_text(v.right);
  }
  return doc.dump(2);
}

}  // namespace probtest
