#include <sstream>

#include <json.hpp>

#include "probtest/pts.hpp"

namespace probtest {

using nlohmann::json;

std::string to_json(const Pts& p) {
  json doc;
  const Menu alphabet = p.alphabet();
  doc["alphabet"] = std::vector<std::string>(alphabet.begin(), alphabet.end());
  doc["root"] = p.root();
  json states = json::array();
  json actions = json::array();
  json branches = json::array();
  for (std::size_t s = 0; s < p.size(); ++s) {
    const State& st = p.states()[s];
    states.push_back({{"id", s}, {"kind", st.kind == StateKind::Probabilistic ? "prob" : "nondet"}});
    for (const auto& e : st.actions) actions.push_back({{"from", s}, {"label", e.label}, {"to", e.target}});
    for (const auto& [t, w] : st.branches) {
      branches.push_back({{"from", s}, {"weight", format_rational(w)}, {"to", t}});
    }
  }
  doc["states"] = std::move(states);
  doc["actions"] = std::move(actions);
  doc["probabilistic"] = std::move(branches);
  return doc.dump(2);
}

Pts pts_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const auto& states = doc.at("states");
    std::vector<State> out(states.size());
    for (const auto& st : states) {
      const auto id = st.at("id").get<std::size_t>();
      if (id >= out.size()) throw PtsError("state id " + std::to_string(id) + " out of range");
      const auto kind = st.at("kind").get<std::string>();
      if (kind != "prob" && kind != "nondet") throw PtsError("unknown state kind '" + kind + "'");
      out[id].kind = kind == "prob" ? StateKind::Probabilistic : StateKind::Nondeterministic;
    }
    auto in_range = [&](std::size_t id) {
      if (id >= out.size()) throw PtsError("edge endpoint " + std::to_string(id) + " out of range");
      return static_cast<StateId>(id);
    };
    for (const auto& e : doc.value("actions", json::array())) {
      const StateId from = in_range(e.at("from").get<std::size_t>());
      out[from].actions.push_back({e.at("label").get<std::string>(), in_range(e.at("to").get<std::size_t>())});
    }
    for (const auto& e : doc.value("probabilistic", json::array())) {
      const StateId from = in_range(e.at("from").get<std::size_t>());
      out[from].branches[in_range(e.at("to").get<std::size_t>())] += parse_rational(e.at("weight").get<std::string>());
    }
    return Pts(std::move(out), in_range(doc.at("root").get<std::size_t>()));
  } catch (const json::exception& e) {
    throw PtsError(std::string("malformed PTS document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw PtsError(std::string("malformed PTS document: ") + e.what());
  }
}

std::string to_dot(const Pts& p, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  out << "  node [shape=circle, label=\"\", width=0.2];\n";
  for (std::size_t s = 0; s < p.size(); ++s) {
    const State& st = p.states()[s];
    out << "  s" << s;
    if (s == p.root()) out << " [xlabel=\"" << name << "\"]";
    out << ";\n";
    for (const auto& e : st.actions) {
      out << "  s" << s << " -> s" << e.target << " [label=\"" << e.label << "\"];\n";
    }
    for (const auto& [t, w] : st.branches) {
      out << "  s" << s << " -> s" << t << " [style=dashed, label=\"" << format_rational(w) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace probtest
