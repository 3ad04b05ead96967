// probtest: command-line front end.
//
// Processes are given inline in concrete syntax or as @file (a .json file is
// read as a serialised transition system, anything else as a term).
// Exit status: 0 equivalent/success, 1 distinguished, 2 input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "probtest/cspp.hpp"
#include "probtest/harness.hpp"
#include "probtest/readytrace.hpp"
#include "probtest/testing.hpp"

namespace {

using namespace probtest;

constexpr int kEquivalent = 0;
constexpr int kDistinguished = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Pts load(const std::string& arg, bool test, const PriorityOrder& order) {
  std::string text = arg;
  if (!arg.empty() && arg.front() == '@') {
    const std::string path = arg.substr(1);
    text = read_file(path);
    if (ends_with(path, ".json")) return pts_from_json(text);
  }
  const TermPtr term = test ? parse_test(text) : parse_process(text);
  for (const auto& w : lint(term)) std::cerr << w << '\n';
  return compile(term, order);
}

PriorityOrder load_priority(const std::string& path) {
  if (path.empty()) return {};
  return PriorityOrder::parse(read_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Testing and ready-trace equivalence of reactive probabilistic processes"};
  app.require_subcommand(1);

  std::string left;
  std::string right;
  std::string prio_file;
  bool as_json = false;

  auto* equiv = app.add_subcommand("equiv", "Decide whether two processes are equivalent");
  std::string method = "ready-trace";
  std::optional<std::size_t> depth;
  equiv->add_option("P", left, "first process")->required();
  equiv->add_option("Q", right, "second process")->required();
  equiv->add_option("--method", method, "ready-trace (complete) or testing (bounded)")
      ->check(CLI::IsMember({"ready-trace", "testing"}));
  equiv->add_option("--depth", depth, "test depth bound for --method testing");
  equiv->add_option("--prio", prio_file, "priority order file, lines 'a > b'");
  equiv->add_flag("--json", as_json, "machine-readable verdict");

  auto* res_cmd = app.add_subcommand("res", "Symbolic result of running test T against process P");
  res_cmd->add_option("P", left, "process")->required();
  res_cmd->add_option("T", right, "test (w marks success)")->required();
  res_cmd->add_option("--prio", prio_file, "priority order file");

  auto* trace_cmd = app.add_subcommand("trace-prob", "Conditional probability of a ready trace");
  std::string trace_text;
  trace_cmd->add_option("P", left, "process")->required();
  trace_cmd->add_option("--trace", trace_text, "trace such as '{a,b} -b-> {c}'")->required();
  trace_cmd->add_option("--prio", prio_file, "priority order file");

  auto* dist_cmd = app.add_subcommand("distinguish", "Synthesise a test telling two processes apart");
  dist_cmd->add_option("P", left, "first process")->required();
  dist_cmd->add_option("Q", right, "second process")->required();
  dist_cmd->add_option("--prio", prio_file, "priority order file");

  auto* compile_cmd = app.add_subcommand("compile", "Emit the transition system of a process");
  bool as_dot = false;
  compile_cmd->add_option("P", left, "process")->required();
  auto* dot_flag = compile_cmd->add_flag("--dot", as_dot, "Graphviz output");
  compile_cmd->add_flag("--json", as_json, "JSON output (default)")->excludes(dot_flag);
  compile_cmd->add_option("--prio", prio_file, "priority order file");

  auto* oracle_cmd = app.add_subcommand("oracle", "Run the randomised property suites");
  GenConfig cfg;
  std::size_t samples = 200;
  oracle_cmd->add_option("--seed", cfg.seed, "base seed");
  oracle_cmd->add_option("--samples", samples, "samples per property");
  oracle_cmd->add_option("--alphabet", cfg.alphabet_size, "alphabet size (<= 4)");
  oracle_cmd->add_option("--max-depth", cfg.max_depth, "term depth (<= 4)");
  oracle_cmd->add_option("--branching", cfg.max_branching, "choice width (<= 3)");
  oracle_cmd->add_option("--denominator", cfg.max_denominator, "largest weight denominator (<= 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    const PriorityOrder order = load_priority(prio_file);

    if (*equiv) {
      const Pts p = load(left, false, order);
      const Pts q = load(right, false, order);
      if (method == "testing") {
        const TestVerdict v = testing_equiv_bounded(p, q, depth);
        std::cout << (as_json ? to_json(v) : to_string(v)) << '\n';
        return v.equivalent ? kEquivalent : kDistinguished;
      }
      const TraceVerdict v = ready_trace_equiv(p, q);
      std::cout << (as_json ? to_json(v) : to_string(v)) << '\n';
      return v.equivalent ? kEquivalent : kDistinguished;
    }

    if (*res_cmd) {
      std::cout << to_string(res(load(left, false, order), load(right, true, order))) << '\n';
      return kEquivalent;
    }

    if (*trace_cmd) {
      const auto value = pn(load(left, false, order), parse_trace(trace_text));
      std::cout << (value ? format_rational(*value) : "undefined") << '\n';
      return kEquivalent;
    }

    if (*dist_cmd) {
      const Pts p = load(left, false, order);
      const Pts q = load(right, false, order);
      const auto test = synthesize_distinguishing_test(p, q);
      if (!test) {
        std::cout << "not distinguishable\n";
        return kEquivalent;
      }
      const Pts t = compile(*test);
      std::cout << to_string(*test) << '\n'
                << "  P: " << to_string(res(p, t)) << '\n'
                << "  Q: " << to_string(res(q, t)) << '\n';
      return kDistinguished;
    }

    if (*compile_cmd) {
      const Pts p = load(left, false, order);
      std::cout << (as_dot ? to_dot(p, "P") : to_json(p) + "\n");
      return kEquivalent;
    }

    if (*oracle_cmd) {
      cfg.validate();
      const HarnessReport report = run_all(cfg, samples);
      std::cout << to_json(report) << '\n';
      return report.ok() ? kEquivalent : kDistinguished;
    }
  } catch (const CyclicInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
