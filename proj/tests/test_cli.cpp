#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

namespace {

struct Run {
  int status;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

// Runs the command-line tool with stderr merged into the captured output.
Run cli(std::initializer_list<std::string> args) {
  std::string cmd = quote(PROBTEST_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

bool has(const Run& r, const std::string& needle) { return r.out.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("res prints the symbolic success probability") {
    const Run r = cli({"res", "p{1/2: h->p [] t, 1/2: h [] t->p}", "h->p->w [] t->w"});
    CHECK(r.status == 0);
    CHECK(r.out == "(h + 2*t) / (2*h + 2*t)\n");
  }

  TEST_CASE("equiv exit codes") {
    CHECK(cli({"equiv", "0", "0"}).status == 0);
    const Run r = cli({"equiv", "p{1/2: a [] b->c, 1/2: b->d [] e}", "p{1/2: a [] b->d, 1/2: b->c [] e}"});
    CHECK(r.status == 1);
    CHECK(has(r, "{a,b} -b-> {c}: 1 vs 0"));
    const Run t = cli({"equiv", "--method", "testing", "p{1/2: a [] b->c, 1/2: b->d [] e}",
                       "p{1/2: a [] b->d, 1/2: b->c [] e}"});
    CHECK(t.status == 1);
    CHECK(has(t, "a->w [] b->c->w"));
    const Run j = cli({"equiv", "--json", "a", "a"});
    CHECK(j.status == 0);
    CHECK(has(j, "\"equivalent\": true"));
  }

  TEST_CASE("input errors exit with status 2") {
    const Run r = cli({"equiv", "a->(b", "0"});
    CHECK(r.status == 2);
    CHECK(has(r, "line 1, column"));
    CHECK(cli({"equiv", "a"}).status == 2);
    CHECK(cli({"equiv", "--bogus", "a", "a"}).status == 2);
    CHECK(cli({"res", "a", "@/nonexistent/file"}).status == 2);
    CHECK(cli({"trace-prob", "a", "--trace", "{a} -b-> {}"}).status == 2);
  }

  TEST_CASE("trace probabilities") {
    const Run r = cli({"trace-prob", "p{1/2: h->p [] t, 1/2: h [] t->p}", "--trace", "{h,t} -h-> {p}"});
    CHECK(r.status == 0);
    CHECK(r.out == "1/2\n");
    CHECK(cli({"trace-prob", "a", "--trace", "{b} -b-> {}"}).out == "undefined\n");
  }

  TEST_CASE("distinguish prints a verified test") {
    const Run r = cli({"distinguish", "p{1/2: a, 1/2: b}", "a [] b"});
    CHECK(r.status == 1);
    CHECK(r.out.starts_with("b->w\n"));
    CHECK(has(r, "P: 1/2"));
    CHECK(cli({"distinguish", "a", "a"}).status == 0);
  }

  TEST_CASE("compile and file inputs") {
    const Run dot = cli({"compile", "--dot", "p{1/2: a, 1/2: b}"});
    CHECK(dot.status == 0);
    CHECK(has(dot, "style=dashed"));

    const auto dir = std::filesystem::temp_directory_path() / "probtest_cli_test";
    std::filesystem::create_directories(dir);
    const auto json_path = dir / "s.json";
    const auto term_path = dir / "s.csp";
    const Run json = cli({"compile", "p{1/2: h->p [] t, 1/2: h [] t->p}"});
    REQUIRE(json.status == 0);
    std::ofstream(json_path) << json.out;
    std::ofstream(term_path) << "h->p{1/2: p, 1/2: 0}\n  [] t->p{1/2: 0, 1/2: p}\n";
    CHECK(cli({"equiv", "@" + json_path.string(), "@" + term_path.string()}).status == 0);

    const auto prio_path = dir / "order.txt";
    std::ofstream(prio_path) << "a > b\n";
    CHECK(cli({"equiv", "--prio", prio_path.string(), "prio(a [] b)", "a"}).status == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("lint warnings go to stderr") {
    const Run r = cli({"compile", "a->b |[]| b->c |[]| a->c"});
    CHECK(r.status == 0);
    CHECK(has(r, "warning"));
  }

  TEST_CASE("oracle runs the suites") {
    const Run r = cli({"oracle", "--seed", "3", "--samples", "10"});
    CHECK(r.status == 0);
    CHECK(has(r, "\"ok\": true"));
    CHECK(cli({"oracle", "--alphabet", "9"}).status == 2);
  }
}
