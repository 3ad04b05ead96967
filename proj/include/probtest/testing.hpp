#pragma once

// Testing semantics: the symbolic result of running a test against a
// process, bounded testing equivalence and distinguishing-test synthesis.

#include <optional>
#include <string>
#include <vector>

#include "probtest/cspp.hpp"
#include "probtest/polyfn.hpp"
#include "probtest/pts.hpp"

namespace probtest {

/// Res(s, T) for the roots of both graphs. The test may contain omega edges.
RationalFn res(const Pts& process, const Pts& test);

/// Every nonprobabilistic test over `alphabet` of action depth <= depth in
/// which omega is reachable: `w`, or an external choice over distinct labels
/// whose branches are themselves such tests. Ordered by depth, then size,
/// then rendering.
std::vector<TermPtr> enumerate_tests(const Menu& alphabet, std::size_t depth);

struct TestVerdict {
  bool equivalent = true;
  std::size_t depth = 0;
  std::size_t tests_run = 0;
  TermPtr test;
  std::optional<RationalFn> left;
  std::optional<RationalFn> right;
};

/// Max action depth of the two processes plus one.
std::size_t default_test_depth(const Pts& s, const Pts& t);

/// Runs every relevant test up to `depth` and stops at the first one on which
/// the results differ. Branches for actions that neither process can offer
/// at that point are skipped; they never change a result.
TestVerdict testing_equiv_bounded(const Pts& s, const Pts& t, std::optional<std::size_t> depth = std::nullopt);

/// A nonprobabilistic test on which s and t give different results, built
/// recursively from a distinguishing ready trace and verified by res.
/// nullopt when the processes are ready-trace equivalent.
std::optional<TermPtr> synthesize_distinguishing_test(const Pts& s, const Pts& t);

std::string to_string(const TestVerdict& v);
std::string to_json(const TestVerdict& v);

}  // namespace probtest
