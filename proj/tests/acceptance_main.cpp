// Acceptance runner: one pass/fail line per criterion, nonzero exit on any
// failure. The same checks back the CLI's `verify all`.
#include <chrono>
#include <cstdio>

#include "mgt/acceptance.hpp"

int main() {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto results = mgt::acceptance::run_all();
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s (%s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  double secs = std::chrono::duration<double>(clock::now() - start).count();
  std::printf("%s: %zu criteria in %.1f s\n", all ? "ALL PASS" : "FAILURES", results.size(), secs);
  return all ? 0 : 1;
}
