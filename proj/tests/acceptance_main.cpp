// Release gate: runs every validation criterion and prints one line per
// result. Exits 3 if any criterion fails.

#include <cstdio>

#include "femtonet/acceptance.hpp"

int main() {
  const auto results = femtonet::acceptance::run_all(42);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("criterion %02d [%s] %s: %s\n", r.id,
                r.pass ? "pass" : "FAIL", r.name.c_str(), r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("passed %d/%d\n", static_cast<int>(results.size()) - failures,
              static_cast<int>(results.size()));
  return failures == 0 ? 0 : 3;
}
