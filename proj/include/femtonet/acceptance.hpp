#pragma once
// The shipped validation suite: every release gate in one place, shared by
// the `validate_all` experiment and the standalone gate binary.

#include <cstdint>
#include <string>
#include <vector>

namespace femtonet {
namespace acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values and the gate they were held to
};

// Runs all validation criteria with the given master seed. Deterministic.
std::vector<CriterionResult> run_all(std::uint64_t seed);

std::string report_json(const std::vector<CriterionResult>& results);

}  // namespace acceptance
}  // namespace femtonet
