#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mgt::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // worst residuals etc., human readable
};

// Runs the full verification suite on the built-in fixtures.
std::vector<CriterionResult> run_all();

nlohmann::ordered_json report_json(const std::vector<CriterionResult>& results);

}  // namespace mgt::acceptance
