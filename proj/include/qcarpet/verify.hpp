#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qcarpet {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json measured;
  nlohmann::json expected;
  std::string detail;
};

struct VerifyOptions {
  unsigned jobs = 0;
  // Multiplies the recurrence time used by the revival checks. Anything other
  // than 1 is a deliberate fault for negative-control runs.
  double tau_scale = 1.0;
  // Criterion ids to run; empty runs all of them.
  std::vector<int> only;
};

// Runs the acceptance checks (ids 1..13) at their reference parameters.
std::vector<CheckResult> run_acceptance(const VerifyOptions& options = {});

nlohmann::json to_json(const CheckResult& check);

}  // namespace qcarpet
