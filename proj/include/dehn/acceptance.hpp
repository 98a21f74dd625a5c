#pragma once

// Acceptance criteria at smoke and desk scale.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dehn {

enum class SuiteLevel { Smoke, Desk };

SuiteLevel parse_suite_level(const std::string& s);
const char* to_string(SuiteLevel level);

struct CriterionResult {
  std::string id;  // "1".."9", or "axioms"
  std::string title;
  bool pass = false;
  std::vector<std::string> checks;  // one entry per sub-check, prefixed ok/FAIL
  double seconds = 0;
  double time_limit = 0;
};

struct SuiteOptions {
  SuiteLevel level = SuiteLevel::Smoke;
  std::uint64_t seed = 1;
  int workers = 0;
  std::vector<std::string> only;  // empty: every criterion of the level
};

/// Runs the criteria in order, calling `report` after each one.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt,
                                       const std::function<void(const CriterionResult&)>& report = {});

/// One line: "PASS|FAIL criterion <id> <title> (<seconds> s)".
std::string summary_line(const CriterionResult& r);

}  // namespace dehn
