#pragma once

#include <string>
#include <vector>

namespace rgvi {

struct Measurement {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=" or ">="
  double threshold = 0.0;
  bool passed = false;
};

enum class CriterionStatus { passed, failed, skipped };
const char* to_string(CriterionStatus status);

struct CriterionResult {
  int id = 0;
  std::string title;
  CriterionStatus status = CriterionStatus::skipped;
  double runtime = 0.0;  // seconds
  std::vector<Measurement> measurements;
  std::vector<std::string> notes;
};

struct AcceptanceOptions {
  // Multiplies the step-quality constants before criterion 4 compares against
  // them. 2 reproduces the "gamma doubled" mutation, which must fail.
  double gamma_scale = 1.0;
  std::vector<int> only;  // criterion ids to run; empty runs all, the rest are reported as skipped
};

struct AcceptanceReport {
  double gamma_scale = 1.0;
  std::vector<CriterionResult> criteria;  // always all of them, in id order
  bool passed() const;                    // no failed criterion
  std::string to_json() const;
};

constexpr int kCriterionCount = 11;
const std::vector<std::string>& criterion_titles();

AcceptanceReport acceptance_suite(const AcceptanceOptions& options = {});

}  // namespace rgvi
