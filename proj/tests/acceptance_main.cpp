// Acceptance suite: one line per criterion, nonzero exit if any fails.
//   acceptance              all criteria, report in acceptance_report.json
//   acceptance --mutation   criterion 4 with the step-quality constant doubled;
//                           succeeds only if the criterion catches it
#include <cstdio>
#include <cstring>
#include <fstream>

#include "rgvi/acceptance.hpp"

int main(int argc, char** argv) {
  const bool mutation = argc > 1 && std::strcmp(argv[1], "--mutation") == 0;
  rgvi::AcceptanceOptions opts;
  if (mutation) {
    opts.gamma_scale = 2.0;
    opts.only = {4};
  }
  const rgvi::AcceptanceReport report = rgvi::acceptance_suite(opts);
  for (const auto& c : report.criteria) {
    if (mutation && c.id != 4) continue;
    std::printf("%-4s criterion %2d: %s (%.2f s)\n", c.status == rgvi::CriterionStatus::passed ? "PASS" : "FAIL",
                c.id, c.title.c_str(), c.runtime);
    for (const auto& m : c.measurements)
      if (!m.passed) std::printf("       %s = %.6g, need %s %.6g\n", m.name.c_str(), m.value, m.relation.c_str(), m.threshold);
    for (const auto& n : c.notes) std::printf("       note: %s\n", n.c_str());
  }
  if (mutation) {
    const bool caught = report.criteria[3].status == rgvi::CriterionStatus::failed;
    std::printf("mutation (gamma x2) %s\n", caught ? "detected" : "NOT detected");
    return caught ? 0 : 1;
  }
  std::ofstream("acceptance_report.json") << report.to_json() << "\n";
  return report.passed() ? 0 : 1;
}
