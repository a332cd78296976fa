#pragma once
// Experiment reports serialise to byte-identical JSON for a given config and
// seed: keys are sorted, floats round-trip, and wall-clock metadata goes to
// the sidecar log instead of the report.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace myosim {

struct CriterionLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "in" (value within [threshold, threshold2])
  double threshold2 = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;
  std::vector<CriterionLine> criteria;

  bool all_pass() const;
};

std::string render_report_json(const ExperimentReport& rep);
void write_report_json(const ExperimentReport& rep, const std::string& path);
// one line per criterion, "PASS name value relation threshold" style
std::string render_criteria_text(const ExperimentReport& rep);

}  // namespace myosim
