#include "myosim/report.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace myosim {

bool ExperimentReport::all_pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return true;
}

std::string render_report_json(const ExperimentReport& rep) {
  nlohmann::json j;  // std::map keys arrive sorted; object order is stable
  j["name"] = rep.name;
  j["seed"] = rep.seed;
  j["config_hash"] = rep.config_hash;
  j["scalars"] = rep.scalars;
  j["series"] = rep.series;
  nlohmann::json crits = nlohmann::json::array();
  for (const auto& c : rep.criteria) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    jc["relation"] = c.relation;
    if (c.relation == "in") jc["threshold2"] = c.threshold2;
    jc["pass"] = c.pass;
    crits.push_back(jc);
  }
  j["criteria"] = crits;
  return j.dump(2) + "\n";
}

void write_report_json(const ExperimentReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << render_report_json(rep);
}

std::string render_criteria_text(const ExperimentReport& rep) {
  std::string out;
  char buf[256];
  for (const auto& c : rep.criteria) {
    if (c.relation == "in") {
      std::snprintf(buf, sizeof buf, "%s %s: value %.6g in [%.6g, %.6g]\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.threshold, c.threshold2);
    } else {
      std::snprintf(buf, sizeof buf, "%s %s: value %.6g %s %.6g\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.relation.c_str(), c.threshold);
    }
    out += buf;
  }
  return out;
}

}  // namespace myosim
