#include "illiq/report.hpp"

#include <algorithm>

namespace illiq {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::pass:
      return "pass";
    case Classification::expected_fail:
      return "expected-fail";
    case Classification::fail:
      return "fail";
  }
  return "fail";
}

void AxiomReport::record(std::string where, double lhs, double rhs, double excess) {
  ++violation_count;
  worst_excess = std::max(worst_excess, excess);
  if (violations.size() < kMaxRecorded) violations.push_back({std::move(where), lhs, rhs});
}

Classification AxiomReport::classification() const {
  if (violation_count == 0) return Classification::pass;
  return expected_to_fail ? Classification::expected_fail : Classification::fail;
}

nlohmann::json to_json(const AxiomReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : report.violations) v.push_back({{"at", x.where}, {"lhs", x.lhs}, {"rhs", x.rhs}});
  return {{"axiom", report.axiom},
          {"pairs_tested", report.pairs_tested},
          {"violations", std::move(v)},
          {"violation_count", report.violation_count},
          {"worst_excess", report.worst_excess},
          {"classification", to_string(report.classification())}};
}

nlohmann::json to_json(const std::vector<AxiomReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

bool any_unexpected_failure(const std::vector<AxiomReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const AxiomReport& r) { return r.classification() == Classification::fail; });
}

}  // namespace illiq
