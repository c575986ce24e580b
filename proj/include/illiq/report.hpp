#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace illiq {

enum class Classification { pass, expected_fail, fail };

std::string to_string(Classification c);

struct Violation {
  std::string where;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome of one property checked over many sampled inputs.
struct AxiomReport {
  static constexpr std::size_t kMaxRecorded = 50;

  AxiomReport() = default;
  explicit AxiomReport(std::string name) : axiom(std::move(name)) {}

  std::string axiom;
  std::size_t pairs_tested = 0;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // first kMaxRecorded only
  bool expected_to_fail = false;
  /// Largest amount by which the property was missed (0 when never missed).
  double worst_excess = 0.0;

  void record(std::string where, double lhs, double rhs, double excess);
  Classification classification() const;
  bool passed() const { return violation_count == 0; }
};

nlohmann::json to_json(const AxiomReport& report);
nlohmann::json to_json(const std::vector<AxiomReport>& reports);

/// True if any report is classified as an unexpected failure.
bool any_unexpected_failure(const std::vector<AxiomReport>& reports);

}  // namespace illiq
