#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace illiq {

/// Non-negative weights on a finite scenario set summing to one.
class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProbabilityVector(std::vector<double> weights);

  static ProbabilityVector uniform(std::size_t n);
  static ProbabilityVector dirac(std::size_t n, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// Finite sample space. Copies share the same identity; two spaces built
/// separately never compare equal even if their labels coincide.
class ScenarioSpace {
 public:
  explicit ScenarioSpace(std::vector<std::string> labels,
                         std::optional<ProbabilityVector> probabilities = std::nullopt);

  /// Labels w0..w{n-1}; uniform probabilities when `with_uniform_probabilities`.
  static ScenarioSpace indexed(std::size_t n, bool with_uniform_probabilities = true);

  std::size_t size() const { return labels_.size(); }
  std::uint64_t id() const { return id_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_probabilities() const { return probabilities_.has_value(); }
  const std::optional<ProbabilityVector>& probabilities() const { return probabilities_; }

  friend bool operator==(const ScenarioSpace& a, const ScenarioSpace& b) { return a.id_ == b.id_; }

 private:
  std::vector<std::string> labels_;
  std::optional<ProbabilityVector> probabilities_;
  std::uint64_t id_;
};

/// A random variable on a finite space: one finite value per scenario.
class ScenarioVector {
 public:
  ScenarioVector(const ScenarioSpace& space, std::vector<double> values);
  ScenarioVector(std::uint64_t space_id, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::uint64_t space_id() const { return space_id_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Same space, new values.
  ScenarioVector with_values(std::vector<double> values) const;

 private:
  std::uint64_t space_id_;
  std::vector<double> values_;
};

void require_same_space(const ScenarioVector& a, const ScenarioVector& b);

/// E_Q[Z] = sum q_i Z_i.
double expectation(const ProbabilityVector& q, std::span<const double> z);
double expectation(const ProbabilityVector& q, const ScenarioVector& z);

double sup_norm(std::span<const double> z);
inline double sup_norm(const ScenarioVector& z) { return sup_norm(z.values()); }

ScenarioVector operator+(const ScenarioVector& a, const ScenarioVector& b);
ScenarioVector operator*(double c, const ScenarioVector& z);
ScenarioVector operator+(const ScenarioVector& z, double m);

struct GbmParams {
  double x0 = 100.0;
  double mu = 0.0;
  double sigma = 0.2;
  double horizon = 1.0;

  void validate() const;
  /// Mean of ln X_T.
  double log_mean() const { return std::log(x0) + (mu - 0.5 * sigma * sigma) * horizon; }
  double log_stddev() const { return sigma * std::sqrt(horizon); }
};

/// X_T = x0 exp((mu - sigma^2/2) T + sigma sqrt(T) W), W drawn from the
/// counter-based normal stream keyed by `seed` (draw k uses counter k).
std::pair<ScenarioSpace, ScenarioVector> sample_gbm(const GbmParams& params, std::size_t n_scenarios,
                                                    std::uint64_t seed);

enum class ScenarioFormat { csv, json };

struct ScenarioSet {
  ScenarioSpace space;
  std::vector<std::string> asset_order;
  std::map<std::string, ScenarioVector> assets;

  const ScenarioVector& asset(const std::string& name) const;
};

ScenarioSet load_scenarios(const std::filesystem::path& path, ScenarioFormat format);
ScenarioSet parse_scenarios_csv(const std::string& text);
ScenarioSet parse_scenarios_json(const std::string& text);

}  // namespace illiq
