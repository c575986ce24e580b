#include "illiq/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "illiq/errors.hpp"
#include "illiq/kernels.hpp"

namespace illiq {

namespace {

std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteInput(std::string(what) + " has a non-finite entry at index " + std::to_string(i));
    }
  }
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column + "': not a number: '" + field + "'");
  }
  return v;
}

ScenarioSet assemble(std::vector<std::string> labels, std::optional<std::vector<double>> probs,
                     std::vector<std::string> names, std::vector<std::vector<double>> columns) {
  std::optional<ProbabilityVector> p;
  if (probs) p.emplace(std::move(*probs));
  ScenarioSet set{ScenarioSpace(std::move(labels), std::move(p)), names, {}};
  for (std::size_t k = 0; k < names.size(); ++k) {
    set.assets.emplace(names[k], ScenarioVector(set.space, std::move(columns[k])));
  }
  return set;
}

}  // namespace

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ProbabilityError("empty probability vector");
  // Neumaier summation: a naive sum of 10^6 equal weights drifts past 1e-12.
  double sum = 0.0;
  double carry = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw ProbabilityError("negative or non-finite weight");
    const double t = sum + w;
    carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
    sum = t;
  }
  sum += carry;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << sum << ", not 1";
    throw ProbabilityError(os.str());
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  if (n == 0) throw ProbabilityError("empty probability vector");
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::dirac(std::size_t n, std::size_t at) {
  std::vector<double> w(n, 0.0);
  w.at(at) = 1.0;
  return ProbabilityVector(std::move(w));
}

ScenarioSpace::ScenarioSpace(std::vector<std::string> labels, std::optional<ProbabilityVector> probabilities)
    : labels_(std::move(labels)), probabilities_(std::move(probabilities)), id_(next_space_id()) {
  if (labels_.empty()) throw InvalidParams("scenario space needs at least one scenario");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw InvalidParams("scenario labels are not unique");
  if (probabilities_ && probabilities_->size() != labels_.size()) {
    throw ProbabilityError("probability vector length does not match the number of scenarios");
  }
}

ScenarioSpace ScenarioSpace::indexed(std::size_t n, bool with_uniform_probabilities) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("w" + std::to_string(i));
  std::optional<ProbabilityVector> p;
  if (with_uniform_probabilities && n > 0) p = ProbabilityVector::uniform(n);
  return ScenarioSpace(std::move(labels), std::move(p));
}

ScenarioVector::ScenarioVector(const ScenarioSpace& space, std::vector<double> values)
    : ScenarioVector(space.id(), std::move(values)) {
  if (values_.size() != space.size()) throw SpaceMismatch("vector length does not match its scenario space");
}

ScenarioVector::ScenarioVector(std::uint64_t space_id, std::vector<double> values)
    : space_id_(space_id), values_(std::move(values)) {
  require_finite(values_, "scenario vector");
}

ScenarioVector ScenarioVector::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw SpaceMismatch("replacement values have the wrong length");
  return ScenarioVector(space_id_, std::move(values));
}

void require_same_space(const ScenarioVector& a, const ScenarioVector& b) {
  if (a.space_id() != b.space_id() || a.size() != b.size()) {
    throw SpaceMismatch("scenario vectors live on different spaces");
  }
}

double expectation(const ProbabilityVector& q, std::span<const double> z) {
  if (q.size() != z.size()) throw SpaceMismatch("probability vector and values differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += q[i] * z[i];
  return s;
}

double expectation(const ProbabilityVector& q, const ScenarioVector& z) { return expectation(q, z.values()); }

double sup_norm(std::span<const double> z) {
  double m = 0.0;
  for (double v : z) m = std::max(m, std::abs(v));
  return m;
}

ScenarioVector operator+(const ScenarioVector& a, const ScenarioVector& b) {
  require_same_space(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return a.with_values(std::move(v));
}

ScenarioVector operator*(double c, const ScenarioVector& z) {
  std::vector<double> v(z.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * z[i];
  return z.with_values(std::move(v));
}

ScenarioVector operator+(const ScenarioVector& z, double m) {
  std::vector<double> v(z.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = z[i] + m;
  return z.with_values(std::move(v));
}

void GbmParams::validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw InvalidParams("x0 must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParams("sigma must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParams("horizon T must be positive");
  if (!std::isfinite(mu)) throw InvalidParams("mu must be finite");
}

std::pair<ScenarioSpace, ScenarioVector> sample_gbm(const GbmParams& params, std::size_t n_scenarios,
                                                    std::uint64_t seed) {
  params.validate();
  if (n_scenarios == 0) throw InvalidParams("n_scenarios must be at least 1");
  std::vector<double> w(n_scenarios);
  parallel::standard_normals(seed, 0, w);
  const double m = params.log_mean();
  const double s = params.log_stddev();
  parallel::for_each_index(n_scenarios, [&](std::size_t k) { w[k] = std::exp(m + s * w[k]); });
  ScenarioSpace space = ScenarioSpace::indexed(n_scenarios, true);
  ScenarioVector x(space, std::move(w));
  return {std::move(space), std::move(x)};
}

const ScenarioVector& ScenarioSet::asset(const std::string& name) const {
  auto it = assets.find(name);
  if (it == assets.end()) throw InvalidParams("unknown asset '" + name + "'");
  return it->second;
}

ScenarioSet parse_scenarios_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty() || header[0] != "scenario") throw ParseError("header must start with 'scenario'");
  const bool has_prob = header.size() > 1 && header[1] == "prob";
  const std::size_t first_asset = has_prob ? 2 : 1;
  if (header.size() <= first_asset) throw ParseError("no asset columns");
  std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first_asset), header.end());
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size() || unique.count("")) throw ParseError("asset names must be unique and non-empty");

  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<std::vector<double>> columns(names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    labels.push_back(fields[0]);
    if (has_prob) probs.push_back(parse_number(fields[1], row, "prob"));
    for (std::size_t k = 0; k < names.size(); ++k) {
      columns[k].push_back(parse_number(fields[first_asset + k], row, names[k]));
    }
  }
  if (labels.empty()) throw ParseError("no scenario rows");
  std::optional<std::vector<double>> p;
  if (has_prob) p = std::move(probs);
  return assemble(std::move(labels), std::move(p), std::move(names), std::move(columns));
}

ScenarioSet parse_scenarios_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  try {
    if (!doc.contains("assets") || !doc["assets"].is_object() || doc["assets"].empty()) {
      throw ParseError("missing 'assets' object");
    }
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    for (auto& [name, values] : doc["assets"].items()) {
      names.push_back(name);
      columns.push_back(values.get<std::vector<double>>());
    }
    const std::size_t n = columns.front().size();
    for (const auto& c : columns) {
      if (c.size() != n) throw ParseError("asset columns differ in length");
    }
    std::vector<std::string> labels;
    if (doc.contains("labels")) {
      labels = doc["labels"].get<std::vector<std::string>>();
      if (labels.size() != n) throw ParseError("label count does not match asset length");
    } else {
      for (std::size_t i = 0; i < n; ++i) labels.push_back("w" + std::to_string(i));
    }
    std::optional<std::vector<double>> p;
    if (doc.contains("probabilities")) p = doc["probabilities"].get<std::vector<double>>();
    return assemble(std::move(labels), std::move(p), std::move(names), std::move(columns));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

ScenarioSet load_scenarios(const std::filesystem::path& path, ScenarioFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return format == ScenarioFormat::csv ? parse_scenarios_csv(buf.str()) : parse_scenarios_json(buf.str());
}

}  // namespace illiq
