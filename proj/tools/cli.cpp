#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "illiq/duality.hpp"
#include "illiq/errors.hpp"
#include "illiq/impact.hpp"
#include "illiq/kernels.hpp"
#include "illiq/measures.hpp"
#include "illiq/riskmeasure.hpp"
#include "illiq/scenario.hpp"

namespace illiq::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config --

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(fmt::format("missing field '{}{}'", path, key));
  return obj.at(key);
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("field '{}{}' has the wrong type", path, key));
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return get<T>(obj, key, path);
}

std::uint64_t require_seed(const json& config, const std::string& why) {
  if (!config.contains("seed")) throw ConfigError(fmt::format("missing field 'seed' (required: {})", why));
  return get<std::uint64_t>(config, "seed", "");
}

struct Scenarios {
  std::optional<ScenarioSet> set;
  std::optional<ProbabilityVector> p;
  bool stochastic = false;
};

Scenarios load_source(const json& config, const std::string& config_dir) {
  const json& src = require(config, "scenarios", "");
  const int sources = static_cast<int>(src.contains("file")) + static_cast<int>(src.contains("gbm")) +
                      static_cast<int>(src.contains("inline"));
  if (sources != 1) throw ConfigError("'scenarios' needs exactly one of 'file', 'gbm', 'inline'");
  Scenarios out;
  if (src.contains("file")) {
    fs::path path = get<std::string>(src, "file", "scenarios.");
    if (path.is_relative()) path = fs::path(config_dir) / path;
    std::string fmt_name = get_or<std::string>(src, "format", path.extension() == ".json" ? "json" : "csv",
                                               "scenarios.");
    if (fmt_name != "csv" && fmt_name != "json") throw ConfigError("scenarios.format must be csv or json");
    out.set = load_scenarios(path, fmt_name == "csv" ? ScenarioFormat::csv : ScenarioFormat::json);
  } else if (src.contains("inline")) {
    out.set = parse_scenarios_json(src.at("inline").dump());
  } else {
    const json& g = src.at("gbm");
    GbmParams params;
    params.x0 = get_or<double>(g, "x0", params.x0, "scenarios.gbm.");
    params.mu = get_or<double>(g, "mu", params.mu, "scenarios.gbm.");
    params.sigma = get_or<double>(g, "sigma", params.sigma, "scenarios.gbm.");
    params.horizon = get_or<double>(g, "T", params.horizon, "scenarios.gbm.");
    const auto n = get<std::size_t>(g, "n", "scenarios.gbm.");
    const auto name = get_or<std::string>(g, "asset", "x_tilde", "scenarios.gbm.");
    auto [space, x] = sample_gbm(params, n, require_seed(config, "GBM scenarios"));
    ScenarioSet set{space, {name}, {}};
    set.assets.emplace(name, std::move(x));
    out.set = std::move(set);
    out.stochastic = true;
  }
  const auto mode = get_or<std::string>(config, "probability", "scenarios", "");
  if (mode == "scenarios") {
    out.p = out.set->space.probabilities();
  } else if (mode == "uniform") {
    out.p = ProbabilityVector::uniform(out.set->space.size());
  } else if (mode != "none") {
    throw ConfigError("probability must be 'scenarios', 'uniform' or 'none'");
  }
  return out;
}

const ScenarioVector& pick_asset(const Scenarios& s, const json& config) {
  const std::string name = get_or<std::string>(config, "asset", s.set->asset_order.front(), "");
  if (!s.set->assets.count(name)) throw ConfigError(fmt::format("field 'asset' names unknown asset '{}'", name));
  return s.set->assets.at(name);
}

ShapeFunction parse_shape(const json& block, bool multiplicative, const std::string& path) {
  const auto shape = get_or<std::string>(block, "shape", "sqrt", path);
  const auto c = get<double>(block, "c", path);
  if (shape == "sqrt") return multiplicative ? ShapeFunction::multiplicative_sqrt(c) : ShapeFunction::additive_sqrt(c);
  if (shape == "linear") {
    return multiplicative ? ShapeFunction::multiplicative_linear(c) : ShapeFunction::additive_linear(c);
  }
  throw ConfigError(fmt::format("field '{}shape' must be 'sqrt' or 'linear'", path));
}

ImpactModel parse_impact(const json& block, const Scenarios& s, const ScenarioVector& x, const std::string& path) {
  const auto kind = get<std::string>(block, "kind", path);
  if (kind == "linear") return LinearAdditive{get<double>(block, "a", path)};
  if (kind == "stochastic_slope") {
    if (block.contains("m_asset")) {
      const auto name = get<std::string>(block, "m_asset", path);
      if (!s.set->assets.count(name)) throw ConfigError(fmt::format("field '{}m_asset' names unknown asset", path));
      return StochasticSlope{s.set->assets.at(name)};
    }
    auto m = get<std::vector<double>>(block, "m", path);
    if (m.size() != x.size()) throw ConfigError(fmt::format("field '{}m' must have one entry per scenario", path));
    return StochasticSlope{x.with_values(std::move(m))};
  }
  if (kind == "sign_linear") return SignLinear{get<double>(block, "theta", path), get<double>(block, "eta", path)};
  if (kind == "power_law") return PowerLaw{get<double>(block, "gamma", path), get<double>(block, "alpha", path)};
  if (kind == "exp_multiplicative") {
    return ExponentialMultiplicative{get<double>(block, "a", path), get_or<double>(block, "T", 1.0, path)};
  }
  if (kind == "separable_additive") return SeparableAdditive{parse_shape(block, false, path)};
  if (kind == "separable_multiplicative") return SeparableMultiplicative{parse_shape(block, true, path)};
  throw ConfigError(fmt::format("field '{}kind' has unknown value '{}'", path, kind));
}

SupplyCurve parse_curve(const json& config, const std::string& path) {
  if (!config.contains("x0")) return {};
  const json& c = config.at("x0");
  return {get<double>(c, "base", path + "x0."), get_or<double>(c, "slope", 0.0, path + "x0.")};
}

RiskFunctional parse_rho(const json& config) {
  const json& r = require(config, "rho", "");
  const auto kind = get<std::string>(r, "kind", "rho.");
  RiskFunctional f;
  if (kind == "worst_case") {
    f = WorstCase{};
  } else if (kind == "var") {
    f = ValueAtRisk{get<double>(r, "delta", "rho.")};
  } else if (kind == "avar") {
    f = AverageValueAtRisk{get<double>(r, "delta", "rho.")};
  } else if (kind == "entropic") {
    f = Entropic{get<double>(r, "lambda", "rho.")};
  } else {
    throw ConfigError(fmt::format("field 'rho.kind' has unknown value '{}'", kind));
  }
  try {
    validate(f);
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  return f;
}

Quadrature parse_quadrature(const json& config) {
  Quadrature q;
  if (!config.contains("quadrature")) return q;
  const json& b = config.at("quadrature");
  const auto method = get_or<std::string>(b, "method", "auto", "quadrature.");
  if (method == "auto") {
    q.method = Quadrature::Method::automatic;
  } else if (method == "closed_form") {
    q.method = Quadrature::Method::closed_form;
  } else if (method == "romberg") {
    q.method = Quadrature::Method::romberg;
  } else if (method == "trapezoid") {
    q.method = Quadrature::Method::fixed;
  } else {
    throw ConfigError("field 'quadrature.method' must be auto, closed_form, romberg or trapezoid");
  }
  q.rel_tol = get_or<double>(b, "rel_tol", q.rel_tol, "quadrature.");
  q.max_steps = get_or<std::size_t>(b, "steps", q.max_steps, "quadrature.");
  return q;
}

std::vector<double> parse_grid(const json& g, const std::string& path) {
  try {
    if (g.is_array()) return g.get<std::vector<double>>();
    if (g.is_object()) {
      const auto from = get<double>(g, "from", path + ".");
      const auto to = get<double>(g, "to", path + ".");
      const auto count = get<std::size_t>(g, "count", path + ".");
      if (count == 1) return {from};
      if (count < 1 || !(to > from)) throw ConfigError(fmt::format("field '{}' needs count >= 1 and from < to", path));
      return linspace(from, to, count);
    }
  } catch (const json::exception&) {
  }
  throw ConfigError(fmt::format("field '{}' must be a list or {{from,to,count}}", path));
}

enum class MeasureKind { beta, beta_split, delta_short };

MeasureKind parse_measure(const json& config) {
  const auto m = get_or<std::string>(config, "measure", "beta", "");
  if (m == "beta") return MeasureKind::beta;
  if (m == "beta_split") return MeasureKind::beta_split;
  if (m == "delta_short") return MeasureKind::delta_short;
  throw ConfigError("field 'measure' must be beta, beta_split or delta_short");
}

struct Context {
  Scenarios scen;
  ScenarioVector x;
  ImpactModel model;
  SupplyCurve curve;
  RiskFunctional rho_fn;
  Quadrature quadrature;
};

Context load_single(const json& config, const std::string& config_dir) {
  Scenarios s = load_source(config, config_dir);
  const ScenarioVector& x = pick_asset(s, config);
  ImpactModel model = parse_impact(require(config, "impact", ""), s, x, "impact.");
  RiskFunctional f = parse_rho(config);
  return {std::move(s), x, std::move(model), parse_curve(config, ""), f, parse_quadrature(config)};
}

// ---------------------------------------------------------------- output --

using Cell = std::variant<std::monostate, double, std::string>;

struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (is_sentinel(v) || std::isinf(v)) return v < 0 ? "-inf" : "inf";
    return fmt::format("{}", v);
  }
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

json cell_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (is_sentinel(v) || std::isinf(v)) return v < 0 ? "-inf" : "inf";
    return v;
  }
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

std::string render_csv(const OutputTable& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + cell_text(row[k]);
    out += '\n';
  }
  return out;
}

json table_json(const OutputTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t k = 0; k < row.size(); ++k) r[t.columns[k]] = cell_json(row[k]);
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << text;
}

void emit_table(const OutputTable& t, const std::string& path, const std::string& format, json extra = nullptr) {
  if (format == "json") {
    json doc = table_json(t);
    if (!extra.is_null()) doc["report"] = std::move(extra);
    emit(doc.dump(2) + "\n", path);
  } else {
    emit(render_csv(t), path);
  }
}

// -------------------------------------------------------------- commands --

int cmd_beta(const json& config, const std::string& dir, const std::string& out, const std::string& format) {
  Context c = load_single(config, dir);
  const MeasureKind kind = parse_measure(config);
  const auto grid = parse_grid(require(config, "y_grid", ""), "y_grid");
  OutputTable t;
  if (kind == MeasureKind::delta_short) {
    t.columns = {"y", "delta", "zero_convention"};
    for (double y : grid) {
      if (y > 0.0) throw ConfigError("y_grid must be <= 0 for delta_short");
      t.rows.push_back({y, delta_short(c.model, c.x, c.rho_fn, c.scen.p, y), y == 0.0 ? 1.0 : 0.0});
    }
  } else {
    t.columns = {"y", "beta", "capital_block", "capital_split", "zero_convention"};
    for (double y : grid) {
      if (y < 0.0) throw ConfigError("y_grid must be >= 0 for beta");
      const double b = beta(c.model, c.x, c.rho_fn, c.scen.p, y);
      const double bs = beta_split(c.model, c.x, c.rho_fn, c.scen.p, y, c.quadrature);
      const auto block = capital_requirement(y, b, c.curve, CapitalPolicy::block);
      const auto split = capital_requirement(y, bs, c.curve, CapitalPolicy::split);
      t.rows.push_back({y, kind == MeasureKind::beta ? b : bs, block.capital_requirement, split.capital_requirement,
                        y == 0.0 ? 1.0 : 0.0});
    }
  }
  emit_table(t, out, format);
  return kOk;
}

AxiomReport lipschitz_as_report(const LipschitzReport& l, bool expected_to_fail) {
  AxiomReport r("lipschitz_sqrt_2n");
  r.pairs_tested = l.pairs;
  r.expected_to_fail = expected_to_fail;
  if (!l.pass) r.record(fmt::format("n={}", l.dimension), l.max_ratio, l.bound, l.max_ratio - l.bound);
  return r;
}

int cmd_axioms(const json& config, const std::string& dir, const std::string& out, const std::string&) {
  const std::uint64_t seed = require_seed(config, "axiom sampling");
  Context c = load_single(config, dir);
  const json ax = config.value("axioms", json::object());
  AxiomSweep sweep;
  sweep.trials = get_or<std::size_t>(ax, "trials", 1000, "axioms.");
  sweep.lo = get_or<double>(ax, "lo", 0.0, "axioms.");
  sweep.hi = get_or<double>(ax, "hi", 100.0, "axioms.");
  sweep.seed = seed;
  const bool concave = block_exposure_concave(c.model);

  json doc = json::object();
  std::vector<AxiomReport> all;
  auto add = [&](const std::string& key, std::vector<AxiomReport> reports) {
    doc[key] = to_json(reports);
    all.insert(all.end(), reports.begin(), reports.end());
  };

  const std::size_t n = c.x.size();
  add("rho", check_rho_axioms(c.rho_fn, c.scen.p, n, sweep.trials, seed));

  std::vector<double> a1_grid = linspace(-sweep.hi, sweep.hi, 41);
  add("impact_monotonicity", {check_impact_monotonicity(c.model, c.x, a1_grid)});

  const std::vector<double> pos_grid = linspace(std::max(sweep.lo, sweep.hi / 100.0), sweep.hi, 21);
  const bool closed = has_closed_form_split(c.model) && c.quadrature.method == Quadrature::Method::automatic;
  const double split_tol = closed ? 1e-9 : 1e-6;
  add("block_concavity",
      {check_concavity([&](double y) { return offsetting_exposure(c.model, c.x, y).z; }, pos_grid, 1e-9, !concave)});
  add("split_concavity", {check_concavity(
                             [&](double y) { return split_exposure(c.model, c.x, y, c.quadrature).z; }, pos_grid,
                             split_tol, false)});

  AxiomSweep block_sweep = sweep;
  block_sweep.curvature_expected_to_fail = !concave;
  add("beta", check_measure_axioms([&](double y) { return beta(c.model, c.x, c.rho_fn, c.scen.p, y); },
                                   MeasureProfile::beta, block_sweep));
  AxiomSweep split_sweep = sweep;
  split_sweep.tolerance = split_tol;
  add("beta_split",
      check_measure_axioms([&](double y) { return beta_split(c.model, c.x, c.rho_fn, c.scen.p, y, c.quadrature); },
                           MeasureProfile::beta_split, split_sweep));
  if (short_side_supported(c.model, c.rho_fn)) {
    AxiomSweep short_sweep = block_sweep;
    short_sweep.lo = -sweep.hi;
    short_sweep.hi = 0.0;
    add("delta_short", check_measure_axioms([&](double y) { return delta_short(c.model, c.x, c.rho_fn, c.scen.p, y); },
                                            MeasureProfile::delta_short, short_sweep));
  }

  // beta-hat Lipschitz bound on f over [-hi, hi]; a jump at 0 (sign-linear) or
  // an unbounded slope (power law) breaks it by construction.
  FConfig fc{c.model, c.x, c.rho_fn, c.scen.p, FKind::block, c.quadrature};
  std::vector<double> fgrid = linspace(-sweep.hi, sweep.hi, 401);
  const GridFunction f = build_f(fc, fgrid);
  const bool lip_expected = !concave || std::holds_alternative<SignLinear>(c.model);
  add("lipschitz", {lipschitz_as_report(lipschitz_check(f, sweep.trials, seed), lip_expected)});

  const bool failed = any_unexpected_failure(all);
  doc["status"] = failed ? "fail" : "pass";
  emit(doc.dump(2) + "\n", out);
  return failed ? kCheckFailed : kOk;
}

int cmd_dual(const json& config, const std::string& dir, const std::string& out, const std::string& format) {
  const std::uint64_t seed = require_seed(config, "random simplex samples");
  Context c = load_single(config, dir);
  const json d = config.value("dual", json::object());
  std::vector<double> grid = parse_grid(require(d, "grid", "dual."), "dual.grid");
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
  }
  const auto kind_name = get_or<std::string>(d, "kind", "block", "dual.");
  if (kind_name != "block" && kind_name != "split") throw ConfigError("field 'dual.kind' must be block or split");
  const FKind kind = kind_name == "block" ? FKind::block : FKind::split;
  FConfig fc{c.model, c.x, c.rho_fn, c.scen.p, kind, c.quadrature};
  ConjugateOptions opts;
  opts.points_1d = get_or<std::size_t>(d, "u_points", opts.points_1d, "dual.");
  const ConjugatePair pair = biconjugate_check(build_f(fc, grid), opts);
  const double tolerance = get_or<double>(d, "tolerance", pair.grid_bound, "dual.");

  OutputTable t{{"y", "f", "f_star_star", "abs_error"}, {}};
  for (std::size_t i = 0; i < pair.f.size(); ++i) {
    t.rows.push_back({pair.f.axes[0][i], pair.f.values[i], pair.f_star_star.values[i],
                      std::abs(pair.f_star_star.values[i] - pair.f.values[i])});
  }
  OutputTable conj{{"u", "f_star"}, {}};
  for (std::size_t j = 0; j < pair.f_star.size(); ++j) conj.rows.push_back({pair.f_star.axes[0][j], pair.f_star.values[j]});

  json checks = json::array();
  bool dual_ok = true;
  const auto samples = get_or<std::size_t>(d, "samples", 1000, "dual.");
  const bool closed_form_alpha = !std::holds_alternative<ValueAtRisk>(c.rho_fn);
  if (closed_form_alpha) {
    const auto ys = get_or<std::vector<double>>(d, "y", {}, "dual.");
    for (double y : ys) {
      const Exposure e = kind == FKind::block ? offsetting_exposure(c.model, c.x, y)
                                              : split_exposure(c.model, c.x, y, c.quadrature);
      const DualReport r = dual_check(c.rho_fn, c.scen.p, e.z.values(), samples, seed);
      dual_ok = dual_ok && r.pass;
      checks.push_back({{"y", y},
                        {"beta", r.beta_value},
                        {"dual_sup", r.dual_sup},
                        {"gap", r.gap},
                        {"attained_by", r.attained_by},
                        {"random_samples", r.random_samples},
                        {"random_above_primal", r.random_above_primal},
                        {"pass", r.pass}});
    }
  }
  const bool recovery_ok = pair.max_recovery_error <= tolerance;
  const bool ok = pair.f_convex && recovery_ok && dual_ok;
  json report = {{"max_abs_error", pair.max_recovery_error},
                 {"grid_bound", pair.grid_bound},
                 {"tolerance", tolerance},
                 {"f_convex", pair.f_convex},
                 {"non_convex_flag", !pair.f_convex},
                 {"closed_form_penalty", closed_form_alpha},
                 {"dual_checks", std::move(checks)},
                 {"status", ok ? "pass" : "fail"}};

  if (format == "json") {
    json doc = {{"biconjugate", table_json(t)}, {"conjugate", table_json(conj)}, {"report", report}};
    emit(doc.dump(2) + "\n", out);
  } else {
    emit(render_csv(t), out);
    if (!out.empty()) {
      emit(render_csv(conj), out + ".conjugate.csv");
      emit(report.dump(2) + "\n", out + ".dual.json");
    } else {
      std::cerr << report.dump(2) << "\n";
    }
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_split_compare(const json& config, const std::string& dir, const std::string& out, const std::string& format) {
  Context c = load_single(config, dir);
  const auto grid = parse_grid(require(config, "y_grid", ""), "y_grid");
  OutputTable t{{"y", "beta_block", "beta_split", "capital_block", "capital_split", "split_le_block"}, {}};
  bool dominated = true;
  for (double y : grid) {
    if (y < 0.0) throw ConfigError("y_grid must be >= 0 for split-compare");
    const double b = beta(c.model, c.x, c.rho_fn, c.scen.p, y);
    const double bs = beta_split(c.model, c.x, c.rho_fn, c.scen.p, y, c.quadrature);
    const double cb = capital_requirement(y, b, c.curve, CapitalPolicy::block).capital_requirement;
    const double cs = capital_requirement(y, bs, c.curve, CapitalPolicy::split).capital_requirement;
    const bool le = cs <= cb + 1e-9 * std::max(1.0, std::abs(cb));
    dominated = dominated && le;
    t.rows.push_back({y, b, bs, cb, cs, le ? 1.0 : 0.0});
  }
  emit_table(t, out, format);
  return dominated ? kOk : kCheckFailed;
}

int cmd_portfolio(const json& config, const std::string& dir, const std::string& out, const std::string& format) {
  Scenarios s = load_source(config, dir);
  const RiskFunctional f = parse_rho(config);
  const Quadrature q = parse_quadrature(config);
  const json& pf = require(config, "portfolio", "");
  const json& list = require(pf, "assets", "portfolio.");
  if (!list.is_array() || list.empty()) throw ConfigError("field 'portfolio.assets' must be a non-empty list");
  std::vector<PortfolioAsset> assets;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = fmt::format("portfolio.assets[{}].", i);
    const auto name = get<std::string>(list[i], "name", path);
    if (!s.set->assets.count(name)) throw ConfigError(fmt::format("field '{}name' names unknown asset '{}'", path, name));
    const ScenarioVector& x = s.set->assets.at(name);
    assets.push_back({name, parse_impact(require(list[i], "impact", path), s, x, path + "impact."), x,
                      parse_curve(list[i], path)});
  }
  const auto y = get<std::vector<double>>(pf, "y", "portfolio.");
  if (y.size() != assets.size()) throw ConfigError("field 'portfolio.y' needs one position per asset");

  const CapitalReport block = capital_portfolio(assets, f, s.p, y, CapitalPolicy::block, q);
  const CapitalReport split = capital_portfolio(assets, f, s.p, y, CapitalPolicy::split, q);
  OutputTable t{{"name", "y", "beta_block", "beta_split", "capital_block", "capital_split"}, {}};
  double sum_b = 0.0;
  double sum_s = 0.0;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& lb = block.per_asset[i];
    const auto& ls = split.per_asset[i];
    sum_b += lb.beta_value;
    sum_s += ls.beta_value;
    t.rows.push_back({assets[i].name, y[i], lb.beta_value, ls.beta_value, lb.capital, ls.capital});
  }
  t.rows.push_back({std::string("sum_of_assets"), {}, sum_b, sum_s, block.capital_requirement, split.capital_requirement});
  t.rows.push_back({std::string("portfolio"), {}, block.beta_value, split.beta_value, {}, {}});

  json extra = {{"subadditivity_gap", sum_b - block.beta_value},
                {"split_le_block", split.capital_requirement <= block.capital_requirement}};
  if (pf.contains("gbm_var")) {
    const json& g = pf.at("gbm_var");
    std::vector<GbmParams> params;
    for (const auto& p : require(g, "params", "portfolio.gbm_var.")) {
      GbmParams gp;
      gp.x0 = get<double>(p, "x0", "portfolio.gbm_var.params.");
      gp.mu = get<double>(p, "mu", "portfolio.gbm_var.params.");
      gp.sigma = get<double>(p, "sigma", "portfolio.gbm_var.params.");
      gp.horizon = get_or<double>(p, "T", 1.0, "portfolio.gbm_var.params.");
      params.push_back(gp);
    }
    const double v = var_gbm_portfolio(params, get<std::vector<double>>(g, "a", "portfolio.gbm_var."),
                                       get<std::vector<std::vector<double>>>(g, "correlation", "portfolio.gbm_var."),
                                       y, get<double>(g, "delta", "portfolio.gbm_var."));
    t.rows.push_back({std::string("log_price_var"), {}, v, {}, {}, {}});
    extra["log_price_var"] = v;
  }
  emit_table(t, out, format, format == "json" ? extra : json(nullptr));
  return kOk;
}

}  // namespace

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &config;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() && !node->is_null()) throw ConfigError("--set path '" + key + "' crosses a non-object");
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() && !node->is_null()) throw ConfigError("--set path '" + key + "' crosses a non-object");
  (*node)[parts.back()] = std::move(value);
}

int run_command(const std::string& command, const nlohmann::json& config, const std::string& config_dir,
                const std::string& out_path, const std::string& format) {
  if (command == "beta") return cmd_beta(config, config_dir, out_path, format);
  if (command == "axioms") return cmd_axioms(config, config_dir, out_path, format);
  if (command == "dual") return cmd_dual(config, config_dir, out_path, format);
  if (command == "split-compare") return cmd_split_compare(config, config_dir, out_path, format);
  if (command == "portfolio") return cmd_portfolio(config, config_dir, out_path, format);
  throw ConfigError("unknown command '" + command + "'");
}

int main(int argc, char** argv) {
  CLI::App app{"Liquidity-adjusted risk measures on finite scenario spaces"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  int threads = 0;
  std::vector<std::string> overrides;
  for (const char* name : {"beta", "axioms", "dual", "split-compare", "portfolio"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads (0 = runtime default)");
    sub->add_option("--set", overrides, "KEY=VALUE config override (repeatable)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(config, o);
    parallel::set_thread_count(threads);
    const std::string dir = fs::absolute(config_path).parent_path().string();
    return run_command(command, config, dir, out_path, format);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace illiq::cli
