#include "pathfec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace pathfec {
namespace {

using nlohmann::ordered_json;

constexpr const char* kSweepSchema = "# schema=pathfec.sweep.v1";
constexpr const char* kSweepHeader =
    "scenario_id,axis_value,method,allocation,pe_exact,pe_mc,ci_low,ci_high,"
    "exponent_theory,flags";

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string join_counts(const std::vector<int>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(counts[i]);
  }
  return s;
}

struct SweepRow {
  std::string scenario_id;
  double axis_value = kNan;
  std::string method;
  std::string allocation;
  double pe_exact = kNan;
  double pe_mc = kNan, ci_low = kNan, ci_high = kNan;
  double exponent_theory = kNan;
  std::string flags;
};

void emit(std::ostream& out, const SweepRow& r) {
  out << r.scenario_id << ',' << num(r.axis_value) << ',' << r.method << ','
      << r.allocation << ',' << num(r.pe_exact) << ',' << num(r.pe_mc) << ','
      << num(r.ci_low) << ',' << num(r.ci_high) << ','
      << num(r.exponent_theory) << ',' << r.flags << '\n';
}

std::vector<int> round_fractions(const std::vector<double>& frac, int total) {
  const std::size_t n = frac.size();
  std::vector<int> counts(n);
  std::vector<std::pair<double, std::size_t>> rem(n);
  int assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = frac[i] * total;
    counts[i] = static_cast<int>(std::floor(exact + 1e-9));
    assigned += counts[i];
    rem[i] = {exact - counts[i], i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (int i = 0; i < total - assigned; ++i) ++counts[rem[i].second];
  return counts;
}

double get_num(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string("config: missing numeric field '") + key +
                      "'");
  return j[key].get<double>();
}

std::optional<double> opt_num(const ordered_json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_number())
    throw ConfigError(std::string("config: field '") + key +
                      "' must be a number");
  return j[key].get<double>();
}

// Slope of ln(pe) vs x over the points with pe > 0; NaN when underdetermined.
double slope_or_nan(const std::vector<double>& xs,
                    const std::vector<double>& pes) {
  try {
    return fit_log_slope(xs, pes);
  } catch (const std::invalid_argument&) {
    return kNan;
  }
}

}  // namespace

PathType TypeSpec::resolve(double t) const {
  PathType pt;
  pt.count = count;
  pt.max_rate_w = max_rate_w;
  const bool direct = mu_g.has_value() && mu_b.has_value();
  const bool scaled = pi_b.has_value() && mu_g_t.has_value();
  if (direct == scaled)
    throw ConfigError(
        "type: give exactly one of (mu_g, mu_b) or (pi_b, mu_g_t)");
  if (direct) {
    pt.mu_g = *mu_g;
    pt.mu_b = *mu_b;
  } else {
    if (!(*pi_b > 0) || !(*pi_b < 1))
      throw ConfigError("type: pi_b must lie in (0,1)");
    if (!(t > 0)) throw ConfigError("type: block duration must be positive");
    pt.mu_g = *mu_g_t / t;
    pt.mu_b = pt.mu_g * (1.0 - *pi_b) / *pi_b;
  }
  return pt;
}

ExperimentConfig ExperimentConfig::parse_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("scenario_id")) cfg.scenario_id = j["scenario_id"];
  if (!j.contains("block")) throw ConfigError("config: missing 'block'");
  const auto& b = j["block"];
  cfg.block.n = static_cast<int>(get_num(b, "n"));
  cfg.block.k_info = static_cast<int>(get_num(b, "k_info"));
  cfg.block.t = get_num(b, "t_seconds");
  cfg.s_req = get_num(j, "s_req");
  if (!j.contains("types") || !j["types"].is_array() || j["types"].empty())
    throw ConfigError("config: 'types' must be a nonempty array");
  for (const auto& tj : j["types"]) {
    TypeSpec ts;
    ts.count = static_cast<int>(get_num(tj, "count"));
    ts.max_rate_w = get_num(tj, "max_rate_w");
    ts.mu_g = opt_num(tj, "mu_g");
    ts.mu_b = opt_num(tj, "mu_b");
    ts.pi_b = opt_num(tj, "pi_b");
    ts.mu_g_t = opt_num(tj, "mu_g_t");
    cfg.types.push_back(ts);
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("trials")) {
    const auto& tr = j["trials"];
    if (tr.contains("max"))
      cfg.trials.max_trials = tr["max"].get<std::uint64_t>();
    if (tr.contains("rel_halfwidth"))
      cfg.trials.rel_halfwidth = tr["rel_halfwidth"].get<double>();
  }
  if (j.contains("alphas"))
    cfg.alphas = j["alphas"].get<std::vector<double>>();
  if (j.contains("allocation"))
    cfg.fixed_allocation = j["allocation"].get<std::vector<int>>();
  if (j.contains("sweep")) {
    SweepSpec sw;
    const auto& sj = j["sweep"];
    if (!sj.contains("axis") || !sj["axis"].is_string())
      throw ConfigError("config: sweep.axis must be a string");
    sw.axis = sj["axis"];
    if (!sj.contains("values") || !sj["values"].is_array())
      throw ConfigError("config: sweep.values must be an array");
    sw.values = sj["values"].get<std::vector<double>>();
    if (sj.contains("methods"))
      sw.methods = sj["methods"].get<std::vector<std::string>>();
    cfg.sweep = std::move(sw);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string ExperimentConfig::serialize() const {
  ordered_json j;
  j["scenario_id"] = scenario_id;
  j["block"] = {{"n", block.n},
                {"k_info", block.k_info},
                {"t_seconds", block.t}};
  j["s_req"] = s_req;
  j["types"] = ordered_json::array();
  for (const auto& ts : types) {
    ordered_json tj;
    tj["count"] = ts.count;
    tj["max_rate_w"] = ts.max_rate_w;
    if (ts.mu_g) tj["mu_g"] = *ts.mu_g;
    if (ts.mu_b) tj["mu_b"] = *ts.mu_b;
    if (ts.pi_b) tj["pi_b"] = *ts.pi_b;
    if (ts.mu_g_t) tj["mu_g_t"] = *ts.mu_g_t;
    j["types"].push_back(tj);
  }
  j["seed"] = seed;
  j["trials"] = {{"max", trials.max_trials},
                 {"rel_halfwidth", trials.rel_halfwidth}};
  if (!alphas.empty()) j["alphas"] = alphas;
  if (!fixed_allocation.empty()) j["allocation"] = fixed_allocation;
  if (sweep) {
    j["sweep"] = {{"axis", sweep->axis}, {"values", sweep->values}};
    if (!sweep->methods.empty()) j["sweep"]["methods"] = sweep->methods;
  }
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  try {
    block.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(s_req > 0)) throw ConfigError("config: s_req must be positive");
  if (std::abs(block.n - s_req * block.t) > 0.5 + 1e-9)
    throw ConfigError("config: block.n must equal s_req * t_seconds");
  if (types.empty()) throw ConfigError("config: no path types");
  double total_bw = 0;
  for (const auto& ts : types) {
    const auto pt = ts.resolve(block.t);
    try {
      pt.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    total_bw += pt.count * pt.max_rate_w;
  }
  if (s_req > total_bw + 1e-9)
    throw ConfigError("config: s_req exceeds the total path bandwidth");
  for (double a : alphas)
    if (!(a > 0) || !(a < 1))
      throw ConfigError("config: alphas must lie in (0,1)");
}

TypeEnsemble ExperimentConfig::ensemble() const {
  std::vector<PathType> pts;
  pts.reserve(types.size());
  for (const auto& ts : types) pts.push_back(ts.resolve(block.t));
  return TypeEnsemble::build(std::move(pts), block.t);
}

AllocationResult allocate_by_method(const TypeEnsemble& te, const Block& blk,
                                    const std::string& method) {
  if (method == "optimal") return exhaustive_optimal(te, blk);
  if (method == "dp") return dp_suboptimal(te, blk);
  if (method == "equal") return baseline_equal(te, blk);
  if (method == "best-path") return baseline_best_path(te, blk);
  if (method == "asymptotic") return asymptotic_rounded(te, blk);
  if (method == "waterfill") {
    const double alpha = static_cast<double>(blk.budget()) / blk.n;
    const double n0 = static_cast<double>(blk.n) / te.total_paths();
    const auto eta = waterfill_allocation(te, alpha, n0, blk.t);
    AllocationResult r;
    r.method = "waterfill";
    r.alloc.counts = round_fractions(eta, blk.n);
    r.alloc.block_n = blk.n;
    r.alloc.loss_budget_m = blk.budget();
    r.pe = exact_pe(r.alloc, te, blk.t);
    return r;
  }
  throw ConfigError("unknown allocation method '" + method + "'");
}

void run_exponent(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.alphas.empty())
    throw ConfigError("config: exponent needs a nonempty 'alphas' list");
  const auto te = cfg.ensemble();
  out << "# schema=pathfec.exponent.v1\n";
  out << "alpha,type,gamma,mean_x,lambda,rate_u,eta_star,total_exponent\n";
  for (double alpha : cfg.alphas) {
    const auto asym = theorem_ii_allocation(te, alpha);
    for (std::size_t jj = 0; jj < te.size(); ++jj) {
      RateFunction rf(te.profiles[jj]);
      const auto lambda = rf.solve_lambda(alpha);
      out << num(alpha) << ',' << jj << ',' << num(te.gammas[jj]) << ','
          << num(rf.mean()) << ',' << (lambda ? num(*lambda) : "") << ','
          << num(rf.rate_u(alpha)) << ',' << num(asym.eta[jj]) << ','
          << num(asym.exponent) << '\n';
    }
  }
}

void run_allocate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out) {
  cfg.validate();
  const auto te = cfg.ensemble();
  const auto start = std::chrono::steady_clock::now();
  const auto r = allocate_by_method(te, cfg.block, method);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  out << "# schema=pathfec.allocate.v1\n";
  out << "method,allocation,pe_exact,lowerbound,runtime_ms\n";
  out << r.method << ',' << join_counts(r.alloc.counts) << ',' << num(r.pe)
      << ',' << (r.lowerbound ? num(*r.lowerbound) : "") << ',' << num(ms)
      << '\n';
}

namespace {

AllocationResult pick_allocation(const ExperimentConfig& cfg,
                                 const TypeEnsemble& te,
                                 const std::string& method) {
  if (!method.empty()) return allocate_by_method(te, cfg.block, method);
  if (cfg.fixed_allocation.empty())
    throw ConfigError("config: need --method or a fixed 'allocation' array");
  AllocationResult r;
  r.method = "fixed";
  r.alloc.counts = cfg.fixed_allocation;
  r.alloc.block_n = cfg.block.n;
  r.alloc.loss_budget_m = cfg.block.budget();
  r.pe = exact_pe(r.alloc, te, cfg.block.t);
  return r;
}

}  // namespace

void run_evaluate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out) {
  cfg.validate();
  const auto te = cfg.ensemble();
  const auto r = pick_allocation(cfg, te, method);
  out << kSweepSchema << '\n' << kSweepHeader << '\n';
  SweepRow row;
  row.scenario_id = cfg.scenario_id;
  row.method = r.method;
  row.allocation = join_counts(r.alloc.counts);
  row.pe_exact = r.pe;
  emit(out, row);
}

void run_simulate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out) {
  cfg.validate();
  const auto te = cfg.ensemble();
  const auto r = pick_allocation(cfg, te, method);
  const auto mc = estimate_pe_adaptive(te, r.alloc, cfg.seed,
                                       cfg.trials.max_trials,
                                       cfg.trials.rel_halfwidth);
  out << kSweepSchema << '\n' << kSweepHeader << '\n';
  SweepRow row;
  row.scenario_id = cfg.scenario_id;
  row.method = r.method;
  row.allocation = join_counts(r.alloc.counts);
  row.pe_exact = r.pe;
  row.pe_mc = mc.report.pe_hat;
  row.ci_low = mc.report.ci_low;
  row.ci_high = mc.report.ci_high;
  if (mc.low_confidence) row.flags = "low_confidence";
  emit(out, row);
}

namespace {

void sweep_mu_b_t(const ExperimentConfig& cfg, const SweepSpec& sw,
                  std::ostream& out) {
  if (cfg.types.size() != 1)
    throw ConfigError("sweep mu_b_t: exactly one path type expected");
  const Block& blk = cfg.block;
  std::vector<double> pes_exact, pes_mc, pes_theory;
  const double alpha = static_cast<double>(blk.budget()) / blk.n;
  for (double v : sw.values) {
    PathType pt = cfg.types[0].resolve(blk.t);
    pt.mu_b = v / blk.t;
    pt.validate();
    const auto te = TypeEnsemble::build({pt}, blk.t);
    AllocationVector av;
    av.counts = {blk.n};
    av.block_n = blk.n;
    av.loss_budget_m = blk.budget();
    SweepRow row;
    row.scenario_id = cfg.scenario_id;
    row.axis_value = v;
    row.method = "single";
    row.allocation = join_counts(av.counts);
    row.pe_exact = exact_pe(av, te, blk.t);
    const auto mc = estimate_pe_adaptive(te, av, cfg.seed,
                                         cfg.trials.max_trials,
                                         cfg.trials.rel_halfwidth);
    row.pe_mc = mc.report.pe_hat;
    row.ci_low = mc.report.ci_low;
    row.ci_high = mc.report.ci_high;
    row.exponent_theory = single_path_pe(pt, blk.t, alpha);
    if (mc.low_confidence) row.flags = "low_confidence";
    emit(out, row);
    pes_exact.push_back(row.pe_exact);
    pes_mc.push_back(mc.low_confidence ? 0.0 : row.pe_mc);
    pes_theory.push_back(row.exponent_theory);
  }
  SweepRow fit;
  fit.scenario_id = cfg.scenario_id;
  fit.method = "slope_fit";
  fit.pe_exact = slope_or_nan(sw.values, pes_exact);
  fit.pe_mc = slope_or_nan(sw.values, pes_mc);
  fit.exponent_theory = slope_or_nan(sw.values, pes_theory);
  fit.flags = "summary";
  emit(out, fit);
}

void sweep_paths_l(const ExperimentConfig& cfg, const SweepSpec& sw,
                   std::ostream& out) {
  const Block& blk = cfg.block;
  const auto base = cfg.ensemble();
  const int base_l = base.total_paths();
  const double n0 = static_cast<double>(blk.n) / base_l;
  const double alpha = static_cast<double>(blk.budget()) / blk.n;
  double theory = 0;
  for (std::size_t j = 0; j < base.size(); ++j)
    theory += base.gammas[j] * RateFunction(base.profiles[j]).rate_u(alpha);

  std::vector<double> ls, pes_exact, pes_mc;
  for (double lv : sw.values) {
    const int l = static_cast<int>(std::lround(lv));
    const auto path_counts = round_fractions(base.gammas, l);
    std::vector<PathType> pts;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (path_counts[j] == 0) continue;
      PathType pt = base.types[j];
      pt.count = path_counts[j];
      pts.push_back(pt);
      kept.push_back(j);
    }
    const auto te = TypeEnsemble::build(std::move(pts), blk.t);
    Block pb;
    pb.n = static_cast<int>(std::lround(n0 * l));
    pb.k_info = pb.n - static_cast<int>(std::lround(alpha * pb.n));
    pb.t = blk.t;
    const auto r = baseline_equal(te, pb);
    const auto mc = estimate_pe_adaptive(te, r.alloc, cfg.seed,
                                         cfg.trials.max_trials,
                                         cfg.trials.rel_halfwidth);
    SweepRow row;
    row.scenario_id = cfg.scenario_id;
    row.axis_value = lv;
    row.method = "equal";
    row.allocation = join_counts(r.alloc.counts);
    row.pe_exact = r.pe;
    row.pe_mc = mc.report.pe_hat;
    row.ci_low = mc.report.ci_low;
    row.ci_high = mc.report.ci_high;
    row.exponent_theory = theory;
    if (mc.low_confidence) row.flags = "low_confidence";
    emit(out, row);
    ls.push_back(lv);
    pes_exact.push_back(row.pe_exact);
    pes_mc.push_back(mc.low_confidence ? 0.0 : row.pe_mc);
  }
  SweepRow fit;
  fit.scenario_id = cfg.scenario_id;
  fit.method = "slope_fit";
  fit.pe_exact = slope_or_nan(ls, pes_exact);
  fit.pe_mc = slope_or_nan(ls, pes_mc);
  fit.exponent_theory = theory;
  fit.flags = "summary";
  emit(out, fit);
}

void sweep_delta(const ExperimentConfig& cfg, const SweepSpec& sw,
                 std::ostream& out) {
  const Block& blk = cfg.block;
  const PathType tmpl = cfg.types[0].resolve(blk.t);
  const double center = tmpl.pi_b();
  std::vector<std::string> methods = sw.methods;
  if (methods.empty())
    methods = {"optimal", "dp", "equal", "best-path", "asymptotic"};
  static constexpr int kSpread[] = {-5, -3, -1, 1, 3, 5};
  for (double delta : sw.values) {
    std::vector<PathType> pts;
    for (int s : kSpread) {
      const double pb = center + s * delta / 2.0;
      if (!(pb > 0) || !(pb < 1))
        throw ConfigError("sweep delta: pi_b leaves (0,1) at delta=" +
                          std::to_string(delta));
      PathType pt = tmpl;
      pt.count = 1;
      pt.mu_b = pt.mu_g * (1.0 - pb) / pb;
      pts.push_back(pt);
    }
    const auto te = TypeEnsemble::build(std::move(pts), blk.t);
    for (const auto& method : methods) {
      const auto r = allocate_by_method(te, blk, method);
      SweepRow row;
      row.scenario_id = cfg.scenario_id;
      row.axis_value = delta;
      row.method = r.method;
      row.allocation = join_counts(r.alloc.counts);
      row.pe_exact = r.pe;
      emit(out, row);
    }
  }
}

}  // namespace

void run_sweep(const ExperimentConfig& cfg, const std::string& axis,
               std::ostream& out) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("config: missing 'sweep' section");
  const SweepSpec& sw = *cfg.sweep;
  std::string ax = axis.empty() ? sw.axis : axis;
  if (!axis.empty() && !sw.axis.empty() && axis != sw.axis)
    throw ConfigError("sweep: --axis disagrees with the config");
  if (sw.values.empty()) throw ConfigError("sweep: empty value list");
  out << kSweepSchema << '\n' << kSweepHeader << '\n';
  if (ax == "mu_b_t")
    sweep_mu_b_t(cfg, sw, out);
  else if (ax == "paths_l")
    sweep_paths_l(cfg, sw, out);
  else if (ax == "delta")
    sweep_delta(cfg, sw, out);
  else
    throw ConfigError("sweep: unknown axis '" + ax + "'");
}

}  // namespace pathfec
