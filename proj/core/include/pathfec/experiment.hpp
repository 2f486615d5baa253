#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pathfec/montecarlo.hpp"

namespace pathfec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One path type as written in the config. Either (mu_g, mu_b) or
/// (pi_b, mu_g_t) must be given; the latter is resolved against the block
/// duration via mu_b = mu_g (1 - pi_b) / pi_b. The raw form is kept so that
/// serialization reproduces the input.
struct TypeSpec {
  int count = 1;
  double max_rate_w = 0;
  std::optional<double> mu_g, mu_b;
  std::optional<double> pi_b, mu_g_t;

  PathType resolve(double t) const;
  bool operator==(const TypeSpec&) const = default;
};

struct TrialsPolicy {
  std::uint64_t max_trials = 1000000;
  double rel_halfwidth = 0.1;  // target 95% CI half-width / pe_hat
  bool operator==(const TrialsPolicy&) const = default;
};

struct SweepSpec {
  std::string axis;  // mu_b_t | paths_l | delta
  std::vector<double> values;
  std::vector<std::string> methods;  // delta axis only; empty = default set
  bool operator==(const SweepSpec&) const = default;
};

struct ExperimentConfig {
  std::string scenario_id = "scenario";
  Block block;
  double s_req = 0;
  std::vector<TypeSpec> types;
  std::uint64_t seed = 1;
  TrialsPolicy trials;
  std::vector<double> alphas;           // exponent subcommand
  std::vector<int> fixed_allocation;    // evaluate/simulate without a method
  std::optional<SweepSpec> sweep;

  static ExperimentConfig parse_json(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
  std::string serialize() const;

  /// Structural and feasibility checks; throws ConfigError. Run before any
  /// work is dispatched.
  void validate() const;
  TypeEnsemble ensemble() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Allocation by name: optimal | dp | equal | best-path | asymptotic |
/// waterfill. waterfill and asymptotic round their fractions to integers by
/// largest remainder.
AllocationResult allocate_by_method(const TypeEnsemble& te, const Block& blk,
                                    const std::string& method);

/// Per-alpha table: alpha, per-type means, tilts, rate values, eta*, and the
/// total exponent. Own header; not the sweep schema.
void run_exponent(const ExperimentConfig& cfg, std::ostream& out);

/// Single allocation row: method, allocation, pe_exact, lowerbound,
/// runtime_ms.
void run_allocate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out);

/// Exact pe of a method's allocation (or the config's fixed allocation when
/// method is empty), emitted in the sweep schema.
void run_evaluate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out);

/// Monte Carlo estimate of the same, with the config's trials policy.
void run_simulate(const ExperimentConfig& cfg, const std::string& method,
                  std::ostream& out);

/// Axis sweep in the fixed schema (scenario_id, axis_value, method,
/// allocation, pe_exact, pe_mc, ci_low, ci_high, exponent_theory, flags),
/// closed by slope-fit summary rows where the axis defines one.
void run_sweep(const ExperimentConfig& cfg, const std::string& axis,
               std::ostream& out);

}  // namespace pathfec
