#pragma once

#include <cstdint>
#include <span>

#include "pathfec/allocation.hpp"

namespace pathfec {

struct McOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  /// Stop once this many failures are seen (0 = run every trial). Results
  /// stay deterministic because each trial draws from its own substream.
  std::uint64_t stop_after_failures = 0;
};

struct McReport {
  std::uint64_t trials = 0;    // trials actually run
  std::uint64_t failures = 0;  // trials with losses > budget
  double pe_hat = 0;
  double ci_low = 0;   // 95% interval; Clopper-Pearson when failures < 30
  double ci_high = 0;
  std::uint64_t seed = 0;
};

/// Simulates whole blocks: every loaded path gets a fresh state process over
/// [0, t], losses are counted on the even epoch grids, and a trial fails when
/// the total exceeds the budget. Trial i uses substream (seed, i), so any
/// chunking of the trial range reproduces the same counts.
McReport estimate_pe(const TypeEnsemble& te, const AllocationVector& av,
                     const McOptions& opt);

struct AdaptiveReport {
  McReport report;
  /// Set when max_trials ran out before the interval tightened.
  bool low_confidence = false;
};

/// Runs trials in growing deterministic chunks until the 95% CI half-width
/// drops to rel_halfwidth * pe_hat, or max_trials is exhausted. The stopping
/// rule depends only on the (schedule-independent) counts, so the result is
/// a pure function of (config, seed).
AdaptiveReport estimate_pe_adaptive(const TypeEnsemble& te,
                                    const AllocationVector& av,
                                    std::uint64_t seed,
                                    std::uint64_t max_trials = 100000000,
                                    double rel_halfwidth = 0.1);

/// 95% confidence interval for a binomial proportion.
std::pair<double, double> proportion_ci(std::uint64_t failures,
                                        std::uint64_t trials);

/// Magnitude of the OLS slope of ln(pe) against x. Entries with pe <= 0 are
/// skipped; throws std::invalid_argument if fewer than two points remain.
double fit_log_slope(std::span<const double> xs, std::span<const double> pes);

}  // namespace pathfec
