#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "pathfec/rng.hpp"

namespace pathfec {

/// One class of statistically identical paths. A path alternates between a
/// Good state (mean sojourn 1/mu_g) and a Bad state (mean sojourn 1/mu_b);
/// packets transmitted while Bad are erased.
struct PathType {
  double mu_g = 0;       // exit rate from Good, 1/s
  double mu_b = 0;       // exit rate from Bad, 1/s
  double max_rate_w = 0; // bandwidth cap per path, packets/s
  int count = 1;         // number of identical paths of this type

  double pi_b() const { return mu_g / (mu_g + mu_b); }
  double pi_g() const { return mu_b / (mu_g + mu_b); }

  void validate() const {
    if (!(mu_g > 0) || !(mu_b > 0))
      throw std::invalid_argument("PathType: state exit rates must be positive");
    if (!(max_rate_w > 0))
      throw std::invalid_argument("PathType: bandwidth cap must be positive");
    if (count < 1)
      throw std::invalid_argument("PathType: path count must be >= 1");
  }
};

/// Per-packet state transition probabilities at sending rate s_l.
struct TransitionProbs {
  double gg, bg; // from Good
  double bb, gb; // from Bad
};

/// Alternating Good/Bad sojourn sequence covering [0, horizon].
struct StatePath {
  bool starts_bad = false;
  std::vector<double> sojourns; // strictly positive, states alternate
  double horizon = 0;

  /// State at time t (true = Bad). t must lie in [0, horizon].
  bool state_at(double t) const;
};

/// (pi_g, pi_b) of the stationary law.
std::pair<double, double> steady_state(const PathType& pt);

TransitionProbs packet_transition_probs(const PathType& pt, double s_l);

/// Draws the initial state from the stationary law, then alternating
/// exponential sojourns until the cumulative time reaches t.
StatePath sample_state_path(const PathType& pt, double t, RngStream& rng);
void sample_state_path(const PathType& pt, double t, RngStream& rng,
                       StatePath& out);

/// Loss bitmap: bit i set iff the state at epochs[i] is Bad.
/// Epochs must be sorted and within [0, horizon].
std::vector<bool> erasures_at_epochs(const StatePath& sp,
                                     std::span<const double> epochs);

/// Loss count over the even epoch grid i*t/n, i = 0..n-1. Equivalent to
/// erasures_at_epochs on that grid but allocation-free.
int count_losses_on_grid(const StatePath& sp, int n, double t);

}  // namespace pathfec
