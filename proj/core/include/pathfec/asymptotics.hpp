#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pathfec/burst_profile.hpp"

namespace pathfec {

/// Chernoff rate function of one path type: the decay exponent of the
/// irrecoverable-loss probability per additional path.
class RateFunction {
 public:
  explicit RateFunction(ErasureProfile profile)
      : profile_(profile), mean_(profile.mean()) {}

  const ErasureProfile& profile() const { return profile_; }
  double mean() const { return mean_; }

  /// Solves E{x e^{lx}}/E{e^{lx}} = alpha for the tilt l(alpha).
  /// nullopt for alpha <= E{x} (the exponent is 0 there and the tilt is
  /// not needed); throws std::domain_error for alpha outside (0,1) and
  /// std::range_error if the monotone bracket escapes (alpha -> 1).
  std::optional<double> solve_lambda(double alpha) const;

  /// u(alpha) = l*alpha - log E{e^{l x}}; 0 for alpha <= E{x}.
  double rate_u(double alpha) const;

 private:
  ErasureProfile profile_;
  double mean_;
};

/// J path types plus their mixture fractions gamma_j = L_j / L.
struct TypeEnsemble {
  std::vector<PathType> types;
  std::vector<double> gammas;
  std::vector<ErasureProfile> profiles;
  double t = 0;  // block duration, seconds

  static TypeEnsemble build(std::vector<PathType> types, double t);
  int total_paths() const;
  std::size_t size() const { return types.size(); }
};

/// Closed-form single-path irrecoverable-loss probability
/// pi_b e^{-mu_b alpha T} (1 + mu_b (1-alpha) T).
double single_path_pe(const PathType& pt, double t, double alpha);

/// Decay exponent (per path) of P_E for a fixed allocation fraction vector
/// eta over the ensemble. 0 when the allocation already satisfies the
/// quality constraint on average.
double allocation_exponent(const TypeEnsemble& te, std::span<const double> eta,
                           double alpha);

struct AsymptoticAllocation {
  std::vector<double> eta;
  double exponent = 0;
  /// True when no type satisfies alpha > E{x_j}; eta is then the
  /// proportional vector gamma and the exponent is 0.
  bool zero_exponent = false;
};

/// Closed-form asymptotically optimal allocation: eta*_j proportional to
/// gamma_j l_j(alpha) over qualifying types, 0 elsewhere.
AsymptoticAllocation theorem_ii_allocation(const TypeEnsemble& te,
                                           double alpha);

/// Cap-constrained allocation for identically distributed types:
/// eta_j = min(gamma_j W_j t / n0, gamma_j Y) with Y chosen so the fractions
/// sum to 1. Throws InfeasibleError when the caps cannot carry a block.
std::vector<double> waterfill_allocation(const TypeEnsemble& te, double alpha,
                                         double n0, double t);

/// (pe(1 - 1/q), pe): ML-decoding error bounds from the irrecoverable-loss
/// probability over a field of size q.
std::pair<double, double> ml_error_bounds(double pe, double q);

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pathfec
