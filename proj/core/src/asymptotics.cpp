#include "pathfec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pathfec {
namespace {

constexpr double kLambdaMax = 1e8;

// Bisection on a strictly increasing f over [lo, hi] with f(lo) < target
// < f(hi). Tolerance is on the function value.
template <typename F>
double bisect_increasing(F f, double lo, double hi, double target,
                         double ftol) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v - target) <= ftol && hi - lo <= 1e-9 * (1 + std::abs(mid)))
      return mid;
    (v < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::optional<double> RateFunction::solve_lambda(double alpha) const {
  if (!(alpha > 0) || !(alpha < 1))
    throw std::domain_error("solve_lambda: alpha must lie in (0,1)");
  if (alpha <= mean_) return std::nullopt;
  auto v = [&](double l) { return profile_.tilted(l).tilted_mean; };
  double lo = 0, hi = 1;
  while (v(hi) < alpha) {
    lo = hi;
    hi *= 2;
    if (hi > kLambdaMax)
      throw std::range_error(
          "solve_lambda: tilt bracket escaped (alpha too close to 1)");
  }
  return bisect_increasing(v, lo, hi, alpha, 1e-10);
}

double RateFunction::rate_u(double alpha) const {
  const auto lambda = solve_lambda(alpha);
  if (!lambda) return 0.0;
  return *lambda * alpha - profile_.tilted(*lambda).log_mgf;
}

TypeEnsemble TypeEnsemble::build(std::vector<PathType> types, double t) {
  if (types.empty())
    throw std::invalid_argument("TypeEnsemble: needs at least one type");
  TypeEnsemble te;
  te.t = t;
  int total = 0;
  for (const auto& pt : types) {
    pt.validate();
    total += pt.count;
  }
  te.gammas.reserve(types.size());
  te.profiles.reserve(types.size());
  for (const auto& pt : types) {
    te.gammas.push_back(static_cast<double>(pt.count) / total);
    te.profiles.push_back(ErasureProfile::build(pt, t));
  }
  te.types = std::move(types);
  return te;
}

int TypeEnsemble::total_paths() const {
  int total = 0;
  for (const auto& pt : types) total += pt.count;
  return total;
}

double single_path_pe(const PathType& pt, double t, double alpha) {
  pt.validate();
  if (!(alpha > 0) || !(alpha < 1))
    throw std::domain_error("single_path_pe: alpha must lie in (0,1)");
  const double c = pt.mu_b * t;
  return pt.pi_b() * std::exp(-c * alpha) * (1.0 + c * (1.0 - alpha));
}

double allocation_exponent(const TypeEnsemble& te, std::span<const double> eta,
                           double alpha) {
  const std::size_t j_count = te.size();
  if (eta.size() != j_count)
    throw std::invalid_argument("allocation_exponent: eta size mismatch");
  double sum = 0;
  for (double e : eta) {
    if (e < -1e-12)
      throw std::invalid_argument("allocation_exponent: eta must be >= 0");
    sum += e;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("allocation_exponent: eta must sum to 1");

  // Types with eta_j = 0 contribute nothing and are excluded from the
  // nu-equation (beta_j/eta_j is undefined at 0).
  std::vector<std::size_t> active;
  double mean_mix = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    if (eta[j] > 0) {
      active.push_back(j);
      mean_mix += eta[j] * te.profiles[j].mean();
    }
  }
  if (mean_mix >= alpha) return 0.0;  // typical-loss set already empty

  auto mix_tilted_mean = [&](double nu) {
    double s = 0;
    for (std::size_t j : active)
      s += eta[j] * te.profiles[j].tilted(nu * eta[j] / te.gammas[j]).tilted_mean;
    return s;
  };
  double lo = 0, hi = 1;
  while (mix_tilted_mean(hi) < alpha) {
    lo = hi;
    hi *= 2;
    if (hi > kLambdaMax)
      throw std::range_error("allocation_exponent: nu bracket escaped");
  }
  const double nu = bisect_increasing(mix_tilted_mean, lo, hi, alpha, 1e-12);

  // At the minimizing beta*, the per-type tilt is exactly nu*eta_j/gamma_j,
  // so u_j(beta*_j/eta_j) = lambda_j v_j(lambda_j) - log mgf_j(lambda_j).
  double exponent = 0;
  for (std::size_t j : active) {
    const double lambda_j = nu * eta[j] / te.gammas[j];
    const auto tm = te.profiles[j].tilted(lambda_j);
    if (tm.tilted_mean > te.profiles[j].mean())
      exponent +=
          te.gammas[j] * (lambda_j * tm.tilted_mean - tm.log_mgf);
  }
  return std::max(exponent, 0.0);
}

AsymptoticAllocation theorem_ii_allocation(const TypeEnsemble& te,
                                           double alpha) {
  if (!(alpha > 0) || !(alpha < 1))
    throw std::domain_error("theorem_ii_allocation: alpha must lie in (0,1)");
  const std::size_t j_count = te.size();
  AsymptoticAllocation out;
  out.eta.assign(j_count, 0.0);
  double weight_sum = 0;
  std::vector<double> weights(j_count, 0.0);
  for (std::size_t j = 0; j < j_count; ++j) {
    RateFunction rf(te.profiles[j]);
    if (alpha > rf.mean()) {
      weights[j] = te.gammas[j] * *rf.solve_lambda(alpha);
      weight_sum += weights[j];
      out.exponent += te.gammas[j] * rf.rate_u(alpha);
    }
  }
  if (weight_sum <= 0) {
    // No type passes the quality test; any allocation gives exponent 0.
    out.eta = te.gammas;
    out.exponent = 0;
    out.zero_exponent = true;
    return out;
  }
  for (std::size_t j = 0; j < j_count; ++j) out.eta[j] = weights[j] / weight_sum;
  return out;
}

std::vector<double> waterfill_allocation(const TypeEnsemble& te, double alpha,
                                         double n0, double t) {
  (void)alpha;
  const std::size_t j_count = te.size();
  for (std::size_t j = 1; j < j_count; ++j)
    if (!te.profiles[j].same_shape(te.profiles[0], 1e-9))
      throw std::invalid_argument(
          "waterfill_allocation: types must share one erasure profile");
  std::vector<double> caps(j_count);
  double cap_sum = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    caps[j] = te.gammas[j] * te.types[j].max_rate_w * t / n0;
    cap_sum += caps[j];
  }
  if (cap_sum < 1.0 - 1e-12)
    throw InfeasibleError(
        "waterfill_allocation: bandwidth caps cannot carry the block");

  auto filled = [&](double level) {
    double s = 0;
    for (std::size_t j = 0; j < j_count; ++j)
      s += std::min(caps[j], te.gammas[j] * level);
    return s;
  };
  double lo = 0, hi = 1;
  while (filled(hi) < 1.0) hi *= 2;
  const double level = bisect_increasing(filled, lo, hi, 1.0, 1e-14);
  std::vector<double> eta(j_count);
  double s = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    eta[j] = std::min(caps[j], te.gammas[j] * level);
    s += eta[j];
  }
  for (auto& e : eta) e /= s;  // absorb the bisection residual
  return eta;
}

std::pair<double, double> ml_error_bounds(double pe, double q) {
  if (pe < 0 || pe > 1)
    throw std::domain_error("ml_error_bounds: pe must lie in [0,1]");
  if (q < 2) throw std::domain_error("ml_error_bounds: field size must be >= 2");
  return {pe * (1.0 - 1.0 / q), pe};
}

}  // namespace pathfec
