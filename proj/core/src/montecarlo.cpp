#include "pathfec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathfec {
namespace {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double betacf(double a, double b, double x) {
  constexpr double eps = 1e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double inc_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double lbeta =
      std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1) / (a + b + 2)) return front * betacf(a, b, x) / a;
  return 1 - front * betacf(b, a, 1 - x) / b;
}

double inc_beta_inv(double a, double b, double p) {
  double lo = 0, hi = 1;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inc_beta(a, b, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> proportion_ci(std::uint64_t failures,
                                        std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double f = static_cast<double>(failures);
  if (failures >= 30 && trials - failures >= 30) {
    const double p = f / n;
    const double half = 1.959963984540054 * std::sqrt(p * (1 - p) / n);
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
  }
  const double lo =
      failures == 0 ? 0.0 : inc_beta_inv(f, n - f + 1, 0.025);
  const double hi =
      failures == trials ? 1.0 : inc_beta_inv(f + 1, n - f, 0.975);
  return {lo, hi};
}

namespace {

// Per-path packet counts, flattened in type order; zero-load paths are
// skipped entirely.
struct Loaded {
  const PathType* pt;
  int n_l;
};

std::vector<Loaded> loaded_paths(const TypeEnsemble& te,
                                 const AllocationVector& av) {
  std::vector<Loaded> loaded;
  for (std::size_t j = 0; j < te.size(); ++j) {
    const int n_j = av.counts[j];
    if (n_j == 0) continue;
    const int paths = te.types[j].count;
    const int base = n_j / paths, extra = n_j % paths;
    for (int l = 0; l < paths; ++l) {
      const int n_l = base + (l < extra ? 1 : 0);
      if (n_l > 0) loaded.push_back({&te.types[j], n_l});
    }
  }
  return loaded;
}

bool trial_fails(const std::vector<Loaded>& loaded, double t, int m,
                 std::uint64_t seed, std::uint64_t index, StatePath& sp) {
  auto rng = RngStream::substream(seed, index);
  int losses = 0;
  for (const auto& lp : loaded) {
    sample_state_path(*lp.pt, t, rng, sp);
    losses += count_losses_on_grid(sp, lp.n_l, t);
    if (losses > m) return true;  // the remaining paths cannot undo a failure
  }
  return false;
}

}  // namespace

McReport estimate_pe(const TypeEnsemble& te, const AllocationVector& av,
                     const McOptions& opt) {
  av.validate(te);
  const auto loaded = loaded_paths(te, av);
  const int m = av.loss_budget_m;

  McReport rep;
  rep.seed = opt.seed;
  StatePath sp;
  for (std::uint64_t i = 0; i < opt.trials; ++i) {
    ++rep.trials;
    if (trial_fails(loaded, te.t, m, opt.seed, i, sp)) {
      ++rep.failures;
      if (opt.stop_after_failures && rep.failures >= opt.stop_after_failures)
        break;
    }
  }
  rep.pe_hat =
      rep.trials ? static_cast<double>(rep.failures) / rep.trials : 0.0;
  std::tie(rep.ci_low, rep.ci_high) = proportion_ci(rep.failures, rep.trials);
  return rep;
}

AdaptiveReport estimate_pe_adaptive(const TypeEnsemble& te,
                                    const AllocationVector& av,
                                    std::uint64_t seed,
                                    std::uint64_t max_trials,
                                    double rel_halfwidth) {
  av.validate(te);
  const auto loaded = loaded_paths(te, av);
  const int m = av.loss_budget_m;

  AdaptiveReport out;
  auto& rep = out.report;
  rep.seed = seed;
  StatePath sp;
  std::uint64_t chunk = 4096;
  bool converged = false;
  while (rep.trials < max_trials) {
    const std::uint64_t upto = std::min(max_trials, rep.trials + chunk);
    for (std::uint64_t i = rep.trials; i < upto; ++i)
      if (trial_fails(loaded, te.t, m, seed, i, sp)) ++rep.failures;
    rep.trials = upto;
    rep.pe_hat = static_cast<double>(rep.failures) / rep.trials;
    std::tie(rep.ci_low, rep.ci_high) =
        proportion_ci(rep.failures, rep.trials);
    if (rep.failures > 0 &&
        0.5 * (rep.ci_high - rep.ci_low) <= rel_halfwidth * rep.pe_hat) {
      converged = true;
      break;
    }
    chunk *= 2;
  }
  out.low_confidence = !converged;
  return out;
}

double fit_log_slope(std::span<const double> xs, std::span<const double> pes) {
  if (xs.size() != pes.size())
    throw std::invalid_argument("fit_log_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(pes[i] > 0)) continue;
    const double y = std::log(pes[i]);
    sx += xs[i];
    sy += y;
    sxx += xs[i] * xs[i];
    sxy += xs[i] * y;
    ++n;
  }
  if (n < 3)
    throw std::invalid_argument("fit_log_slope: need at least three points");
  const double denom = n * sxx - sx * sx;
  if (denom == 0)
    throw std::invalid_argument("fit_log_slope: degenerate abscissa");
  return std::abs((n * sxy - sx * sy) / denom);
}

}  // namespace pathfec
