#include "pathfec/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pathfec {
namespace {

// Loss PMF on one path, truncated at k <= kmax. Conditional tables
// P_g(i,k), P_b(i,k) keyed by the state at the first packet; base case
// P_g(0,0) = P_b(0,0) = 1 (zero packets lose nothing), the n >= 1
// structural zeros fall out of the recursion.
std::vector<double> per_path_pmf_trunc(const PathType& pt, int n, double s_l,
                                       int kmax) {
  if (n < 0) throw std::invalid_argument("per_path_pmf: n must be >= 0");
  const int kcap = std::min(n, kmax);
  if (n == 0) return {1.0};
  const auto tp = packet_transition_probs(pt, s_l);
  std::vector<double> pg(kcap + 1, 0.0), pb(kcap + 1, 0.0);
  std::vector<double> pg_next(kcap + 1), pb_next(kcap + 1);
  pg[0] = 1.0;
  pb[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int khi = std::min(i, kcap);
    for (int k = 0; k <= khi; ++k) {
      pg_next[k] = tp.bg * pb[k] + tp.gg * pg[k];
      pb_next[k] =
          k > 0 ? tp.bb * pb[k - 1] + tp.gb * pg[k - 1] : 0.0;
    }
    pg.swap(pg_next);
    pb.swap(pb_next);
  }
  const double pi_b = pt.pi_b(), pi_g = 1.0 - pi_b;
  std::vector<double> q(kcap + 1);
  for (int k = 0; k <= kcap; ++k) q[k] = pi_g * pg[k] + pi_b * pb[k];
  return q;
}

// Near-uniform split of n over the type's paths, convolved path by path,
// truncated at k <= kmax.
std::vector<double> type_pmf_trunc(const PathType& pt, int n, double t,
                                   int kmax) {
  pt.validate();
  if (n < 0) throw std::invalid_argument("type_pmf: n must be >= 0");
  const int kcap = std::min(n, kmax);
  std::vector<double> acc{1.0};
  if (n == 0) return acc;
  const int paths = pt.count;
  const int base = n / paths;
  const int extra = n % paths;
  // Per-path PMFs only differ between the two split classes.
  for (int cls = 0; cls < 2; ++cls) {
    const int n_l = cls == 0 ? base + 1 : base;
    const int reps = cls == 0 ? extra : paths - extra;
    if (n_l == 0 || reps == 0) continue;
    const auto q = per_path_pmf_trunc(pt, n_l, n_l / t, kmax);
    for (int r = 0; r < reps; ++r) {
      const int out_len =
          std::min<int>(kcap, static_cast<int>(acc.size()) - 1 + n_l) + 1;
      std::vector<double> next(out_len, 0.0);
      for (std::size_t k = 0; k < acc.size(); ++k) {
        if (acc[k] == 0.0) continue;
        const std::size_t ihi =
            std::min<std::size_t>(q.size() - 1, out_len - 1 - k);
        for (std::size_t i = 0; i <= ihi; ++i) next[k + i] += acc[k] * q[i];
      }
      acc.swap(next);
    }
  }
  acc.resize(kcap + 1, 0.0);
  return acc;
}

}  // namespace

std::vector<double> per_path_pmf(const PathType& pt, int n, double s_l) {
  pt.validate();
  return per_path_pmf_trunc(pt, n, s_l, n);
}

LossPmfTable type_pmf(const PathType& pt, int n, double t, int type_index) {
  LossPmfTable table;
  table.type_index = type_index;
  table.n = n;
  table.probs = type_pmf_trunc(pt, n, t, n);
  return table;
}

void AllocationVector::validate(const TypeEnsemble& te) const {
  if (counts.size() != te.size())
    throw std::invalid_argument("AllocationVector: counts size mismatch");
  int sum = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0)
      throw std::invalid_argument("AllocationVector: negative count");
    const double cap =
        std::floor(te.types[j].count * te.types[j].max_rate_w * te.t + 1e-9);
    if (counts[j] > cap)
      throw InfeasibleError("AllocationVector: type " + std::to_string(j) +
                            " exceeds its bandwidth cap");
    sum += counts[j];
  }
  if (sum != block_n)
    throw std::invalid_argument("AllocationVector: counts must sum to N");
  if (loss_budget_m < 0 || loss_budget_m > block_n)
    throw std::invalid_argument("AllocationVector: budget out of range");
}

TypePmfCache::TypePmfCache(const TypeEnsemble& te, int n_max, int kmax)
    : te_(te), kmax_(kmax) {
  pmf_.resize(te.size(), std::vector<std::vector<double>>(n_max + 1));
  tail_.resize(te.size(), std::vector<std::vector<double>>(n_max + 1));
}

void TypePmfCache::ensure(int j, int n) {
  if (!pmf_[j][n].empty() || n == 0) {
    if (pmf_[j][n].empty()) {
      pmf_[j][n] = {1.0};
      tail_[j][n] = {0.0};
    }
    return;
  }
  auto probs = type_pmf_trunc(te_.types[j], n, te_.t, kmax_);
  const int kcap = static_cast<int>(probs.size()) - 1;
  std::vector<double> tails(kcap + 1);
  double cum = 0;
  for (int m = 0; m <= kcap; ++m) {
    cum += probs[m];
    tails[m] = std::max(0.0, 1.0 - cum);
  }
  pmf_[j][n] = std::move(probs);
  tail_[j][n] = std::move(tails);
}

const std::vector<double>& TypePmfCache::pmf(int j, int n) {
  ensure(j, n);
  return pmf_[j][n];
}

double TypePmfCache::tail(int j, int n, int m) {
  if (m < 0) return 1.0;
  if (m >= n) return 0.0;
  ensure(j, n);
  if (m >= static_cast<int>(tail_[j][n].size()))
    throw std::logic_error("TypePmfCache: tail beyond truncation");
  return tail_[j][n][m];
}

double exact_pe(const AllocationVector& av, TypePmfCache& cache) {
  const int m = av.loss_budget_m;
  const int j_count = static_cast<int>(av.counts.size());
  // pe[m'] = P{losses over types 1..j exceed m'}; base is the type-1 tail.
  std::vector<double> pe(m + 1), next(m + 1);
  for (int mm = 0; mm <= m; ++mm) pe[mm] = cache.tail(0, av.counts[0], mm);
  for (int j = 1; j < j_count; ++j) {
    const auto& q = cache.pmf(j, av.counts[j]);
    const int qmax = static_cast<int>(q.size()) - 1;
    for (int mm = 0; mm <= m; ++mm) {
      double acc = cache.tail(j, av.counts[j], mm);  // i > mm: certain failure
      const int ihi = std::min(qmax, mm);
      for (int i = 0; i <= ihi; ++i) acc += q[i] * pe[mm - i];
      next[mm] = std::min(acc, 1.0);
    }
    pe.swap(next);
  }
  return pe[m];
}

double exact_pe(const AllocationVector& av, const TypeEnsemble& te, double t) {
  if (std::abs(t - te.t) > 1e-12)
    throw std::invalid_argument("exact_pe: t disagrees with the ensemble");
  av.validate(te);
  TypePmfCache cache(te, av.block_n, av.loss_budget_m);
  return exact_pe(av, cache);
}

}  // namespace pathfec
