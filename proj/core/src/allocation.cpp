#include "pathfec/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pathfec {
namespace {

std::uint64_t pack_key(int n, int m, int j) {
  return (static_cast<std::uint64_t>(n) << 32) |
         (static_cast<std::uint64_t>(m) << 8) | static_cast<std::uint64_t>(j);
}

bool same_type(const PathType& a, const PathType& b) {
  return a.mu_g == b.mu_g && a.mu_b == b.mu_b && a.max_rate_w == b.max_rate_w &&
         a.count == b.count;
}

AllocationResult finish(const TypeEnsemble& te, const Block& blk,
                        std::string method, std::vector<int> counts) {
  AllocationResult r;
  r.method = std::move(method);
  r.alloc.counts = std::move(counts);
  r.alloc.block_n = blk.n;
  r.alloc.loss_budget_m = blk.budget();
  r.pe = exact_pe(r.alloc, te, blk.t);
  return r;
}

// Clamps counts to the per-type caps, pushing overflow to types with slack
// (smallest index first). Throws if the caps cannot carry the block.
void repair_caps(const TypeEnsemble& te, double t, std::vector<int>& counts) {
  const std::size_t j_count = counts.size();
  int overflow = 0;
  std::vector<int> caps(j_count);
  for (std::size_t j = 0; j < j_count; ++j) {
    caps[j] = type_cap(te, j, t);
    if (counts[j] > caps[j]) {
      overflow += counts[j] - caps[j];
      counts[j] = caps[j];
    }
  }
  for (std::size_t j = 0; j < j_count && overflow > 0; ++j) {
    const int take = std::min(overflow, caps[j] - counts[j]);
    counts[j] += take;
    overflow -= take;
  }
  if (overflow > 0)
    throw InfeasibleError("allocation: bandwidth caps cannot carry the block");
}

void require_caps(const TypeEnsemble& te, double t,
                  const std::vector<int>& counts, const char* method) {
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j] > type_cap(te, j, t))
      throw InfeasibleError(std::string(method) + ": type " +
                            std::to_string(j) + " exceeds its bandwidth cap");
}

}  // namespace

int type_cap(const TypeEnsemble& te, std::size_t j, double t) {
  const auto& pt = te.types[j];
  const double cap = std::floor(pt.count * pt.max_rate_w * t + 1e-9);
  // Saturate: effectively uncapped types would overflow int.
  if (cap >= static_cast<double>(std::numeric_limits<int>::max()))
    return std::numeric_limits<int>::max();
  return static_cast<int>(cap);
}

DpLowerbound::DpLowerbound(const TypeEnsemble& te, const Block& blk)
    : te_(te), blk_(blk), cache_(te, blk.n, blk.budget()) {
  blk.validate();
  caps_.resize(te.size());
  for (std::size_t j = 0; j < te.size(); ++j) caps_[j] = type_cap(te, j, blk.t);
}

double DpLowerbound::value(int n, int m, int j) {
  if (m < 0) return 1.0;
  if (j == 1) return cache_.tail(0, n, m);
  return cell(n, m, j).value;
}

const DpLowerbound::Cell& DpLowerbound::cell(int n, int m, int j) {
  const auto key = pack_key(n, m, j);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  Cell best;
  best.value = std::numeric_limits<double>::infinity();
  const int cap = std::min(n, caps_[j - 1]);
  for (int nj = 0; nj <= cap; ++nj) {
    const auto& q = cache_.pmf(j - 1, nj);
    const int ihi = std::min<int>(static_cast<int>(q.size()) - 1, m);
    double val = cache_.tail(j - 1, nj, m);  // i > m: inner cell is 1
    double top = -1;
    int top_i = 0;
    for (int i = 0; i <= ihi; ++i) {
      const double term = q[i] * value(n - nj, m - i, j - 1);
      val += term;
      if (term > top) {
        top = term;
        top_i = i;
      }
    }
    // Loss counts past the budget show up only through the tail; the largest
    // single term there is bounded by the PMF value at i = m + 1.
    if (m + 1 < static_cast<int>(q.size()) && q[m + 1] > top) {
      top = q[m + 1];
      top_i = m + 1;
    }
    if (val < best.value) {
      best.value = val;
      best.argmin_n = nj;
      best.typical_loss = top_i;
    }
  }
  best.value = std::min(best.value, 1.0);
  return memo_.emplace(key, best).first->second;
}

double DpLowerbound::root() {
  return value(blk_.n, blk_.budget(), static_cast<int>(te_.size()));
}

AllocationResult exhaustive_optimal(const TypeEnsemble& te, const Block& blk,
                                    std::uint64_t max_candidates) {
  blk.validate();
  const std::size_t j_count = te.size();
  std::vector<int> caps(j_count);
  long long cap_sum = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    caps[j] = type_cap(te, j, blk.t);
    cap_sum += caps[j];
  }
  if (cap_sum < blk.n)
    throw InfeasibleError("exhaustive_optimal: caps cannot carry the block");

  // Candidate count (without the symmetry restriction) against the guard.
  {
    std::vector<double> ways(blk.n + 1, 0.0);
    ways[0] = 1;
    for (std::size_t j = 0; j < j_count; ++j) {
      std::vector<double> next(blk.n + 1, 0.0);
      for (int s = 0; s <= blk.n; ++s) {
        if (ways[s] == 0) continue;
        for (int c = 0; c <= caps[j] && s + c <= blk.n; ++c)
          next[s + c] += ways[s];
      }
      ways.swap(next);
    }
    if (ways[blk.n] > static_cast<double>(max_candidates))
      throw EnumerationLimitError(
          "exhaustive_optimal: candidate count exceeds the enumeration limit");
  }

  TypePmfCache cache(te, blk.n, blk.budget());
  AllocationVector av;
  av.block_n = blk.n;
  av.loss_budget_m = blk.budget();
  av.counts.assign(j_count, 0);

  double best_pe = std::numeric_limits<double>::infinity();
  std::vector<int> best_counts;
  std::vector<long long> suffix_cap(j_count + 1, 0);
  for (std::size_t j = j_count; j-- > 0;)
    suffix_cap[j] = suffix_cap[j + 1] + caps[j];

  // Lexicographic enumeration; identical adjacent types are forced into
  // nondecreasing counts so each symmetric orbit is visited once, at its
  // lexicographically smallest member.
  auto rec = [&](auto&& self, std::size_t j, int left) -> void {
    if (j == j_count) {
      if (left != 0) return;
      const double pe = exact_pe(av, cache);
      if (pe < best_pe) {
        best_pe = pe;
        best_counts = av.counts;
      }
      return;
    }
    int lo = std::max(0, left - static_cast<int>(suffix_cap[j + 1]));
    if (j > 0 && same_type(te.types[j], te.types[j - 1]))
      lo = std::max(lo, av.counts[j - 1]);
    const int hi = std::min(caps[j], left);
    for (int c = lo; c <= hi; ++c) {
      av.counts[j] = c;
      self(self, j + 1, left - c);
    }
    av.counts[j] = 0;
  };
  rec(rec, 0, blk.n);

  AllocationResult r;
  r.method = "optimal";
  r.alloc = av;
  r.alloc.counts = std::move(best_counts);
  r.pe = best_pe;
  return r;
}

AllocationResult dp_suboptimal(const TypeEnsemble& te, const Block& blk) {
  blk.validate();
  const int j_count = static_cast<int>(te.size());
  DpLowerbound dp(te, blk);
  const double bound = dp.root();

  std::vector<int> counts(j_count, 0);
  std::vector<int> typical(j_count, -1);
  int n = blk.n, m = blk.budget(), j = j_count;
  while (j > 1 && m >= 0) {
    const auto& c = dp.cell(n, m, j);
    counts[j - 1] = c.argmin_n;
    typical[j - 1] = c.typical_loss;
    n -= c.argmin_n;
    m -= c.typical_loss;
    --j;
  }
  if (j == 1) {
    counts[0] = n;
    if (m >= 0) typical[0] = std::min(m, n);
  } else {
    // Budget overshot: spread what is left evenly, remainder on the current
    // type (which the walk has already judged unable to matter).
    for (int i = 0; i < j; ++i) counts[i] = n / j;
    counts[j - 1] += n % j;
  }
  repair_caps(te, blk.t, counts);

  auto r = finish(te, blk, "dp", std::move(counts));
  r.lowerbound = bound;
  r.typical_losses = std::move(typical);
  return r;
}

AllocationResult baseline_equal(const TypeEnsemble& te, const Block& blk) {
  blk.validate();
  const int paths = te.total_paths();
  const int base = blk.n / paths, extra = blk.n % paths;
  std::vector<int> counts(te.size(), 0);
  int rank = 0;
  for (std::size_t j = 0; j < te.size(); ++j) {
    for (int l = 0; l < te.types[j].count; ++l, ++rank)
      counts[j] += base + (rank < extra ? 1 : 0);
  }
  require_caps(te, blk.t, counts, "baseline_equal");
  return finish(te, blk, "equal", std::move(counts));
}

AllocationResult baseline_best_path(const TypeEnsemble& te, const Block& blk) {
  blk.validate();
  const int m = blk.budget();
  std::size_t best_j = 0;
  for (std::size_t j = 1; j < te.size(); ++j)
    if (te.profiles[j].mean() < te.profiles[best_j].mean()) best_j = j;
  if (blk.n > te.types[best_j].max_rate_w * blk.t + 1e-9)
    throw InfeasibleError("baseline_best_path: a single path of type " +
                          std::to_string(best_j) +
                          " cannot carry the whole block");
  const auto q = per_path_pmf(te.types[best_j], blk.n, blk.n / blk.t);
  double pe = 0;
  for (int i = m + 1; i <= blk.n; ++i) pe += q[i];
  AllocationResult r;
  r.method = "best_path";
  r.alloc.counts.assign(te.size(), 0);
  r.alloc.counts[best_j] = blk.n;
  r.alloc.block_n = blk.n;
  r.alloc.loss_budget_m = m;
  r.pe = pe;
  return r;
}

AllocationResult asymptotic_rounded(const TypeEnsemble& te, const Block& blk) {
  blk.validate();
  const double alpha = static_cast<double>(blk.budget()) / blk.n;
  const auto asym = theorem_ii_allocation(te, alpha);
  const std::size_t j_count = te.size();
  std::vector<int> counts(j_count);
  std::vector<std::pair<double, std::size_t>> rem(j_count);
  int assigned = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    const double exact = asym.eta[j] * blk.n;
    counts[j] = static_cast<int>(std::floor(exact));
    assigned += counts[j];
    rem[j] = {exact - counts[j], j};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (int i = 0; i < blk.n - assigned; ++i) ++counts[rem[i].second];
  require_caps(te, blk.t, counts, "asymptotic_rounded");
  return finish(te, blk, "asymptotic", std::move(counts));
}

}  // namespace pathfec
