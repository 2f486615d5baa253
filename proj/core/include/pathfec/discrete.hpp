#pragma once

#include <vector>

#include "pathfec/asymptotics.hpp"
#include "pathfec/channel.hpp"

namespace pathfec {

/// Loss-count PMF for the packets a type carries in one block.
struct LossPmfTable {
  int type_index = 0;
  int n = 0;
  std::vector<double> probs;  // probs[k] = Q_j(n, k), k = 0..n
};

/// Integer packet counts per type for one block.
struct AllocationVector {
  std::vector<int> counts;
  int block_n = 0;
  int loss_budget_m = 0;  // N - K_info: tolerable erasures

  void validate(const TypeEnsemble& te) const;
};

/// PMF of losses among n evenly spaced packets on one path at rate s_l,
/// from the two-state transition recursion. Size n+1.
std::vector<double> per_path_pmf(const PathType& pt, int n, double s_l);

/// PMF of losses when n packets are split near-uniformly over the type's
/// count paths (the first Rem(n, L) paths carry one extra packet), each
/// path clocked at its own rate N_l / t.
LossPmfTable type_pmf(const PathType& pt, int n, double t, int type_index = 0);

/// Caches per-(type, n) loss PMFs truncated at k <= kmax; entries above the
/// truncation are summarized by the tail. Shared across allocation
/// candidates so PMFs are built once.
class TypePmfCache {
 public:
  TypePmfCache(const TypeEnsemble& te, int n_max, int kmax);

  /// Q_j(n, k) for k = 0..min(n, kmax).
  const std::vector<double>& pmf(int j, int n);

  /// P{losses > m} for n packets on type j; m may exceed kmax only if
  /// m >= n (then 0).
  double tail(int j, int n, int m);

 private:
  const TypeEnsemble& te_;
  int kmax_;
  std::vector<std::vector<std::vector<double>>> pmf_;   // [j][n] -> probs
  std::vector<std::vector<std::vector<double>>> tail_;  // [j][n] -> tail(m)
  void ensure(int j, int n);
};

/// Exact irrecoverable-loss probability P{total losses > loss_budget_m}
/// for the allocation, via the per-type convolution recursion.
double exact_pe(const AllocationVector& av, const TypeEnsemble& te, double t);
double exact_pe(const AllocationVector& av, TypePmfCache& cache);

}  // namespace pathfec
