#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathfec/discrete.hpp"

namespace pathfec {

/// One FEC block: n coded packets carrying k_info information packets,
/// transmitted over a window of t seconds.
struct Block {
  int n = 0;
  int k_info = 0;
  double t = 0;

  int budget() const { return n - k_info; }  // tolerable erasures
  bool operator==(const Block&) const = default;

  void validate() const {
    if (n < 1 || k_info < 1 || k_info > n)
      throw std::invalid_argument("Block: need 1 <= k_info <= n");
    if (!(t > 0)) throw std::invalid_argument("Block: t must be > 0");
  }
};

struct AllocationResult {
  std::string method;
  AllocationVector alloc;
  double pe = 0;  // irrecoverable-loss probability of the allocation
  std::optional<double> lowerbound;  // dp method only
  std::vector<int> typical_losses;   // dp method only, -1 where undefined
};

struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lazy memo over the lowerbound recursion
///   hat(n, m, j) = min_{n_j} sum_i Q_j(n_j, i) hat(n - n_j, m - i, j - 1),
/// with hat = 1 for m < 0 and the plain tail at j = 1 (the same boundary the
/// exact recursion uses, which is what makes hat a true lower bound). Cells
/// also keep the minimizing n_j and the dominant loss count, which is all
/// the suboptimal allocation algorithm needs.
class DpLowerbound {
 public:
  struct Cell {
    double value = 1;
    int argmin_n = 0;    // minimizing n_j, smallest on ties
    int typical_loss = 0;  // argmax_i of the winning sum's terms
  };

  DpLowerbound(const TypeEnsemble& te, const Block& blk);

  /// hat(n, m, j); j counts types 1..j (1-based).
  double value(int n, int m, int j);
  const Cell& cell(int n, int m, int j);  // j >= 2, m >= 1 only
  double root();

  TypePmfCache& cache() { return cache_; }

 private:
  const TypeEnsemble& te_;
  Block blk_;
  TypePmfCache cache_;
  std::vector<int> caps_;
  std::unordered_map<std::uint64_t, Cell> memo_;
};

/// Integer bandwidth cap of type j: floor(L_j W_j t) packets per block.
int type_cap(const TypeEnsemble& te, std::size_t j, double t);

/// Minimizes the exact loss probability over every cap-feasible split of
/// blk.n across types. Ties go to the lexicographically smallest vector;
/// identical types are restricted to nondecreasing counts. Throws
/// EnumerationLimitError if the candidate count exceeds max_candidates and
/// InfeasibleError if the caps cannot carry the block.
AllocationResult exhaustive_optimal(const TypeEnsemble& te, const Block& blk,
                                    std::uint64_t max_candidates = 10'000'000);

/// Greedy descent through the lowerbound recursion: peel off the minimizing
/// n_j and its dominant loss count type by type, then spread any leftover
/// packets evenly over the remaining types.
AllocationResult dp_suboptimal(const TypeEnsemble& te, const Block& blk);

/// Packets split near-uniformly over all paths regardless of quality.
AllocationResult baseline_equal(const TypeEnsemble& te, const Block& blk);

/// Whole block on one physical path of the most reliable type; the other
/// paths stay idle. The probability comes from that single path's PMF.
AllocationResult baseline_best_path(const TypeEnsemble& te, const Block& blk);

/// eta* from the closed-form asymptotic allocation, rounded to integers by
/// largest remainder, with cap overflow pushed onto types with slack.
AllocationResult asymptotic_rounded(const TypeEnsemble& te, const Block& blk);

}  // namespace pathfec
