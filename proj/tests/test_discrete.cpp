#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "pathfec/discrete.hpp"
#include "pathfec/rng.hpp"

using namespace pathfec;

namespace {

constexpr double kT = 0.2;

PathType make_type(double pi_b, double mu_g_t, int count = 1,
                   double w = 1e6) {
  PathType pt;
  pt.mu_g = mu_g_t / kT;
  pt.mu_b = pt.mu_g * (1.0 - pi_b) / pi_b;
  pt.max_rate_w = w;
  pt.count = count;
  return pt;
}

// Independent oracle: enumerate all 2^n state sequences of the per-packet
// Markov chain, accumulating the loss-count law directly.
std::vector<double> brute_path_pmf(const PathType& pt, int n, double s_l) {
  std::vector<double> pmf(n + 1, 0.0);
  if (n == 0) {
    pmf[0] = 1;
    return pmf;
  }
  const auto tp = packet_transition_probs(pt, s_l);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double p = (mask & 1u) ? pt.pi_b() : pt.pi_g();
    int losses = (mask & 1u) ? 1 : 0;
    for (int i = 1; i < n; ++i) {
      const bool prev = mask & (1u << (i - 1)), cur = mask & (1u << i);
      p *= prev ? (cur ? tp.bb : tp.gb) : (cur ? tp.bg : tp.gg);
      losses += cur ? 1 : 0;
    }
    pmf[losses] += p;
  }
  return pmf;
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Independent oracle for the block failure probability: full convolution of
// the per-type PMFs, then one tail sum.
double brute_pe(const AllocationVector& av, const TypeEnsemble& te) {
  std::vector<double> total{1.0};
  for (std::size_t j = 0; j < te.size(); ++j)
    total = convolve(total, type_pmf(te.types[j], av.counts[j], te.t).probs);
  double pe = 0;
  for (std::size_t k = av.loss_budget_m + 1; k < total.size(); ++k)
    pe += total[k];
  return pe;
}

}  // namespace

TEST_CASE("per-path PMF normalizes and matches hand base cases") {
  const auto pt = make_type(0.015, 0.2);
  for (int n : {1, 2, 7, 40, 200}) {
    const auto q = per_path_pmf(pt, n, n / kT);
    REQUIRE(static_cast<int>(q.size()) == n + 1);
    CHECK(std::accumulate(q.begin(), q.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    for (double v : q) CHECK(v >= 0);
  }
  const auto q1 = per_path_pmf(pt, 1, 5.0);
  CHECK(q1[1] == doctest::Approx(pt.pi_b()).epsilon(1e-14));

  const auto tp = packet_transition_probs(pt, 10.0);
  const auto q2 = per_path_pmf(pt, 2, 10.0);
  CHECK(q2[0] == doctest::Approx(pt.pi_g() * tp.gg).epsilon(1e-14));
  CHECK(q2[2] == doctest::Approx(pt.pi_b() * tp.bb).epsilon(1e-14));
  CHECK(q2[1] == doctest::Approx(pt.pi_g() * tp.bg + pt.pi_b() * tp.gb)
                     .epsilon(1e-14));
}

TEST_CASE("per-path PMF equals the 2^n state-sequence oracle") {
  for (double pi_b : {0.02, 0.1}) {
    const auto pt = make_type(pi_b, 0.25);
    for (int n : {1, 3, 6, 9}) {
      const double s_l = n / kT;
      const auto got = per_path_pmf(pt, n, s_l);
      const auto want = brute_path_pmf(pt, n, s_l);
      for (int k = 0; k <= n; ++k)
        CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("type PMF is the convolution of its per-path PMFs") {
  const auto pt = make_type(0.03, 0.2, 3);
  const int n = 11;  // 3 paths: splits 4, 4, 3
  const auto table = type_pmf(pt, n, kT);
  CHECK(table.n == n);
  std::vector<double> want{1.0};
  want = convolve(want, per_path_pmf(pt, 4, 4 / kT));
  want = convolve(want, per_path_pmf(pt, 4, 4 / kT));
  want = convolve(want, per_path_pmf(pt, 3, 3 / kT));
  REQUIRE(table.probs.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k)
    CHECK(table.probs[k] == doctest::Approx(want[k]).epsilon(1e-12));
  CHECK(std::accumulate(table.probs.begin(), table.probs.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cache truncation keeps the exact PMF prefix and tails") {
  const auto te = TypeEnsemble::build({make_type(0.02, 0.2, 2)}, kT);
  const int n = 16, kmax = 4;
  TypePmfCache cache(te, n, kmax);
  const auto& trunc = cache.pmf(0, n);
  const auto full = type_pmf(te.types[0], n, kT).probs;
  REQUIRE(static_cast<int>(trunc.size()) == kmax + 1);
  for (int k = 0; k <= kmax; ++k)
    CHECK(trunc[k] == doctest::Approx(full[k]).epsilon(1e-12));
  double tail = 0;
  for (int k = kmax; k >= 0; --k) {
    tail = 0;
    for (std::size_t i = k + 1; i < full.size(); ++i) tail += full[i];
    CHECK(cache.tail(0, n, k) == doctest::Approx(tail).epsilon(1e-12));
  }
  CHECK(cache.tail(0, n, -1) == 1.0);
  CHECK(cache.tail(0, n, n) == 0.0);
}

TEST_CASE("exact_pe equals the full-convolution oracle on random instances") {
  RngStream rng(321);
  for (int rep = 0; rep < 40; ++rep) {
    const int j_count = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<PathType> pts;
    for (int j = 0; j < j_count; ++j)
      pts.push_back(make_type(0.01 + 0.08 * rng.uniform(),
                              0.1 + 0.3 * rng.uniform(),
                              1 + static_cast<int>(rng.next_u64() % 4)));
    const auto te = TypeEnsemble::build(std::move(pts), kT);
    const int n = 2 + static_cast<int>(rng.next_u64() % 11);
    AllocationVector av;
    av.block_n = n;
    av.counts.assign(j_count, 0);
    for (int p = 0; p < n; ++p)
      ++av.counts[rng.next_u64() % j_count];
    av.loss_budget_m = 1 + static_cast<int>(rng.next_u64() % n);
    CHECK(exact_pe(av, te, kT) ==
          doctest::Approx(brute_pe(av, te)).epsilon(1e-12));
  }
}

TEST_CASE("exact_pe boundary budgets") {
  const auto te = TypeEnsemble::build(
      {make_type(0.02, 0.2, 1), make_type(0.04, 0.2, 1)}, kT);
  AllocationVector av;
  av.counts = {3, 3};
  av.block_n = 6;
  av.loss_budget_m = 6;  // more than N losses is impossible
  CHECK(exact_pe(av, te, kT) == 0.0);
  av.loss_budget_m = 0;
  CHECK(exact_pe(av, te, kT) ==
        doctest::Approx(brute_pe(av, te)).epsilon(1e-12));
}

TEST_CASE("AllocationVector validation") {
  const auto te =
      TypeEnsemble::build({make_type(0.02, 0.2, 1, 50.0)}, kT);  // cap 10
  AllocationVector av;
  av.counts = {8};
  av.block_n = 8;
  av.loss_budget_m = 2;
  CHECK_NOTHROW(av.validate(te));
  av.counts = {11};
  av.block_n = 11;
  CHECK_THROWS_AS(av.validate(te), InfeasibleError);
  av.counts = {4};
  CHECK_THROWS_AS(av.validate(te), std::invalid_argument);  // sum mismatch
  av.counts = {8};
  av.block_n = 8;
  av.loss_budget_m = 9;
  CHECK_THROWS_AS(av.validate(te), std::invalid_argument);
}
