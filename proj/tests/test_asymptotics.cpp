#include <cmath>

#include "doctest.h"
#include "pathfec/asymptotics.hpp"
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

}  // namespace

TEST_CASE("rate function reproduces the frozen oracle values") {
  // Independent scipy oracle (brentq on the tilted mean + quadrature MGF)
  // for pi_b = 0.015, mu_g*T = 0.2.
  RateFunction rf(ErasureProfile::build(make_type(0.015, 0.2), kT));
  CHECK(*rf.solve_lambda(0.1) ==
        doctest::Approx(10.01364777718299).epsilon(1e-9));
  CHECK(rf.rate_u(0.1) == doctest::Approx(0.6062076944692496).epsilon(1e-9));
  CHECK(rf.rate_u(0.15) == doctest::Approx(1.14386387593155).epsilon(1e-9));
  CHECK(rf.rate_u(0.2) == doctest::Approx(1.7372647236906196).epsilon(1e-9));

  RateFunction rf2(ErasureProfile::build(make_type(0.025, 0.2), kT));
  CHECK(*rf2.solve_lambda(0.1) ==
        doctest::Approx(5.29708942312204).epsilon(1e-9));
  CHECK(rf2.rate_u(0.1) == doctest::Approx(0.2597722075354641).epsilon(1e-9));
}

TEST_CASE("rate function is zero at and below the mean") {
  RateFunction rf(ErasureProfile::build(make_type(0.015, 0.2), kT));
  CHECK(rf.rate_u(rf.mean()) == 0.0);
  CHECK(rf.rate_u(rf.mean() / 2) == 0.0);
  CHECK_FALSE(rf.solve_lambda(0.01).has_value());
  CHECK_THROWS_AS(rf.rate_u(0.0), std::domain_error);
  CHECK_THROWS_AS(rf.rate_u(1.0), std::domain_error);
}

TEST_CASE("rate function is convex and increasing above the mean") {
  RateFunction rf(ErasureProfile::build(make_type(0.015, 0.2), kT));
  double prev = 0, prev_diff = 0;
  bool first = true;
  for (double a = 0.05; a <= 0.85; a += 0.05) {
    const double u = rf.rate_u(a);
    if (!first) {
      const double diff = u - prev;
      CHECK(diff >= 0);
      CHECK(diff >= prev_diff - 1e-9);  // nondecreasing increments
      prev_diff = diff;
    }
    prev = u;
    first = false;
  }
}

TEST_CASE("Legendre duality: u(alpha) is the sup over lambda") {
  const auto ep = ErasureProfile::build(make_type(0.015, 0.2), kT);
  RateFunction rf(ep);
  const double alpha = 0.12;
  const double u = rf.rate_u(alpha);
  for (double l = 0.5; l < 40; l += 1.7) {
    CHECK(u >= l * alpha - ep.tilted(l).log_mgf - 1e-10);
  }
}

TEST_CASE("single-path closed form") {
  const auto pt = make_type(0.015, 0.2);
  const double alpha = 0.1, c = pt.mu_b * kT;
  const double want =
      pt.pi_b() * std::exp(-c * alpha) * (1.0 + c * (1.0 - alpha));
  CHECK(single_path_pe(pt, kT, alpha) == doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS_AS(single_path_pe(pt, kT, 0.0), std::domain_error);
}

TEST_CASE("two-type closed-form allocation matches the frozen oracle") {
  const auto te = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.025, 0.2, 2)}, kT);
  const auto asym = theorem_ii_allocation(te, 0.1);
  CHECK_FALSE(asym.zero_exponent);
  CHECK(asym.eta[0] ==
        doctest::Approx(0.48591479150933026).epsilon(1e-9));
  CHECK(asym.eta[0] + asym.eta[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(asym.exponent ==
        doctest::Approx(0.37525070318005926).epsilon(1e-9));
}

TEST_CASE("identical types get the proportional allocation") {
  const auto te = TypeEnsemble::build(
      {make_type(0.02, 0.2, 3), make_type(0.02, 0.2, 1)}, kT);
  const auto asym = theorem_ii_allocation(te, 0.1);
  CHECK(asym.eta[0] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(asym.eta[1] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("types failing the quality test get zero") {
  // Second type has mean above alpha, so it must be shut off.
  const auto te = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.2, 0.2, 1)}, kT);
  const auto asym = theorem_ii_allocation(te, 0.1);
  CHECK(asym.eta[1] == 0.0);
  CHECK(asym.eta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(asym.exponent > 0);
}

TEST_CASE("no qualifying type flags a zero exponent") {
  const auto te = TypeEnsemble::build(
      {make_type(0.3, 0.2, 1), make_type(0.25, 0.2, 1)}, kT);
  const auto asym = theorem_ii_allocation(te, 0.05);
  CHECK(asym.zero_exponent);
  CHECK(asym.exponent == 0.0);
  CHECK(asym.eta == te.gammas);
}

TEST_CASE("allocation_exponent at eta* equals the closed-form exponent") {
  const auto te = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.025, 0.2, 2)}, kT);
  const auto asym = theorem_ii_allocation(te, 0.1);
  CHECK(allocation_exponent(te, asym.eta, 0.1) ==
        doctest::Approx(asym.exponent).epsilon(1e-7));
}

TEST_CASE("eta* dominates random simplex points") {
  const auto te = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.025, 0.2, 2),
       make_type(0.02, 0.25, 1)},
      kT);
  const double alpha = 0.1;
  const auto asym = theorem_ii_allocation(te, alpha);
  const double star = allocation_exponent(te, asym.eta, alpha);
  RngStream rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    double e[3], sum = 0;
    for (double& v : e) sum += v = rng.exponential(1.0);
    std::vector<double> eta{e[0] / sum, e[1] / sum, e[2] / sum};
    CHECK(allocation_exponent(te, eta, alpha) <= star + 1e-8);
  }
}

TEST_CASE("allocation_exponent validates the simplex") {
  const auto te = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.025, 0.2, 1)}, kT);
  std::vector<double> bad{0.7, 0.7};
  CHECK_THROWS_AS(allocation_exponent(te, bad, 0.1), std::invalid_argument);
  std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(allocation_exponent(te, neg, 0.1), std::invalid_argument);
}

TEST_CASE("water-filling reproduces the hand oracle") {
  // Four equal-gamma identical types whose caps allow fractions
  // {0.1, 0.2, 0.4, 0.8} of the block: the level settles at gamma*Y = 0.35.
  const double n0 = 20;
  const double caps[] = {0.1, 0.2, 0.4, 0.8};
  std::vector<PathType> pts;
  for (double cap : caps) {
    auto pt = make_type(0.015, 0.2, 1);
    pt.max_rate_w = cap * n0 / (0.25 * kT);
    pts.push_back(pt);
  }
  const auto te = TypeEnsemble::build(std::move(pts), kT);
  const auto eta = waterfill_allocation(te, 0.1, n0, kT);
  CHECK(eta[0] == doctest::Approx(0.10).epsilon(1e-9));
  CHECK(eta[1] == doctest::Approx(0.20).epsilon(1e-9));
  CHECK(eta[2] == doctest::Approx(0.35).epsilon(1e-9));
  CHECK(eta[3] == doctest::Approx(0.35).epsilon(1e-9));
  double sum = 0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    sum += eta[j];
    CHECK(eta[j] <=
          te.gammas[j] * te.types[j].max_rate_w * kT / n0 + 1e-12);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("water-filling rejects infeasible caps and mixed profiles") {
  auto tight = make_type(0.015, 0.2, 1);
  tight.max_rate_w = 30.0;  // one path, 6 packets per block, n0 = 20
  const auto te = TypeEnsemble::build({tight}, kT);
  CHECK_THROWS_AS(waterfill_allocation(te, 0.1, 20.0, kT), InfeasibleError);

  const auto mixed = TypeEnsemble::build(
      {make_type(0.015, 0.2, 1), make_type(0.025, 0.2, 1)}, kT);
  CHECK_THROWS_AS(waterfill_allocation(mixed, 0.1, 1.0, kT),
                  std::invalid_argument);
}

TEST_CASE("ML decoding error bounds") {
  const auto [lo, hi] = ml_error_bounds(0.02, 256.0);
  CHECK(lo == doctest::Approx(0.02 * (1.0 - 1.0 / 256.0)).epsilon(1e-15));
  CHECK(hi == 0.02);
  CHECK_THROWS_AS(ml_error_bounds(-0.1, 4.0), std::domain_error);
  CHECK_THROWS_AS(ml_error_bounds(0.1, 1.0), std::domain_error);
}
