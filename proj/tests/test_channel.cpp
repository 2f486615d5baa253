#include <cmath>

#include "doctest.h"
#include "pathfec/channel.hpp"

using namespace pathfec;

namespace {

PathType make_type(double mu_g, double mu_b, double w = 1e6, int count = 1) {
  PathType pt;
  pt.mu_g = mu_g;
  pt.mu_b = mu_b;
  pt.max_rate_w = w;
  pt.count = count;
  return pt;
}

}  // namespace

TEST_CASE("steady state matches the rate ratio") {
  const auto pt = make_type(1.0, 65.0);
  const auto [pi_g, pi_b] = steady_state(pt);
  CHECK(pi_b == doctest::Approx(1.0 / 66.0).epsilon(1e-14));
  CHECK(pi_g + pi_b == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pt.pi_b() == pi_b);
}

TEST_CASE("packet transition probabilities") {
  const auto pt = make_type(1.0, 65.0);
  const double s_l = 100.0;
  const auto tp = packet_transition_probs(pt, s_l);
  const double decay = std::exp(-66.0 / 100.0);
  CHECK(tp.gg == doctest::Approx(pt.pi_g() + pt.pi_b() * decay).epsilon(1e-14));
  CHECK(tp.bb == doctest::Approx(pt.pi_b() + pt.pi_g() * decay).epsilon(1e-14));
  CHECK(tp.gg + tp.bg == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tp.bb + tp.gb == doctest::Approx(1.0).epsilon(1e-15));
  // Stationarity: pi P = pi.
  CHECK(pt.pi_g() * tp.gg + pt.pi_b() * tp.gb ==
        doctest::Approx(pt.pi_g()).epsilon(1e-13));
  CHECK_THROWS_AS(packet_transition_probs(pt, 0.0), std::invalid_argument);
}

TEST_CASE("sampled paths cover the horizon with positive sojourns") {
  const auto pt = make_type(2.0, 50.0);
  RngStream rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const auto sp = sample_state_path(pt, 0.25, rng);
    CHECK(sp.horizon == 0.25);
    double sum = 0;
    for (double s : sp.sojourns) {
      CHECK(s > 0);
      sum += s;
    }
    CHECK(sum >= 0.25);
  }
}

TEST_CASE("state_at walks the sojourn sequence") {
  StatePath sp;
  // Binary-exact sojourn lengths so the boundary epochs are representable.
  sp.starts_bad = false;
  sp.sojourns = {0.125, 0.0625, 0.125};
  sp.horizon = 0.25;
  CHECK(sp.state_at(0.0) == false);
  CHECK(sp.state_at(0.124) == false);
  CHECK(sp.state_at(0.125) == true);  // boundary belongs to the next sojourn
  CHECK(sp.state_at(0.186) == true);
  CHECK(sp.state_at(0.1875) == false);
  CHECK(sp.state_at(0.25) == false);
}

TEST_CASE("erasures_at_epochs agrees with state_at and validates range") {
  StatePath sp;
  sp.starts_bad = true;
  sp.sojourns = {0.02, 0.1, 0.03, 0.2};
  sp.horizon = 0.3;
  const std::vector<double> epochs{0.0, 0.01, 0.02, 0.1, 0.12, 0.125, 0.29};
  const auto hits = erasures_at_epochs(sp, epochs);
  REQUIRE(hits.size() == epochs.size());
  for (std::size_t i = 0; i < epochs.size(); ++i)
    CHECK(hits[i] == sp.state_at(epochs[i]));
  const std::vector<double> bad_epoch{0.31};
  CHECK_THROWS_AS(erasures_at_epochs(sp, bad_epoch), std::out_of_range);
}

TEST_CASE("count_losses_on_grid equals erasures_at_epochs on the even grid") {
  const auto pt = make_type(1.0, 40.0);
  RngStream rng(7);
  const double t = 0.2;
  for (int rep = 0; rep < 500; ++rep) {
    const auto sp = sample_state_path(pt, t, rng);
    for (int n : {1, 3, 20, 64}) {
      std::vector<double> epochs(n);
      for (int i = 0; i < n; ++i) epochs[i] = i * t / n;
      const auto hits = erasures_at_epochs(sp, epochs);
      int direct = 0;
      for (bool h : hits) direct += h;
      CHECK(count_losses_on_grid(sp, n, t) == direct);
    }
  }
}

TEST_CASE("validation rejects bad parameters") {
  CHECK_THROWS_AS(make_type(0.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_type(1.0, 1.0, -1).validate(), std::invalid_argument);
  auto pt = make_type(1.0, 10.0);
  pt.count = 0;
  CHECK_THROWS_AS(pt.validate(), std::invalid_argument);
}

TEST_CASE("substreams are deterministic and index-sensitive") {
  auto a = RngStream::substream(99, 5);
  auto b = RngStream::substream(99, 5);
  auto c = RngStream::substream(99, 6);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) differs = true;
  }
  CHECK(differs);
}
