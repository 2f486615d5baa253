#include "pathfec/channel.hpp"

#include <cmath>

namespace pathfec {

std::pair<double, double> steady_state(const PathType& pt) {
  pt.validate();
  const double pi_b = pt.mu_g / (pt.mu_g + pt.mu_b);
  return {1.0 - pi_b, pi_b};
}

TransitionProbs packet_transition_probs(const PathType& pt, double s_l) {
  pt.validate();
  if (!(s_l > 0))
    throw std::invalid_argument("packet_transition_probs: rate must be > 0");
  const double decay = std::exp(-(pt.mu_g + pt.mu_b) / s_l);
  const double pi_b = pt.pi_b();
  const double pi_g = 1.0 - pi_b;
  TransitionProbs p{};
  p.gg = pi_g + pi_b * decay;
  p.bg = 1.0 - p.gg;
  p.bb = pi_b + pi_g * decay;
  p.gb = 1.0 - p.bb;
  return p;
}

void sample_state_path(const PathType& pt, double t, RngStream& rng,
                       StatePath& out) {
  pt.validate();
  if (!(t > 0)) throw std::invalid_argument("sample_state_path: t must be > 0");
  out.horizon = t;
  out.starts_bad = rng.bernoulli(pt.pi_b());
  out.sojourns.clear();
  bool bad = out.starts_bad;
  double elapsed = 0;
  while (elapsed < t) {
    const double s = rng.exponential(bad ? pt.mu_b : pt.mu_g);
    out.sojourns.push_back(s);
    elapsed += s;
    bad = !bad;
  }
}

StatePath sample_state_path(const PathType& pt, double t, RngStream& rng) {
  StatePath sp;
  sample_state_path(pt, t, rng, sp);
  return sp;
}

bool StatePath::state_at(double t) const {
  bool bad = starts_bad;
  double edge = 0;
  for (double s : sojourns) {
    edge += s;
    if (t < edge) return bad;
    bad = !bad;
  }
  return bad;  // t exactly at the final edge
}

std::vector<bool> erasures_at_epochs(const StatePath& sp,
                                     std::span<const double> epochs) {
  std::vector<bool> out(epochs.size(), false);
  std::size_t i = 0;
  bool bad = sp.starts_bad;
  double edge = 0;
  for (double s : sp.sojourns) {
    edge += s;
    while (i < epochs.size() && epochs[i] < edge) {
      if (epochs[i] < 0 || epochs[i] > sp.horizon)
        throw std::out_of_range("erasures_at_epochs: epoch outside [0, horizon]");
      out[i++] = bad;
    }
    if (i == epochs.size()) break;
    bad = !bad;
  }
  for (; i < epochs.size(); ++i) {
    if (epochs[i] > sp.horizon)
      throw std::out_of_range("erasures_at_epochs: epoch outside [0, horizon]");
    out[i] = bad;
  }
  return out;
}

int count_losses_on_grid(const StatePath& sp, int n, double t) {
  // Epoch i sits at i*t/n; count epochs falling inside bad sojourns.
  const double step = t / n;
  int losses = 0;
  int i = 0;
  bool bad = sp.starts_bad;
  double edge = 0;
  for (double s : sp.sojourns) {
    edge += s;
    // First epoch index at or beyond this edge.
    int next = static_cast<int>(std::ceil(edge / step));
    if (next > n) next = n;
    if (bad) losses += next - i;
    i = next;
    if (i >= n) break;
    bad = !bad;
  }
  if (i < n && bad) losses += n - i;
  return losses;
}

}  // namespace pathfec
