#pragma once

#include "pathfec/channel.hpp"

namespace pathfec {

struct TiltedMoments {
  double mgf;         // E{e^{lambda x}} (may overflow to inf; log_mgf is safe)
  double log_mgf;
  double tilted_mean; // E{x e^{lambda x}} / E{e^{lambda x}}, in (0,1)
};

/// Mixed law of x = B/T, the fraction of a block a path spends Bad:
/// atoms at 0 (no bad burst) and 1 (burst covers the block) plus a density
/// on (0,1). Valid in the short-block regime mu_g*T < 1 where the block
/// holds at most one bad burst.
class ErasureProfile {
 public:
  /// By default the atom at 0 uses the linearized mass pi_g*(1 - mu_g*T),
  /// which makes total mass exactly 1 against the approximate density;
  /// exact_atom0 switches to pi_g*e^{-mu_g*T} for sensitivity studies.
  static ErasureProfile build(const PathType& pt, double t,
                              bool exact_atom0 = false);

  double atom0() const { return atom0_; }
  double atom1() const { return atom1_; }
  double density(double x) const;
  double mu_g_t() const { return mu_g_t_; }
  double mu_b_t() const { return mu_b_t_; }

  /// atom0 + atom1 + integral of the density (closed form).
  double total_mass() const;

  /// E{x}, closed form.
  double mean() const;

  TiltedMoments tilted(double lambda) const;

  bool same_shape(const ErasureProfile& other, double tol = 1e-12) const {
    return std::abs(mu_g_t_ - other.mu_g_t_) <= tol &&
           std::abs(mu_b_t_ - other.mu_b_t_) <= tol &&
           std::abs(atom0_ - other.atom0_) <= tol;
  }

 private:
  double mu_g_t_ = 0, mu_b_t_ = 0;
  double pi_g_ = 0, pi_b_ = 0;
  double atom0_ = 0, atom1_ = 0;
};

}  // namespace pathfec
