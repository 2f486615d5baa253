#include "pathfec/burst_profile.hpp"

#include <cmath>
#include <stdexcept>

namespace pathfec {
namespace {

// Scaled monomial integrals e^{-shift} * int_0^1 x^n e^{s x} dx for n=0,1,2.
// Series fallback near s=0 keeps the lambda ~ mu_b*T cancellation stable.
struct ScaledIntegrals {
  double i0, i1, i2;
};

ScaledIntegrals monomial_integrals(double s, double shift) {
  ScaledIntegrals r{};
  const double em = std::exp(-shift);
  if (std::abs(s) < 0.25) {
    // int x^n e^{sx} = sum_k s^k / (k! (n+k+1)). The closed forms below
    // cancel catastrophically for small |s| (the i2 numerator is O(s^3)
    // against O(1) terms), so use the absolutely convergent series here.
    double term = 1.0;  // s^k / k!
    double i0 = 0, i1 = 0, i2 = 0;
    for (int k = 0; k < 64; ++k) {
      i0 += term / (k + 1);
      i1 += term / (k + 2);
      i2 += term / (k + 3);
      term *= s / (k + 1);
      if (std::abs(term) < 1e-18) break;
    }
    r.i0 = em * i0;
    r.i1 = em * i1;
    r.i2 = em * i2;
    return r;
  }
  const double e1 = std::exp(s - shift);  // e^{s} scaled
  r.i0 = (e1 - em) / s;
  r.i1 = (e1 * (s - 1) + em) / (s * s);
  r.i2 = (e1 * (s * s - 2 * s + 2) - 2 * em) / (s * s * s);
  return r;
}

}  // namespace

ErasureProfile ErasureProfile::build(const PathType& pt, double t,
                                     bool exact_atom0) {
  pt.validate();
  if (!(t > 0)) throw std::invalid_argument("ErasureProfile: t must be > 0");
  const double a = pt.mu_g * t;
  const double c = pt.mu_b * t;
  if (a >= 1.0)
    throw std::domain_error(
        "ErasureProfile: mu_g*T >= 1 violates the short-block assumption "
        "(block must be much shorter than the mean Good sojourn)");
  if (pt.mu_b <= pt.mu_g)
    throw std::domain_error(
        "ErasureProfile: mu_b <= mu_g violates the low-loss assumption "
        "(mean Bad sojourn must be shorter than mean Good sojourn)");
  ErasureProfile ep;
  ep.mu_g_t_ = a;
  ep.mu_b_t_ = c;
  ep.pi_b_ = pt.pi_b();
  ep.pi_g_ = pt.pi_g();
  ep.atom0_ = exact_atom0 ? ep.pi_g_ * std::exp(-a) : ep.pi_g_ * (1.0 - a);
  ep.atom1_ = ep.pi_b_ * std::exp(-c);
  return ep;
}

double ErasureProfile::density(double x) const {
  const double a = mu_g_t_, c = mu_b_t_;
  return std::exp(-c * x) *
         (pi_b_ * c + pi_g_ * a * (1.0 + c * (1.0 - x)));
}

double ErasureProfile::total_mass() const {
  return tilted(0.0).mgf;
}

double ErasureProfile::mean() const {
  return tilted(0.0).tilted_mean;
}

TiltedMoments ErasureProfile::tilted(double lambda) const {
  if (!std::isfinite(lambda))
    throw std::invalid_argument("tilted: lambda must be finite");
  // density(x) e^{lambda x} = e^{sx} (A + B x), s = lambda - mu_b*T.
  const double a = mu_g_t_, c = mu_b_t_;
  const double A = pi_b_ * c + pi_g_ * a * (1.0 + c);
  const double B = -pi_g_ * a * c;
  const double s = lambda - c;
  const double shift = std::max(lambda, 0.0);  // all exponents become <= 0
  const auto mono = monomial_integrals(s, shift);
  const double atom1_term = atom1_ * std::exp(lambda - shift);
  const double m0 = atom0_ * std::exp(-shift) + atom1_term + A * mono.i0 +
                    B * mono.i1;
  const double m1 = atom1_term + A * mono.i1 + B * mono.i2;
  TiltedMoments tm{};
  tm.log_mgf = shift + std::log(m0);
  tm.mgf = std::exp(tm.log_mgf);
  tm.tilted_mean = m1 / m0;
  return tm;
}

}  // namespace pathfec
