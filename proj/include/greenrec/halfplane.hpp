#pragma once

#include <complex>
#include <cstddef>

#include "greenrec/errors.hpp"

namespace greenrec {

// A point of the open upper half-plane H. Construction enforces Im > 1e-300,
// so a value whose imaginary part collapses surfaces as boundary_underflow
// instead of being clamped.
class HPoint {
 public:
  HPoint(double re, double im) : z_(re, im) { validate(); }
  explicit HPoint(std::complex<double> z) : z_(z) { validate(); }

  double re() const { return z_.real(); }
  double im() const { return z_.imag(); }
  std::complex<double> value() const { return z_; }

  friend bool operator==(const HPoint& a, const HPoint& b) { return a.z_ == b.z_; }

 private:
  void validate() const;
  std::complex<double> z_;
};

// Spectral parameter lambda with Im(lambda) >= 0.
class SpectralParam {
 public:
  SpectralParam(double re, double im = 0.0) : z_(re, im) { validate(); }
  explicit SpectralParam(std::complex<double> z) : z_(z) { validate(); }

  double re() const { return z_.real(); }
  double im() const { return z_.imag(); }
  std::complex<double> value() const { return z_; }
  // throws std::invalid_argument unless Im(lambda) > 0
  void require_positive_im(const char* who) const;

 private:
  void validate() const;
  std::complex<double> z_;
};

// Hyperbolic distance on H, evaluated as log1p(t + sqrt(t(t+2))) with
// t = |z1-z2|^2 / (2 Im z1 Im z2) to avoid cancellation near zero.
double poincare_dist(const HPoint& z1, const HPoint& z2);

// One transfer-matrix step: z -> -1/(z + lambda - q). Maps H into itself for
// Im(lambda) >= 0; for Im(lambda) > 0 the image satisfies |.| < 1/Im(lambda).
HPoint mobius_step(const HPoint& z, double q, const SpectralParam& lam);

// Strict contraction factor C/(C + Im lambda) valid on {|z| < C}.
double contraction_factor(double c, double im_lambda);

// d(Phi z1, Phi z2) / d(z1, z2) for the step above.
double contraction_ratio(double q, const SpectralParam& lam, const HPoint& z1,
                         const HPoint& z2);

// Weight |z - z_ref|^2 / Im z; vanishes exactly at z_ref and blows up at the
// real boundary away from it.
double cd_weight(const HPoint& z, const HPoint& z_ref);

struct HyperbolicDisk {
  HPoint center;
  double radius;
};

// Sampled enclosure of the two-step image Phi_{q1} . Phi_{q2} (H) over a wide
// grid of z and all q in [-q_bound, q_bound]. Diagnostic only, not certified.
HyperbolicDisk two_step_disk_radius(double q_bound, const SpectralParam& lam,
                                    std::size_t samples);

}  // namespace greenrec
