#include "greenrec/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace greenrec {

namespace {
constexpr double kImFloor = 1e-300;
}

void HPoint::validate() const {
  if (!std::isfinite(z_.real()) || !std::isfinite(z_.imag()))
    throw std::invalid_argument("HPoint: non-finite component");
  if (z_.imag() <= 0.0) throw std::invalid_argument("HPoint: Im <= 0");
  if (z_.imag() <= kImFloor)
    throw boundary_underflow("HPoint: Im underflowed below 1e-300");
}

void SpectralParam::validate() const {
  if (!std::isfinite(z_.real()) || !std::isfinite(z_.imag()))
    throw std::invalid_argument("SpectralParam: non-finite component");
  if (z_.imag() < 0.0) throw std::invalid_argument("SpectralParam: Im < 0");
}

void SpectralParam::require_positive_im(const char* who) const {
  if (!(z_.imag() > 0.0))
    throw std::invalid_argument(std::string(who) + ": requires Im(lambda) > 0");
}

double poincare_dist(const HPoint& z1, const HPoint& z2) {
  const double dx = z1.re() - z2.re();
  const double dy = z1.im() - z2.im();
  const double t = (dx * dx + dy * dy) / (2.0 * z1.im() * z2.im());
  return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

HPoint mobius_step(const HPoint& z, double q, const SpectralParam& lam) {
  const std::complex<double> w = z.value() + lam.value() - q;
  const double n2 = std::norm(w);
  if (n2 == 0.0) throw numerical_degeneracy("mobius_step: z + lambda - q = 0");
  return HPoint(-std::conj(w) / n2);
}

double contraction_factor(double c, double im_lambda) {
  if (!(c > 0.0)) throw std::invalid_argument("contraction_factor: C must be > 0");
  if (!(im_lambda > 0.0))
    throw std::invalid_argument("contraction_factor: Im(lambda) must be > 0");
  return c / (c + im_lambda);
}

double contraction_ratio(double q, const SpectralParam& lam, const HPoint& z1,
                         const HPoint& z2) {
  const double d0 = poincare_dist(z1, z2);
  if (d0 == 0.0) throw std::invalid_argument("contraction_ratio: z1 = z2");
  const double d1 = poincare_dist(mobius_step(z1, q, lam), mobius_step(z2, q, lam));
  return d1 / d0;
}

double cd_weight(const HPoint& z, const HPoint& z_ref) {
  const std::complex<double> d = z.value() - z_ref.value();
  return std::norm(d) / z.im();
}

HyperbolicDisk two_step_disk_radius(double q_bound, const SpectralParam& lam,
                                    std::size_t samples) {
  lam.require_positive_im("two_step_disk_radius");
  if (q_bound < 0.0) throw std::invalid_argument("two_step_disk_radius: q_bound < 0");
  if (samples < 1) throw std::invalid_argument("two_step_disk_radius: samples < 1");

  // grid sizes chosen so n_z * n_q^2 is close to the requested sample count
  const std::size_t n_q = q_bound > 0.0 ? 5 : 1;
  const std::size_t n_z =
      std::max<std::size_t>(4, samples / (n_q * n_q));
  std::vector<double> qs;
  for (std::size_t i = 0; i < n_q; ++i)
    qs.push_back(n_q == 1 ? 0.0 : -q_bound + 2.0 * q_bound * double(i) / double(n_q - 1));

  const HPoint center = mobius_step(mobius_step(HPoint(0.0, 1.0), 0.0, lam), 0.0, lam);
  double radius = 0.0;

  // z sweeps a wide slab: Re tan-spaced over (-inf,inf) proxy, Im log-spaced
  const std::size_t n_re = std::max<std::size_t>(2, static_cast<std::size_t>(
                               std::sqrt(double(n_z))));
  const std::size_t n_im = std::max<std::size_t>(2, n_z / n_re);
  for (std::size_t a = 0; a < n_re; ++a) {
    const double u = -1.45 + 2.9 * double(a) / double(n_re - 1);
    const double re = std::tan(u) * 10.0;  // ~ +-100
    for (std::size_t b = 0; b < n_im; ++b) {
      const double im = std::pow(10.0, -8.0 + 12.0 * double(b) / double(n_im - 1));
      const HPoint z(re, im);
      for (double q2 : qs)
        for (double q1 : qs) {
          const HPoint w = mobius_step(mobius_step(z, q2, lam), q1, lam);
          radius = std::max(radius, poincare_dist(center, w));
        }
    }
  }
  return {center, radius};
}

}  // namespace greenrec
