#include "greenrec/chain1d.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace greenrec {

PotentialSeq PotentialSeq::zero() { return PotentialSeq{}; }

PotentialSeq PotentialSeq::from_list(std::vector<double> values) {
  PotentialSeq p;
  p.kind_ = Kind::explicit_list;
  for (double v : values) p.bound_ = std::max(p.bound_, std::abs(v));
  p.values_ = std::move(values);
  return p;
}

PotentialSeq PotentialSeq::from_function(std::function<double(std::size_t)> f, double bound) {
  if (!(bound >= 0.0) || !std::isfinite(bound))
    throw std::invalid_argument("PotentialSeq: bound must be finite and >= 0");
  PotentialSeq p;
  p.kind_ = Kind::deterministic;
  p.fn_ = std::move(f);
  p.bound_ = bound;
  return p;
}

PotentialSeq PotentialSeq::random_centered(Distribution base,
                                           std::function<double(std::size_t)> scale,
                                           double scale_sq_sum, double bound) {
  if (std::abs(base.mean()) > 1e-12)
    throw std::invalid_argument("PotentialSeq::random_centered: base distribution not centered");
  PotentialSeq p;
  p.kind_ = Kind::random_centered;
  p.base_ = base;
  p.scale_ = std::move(scale);
  p.scale_sq_sum_ = scale_sq_sum;
  p.bound_ = bound;
  return p;
}

double PotentialSeq::at(std::size_t n) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::explicit_list:
      return n < values_.size() ? values_[n] : 0.0;
    case Kind::deterministic:
      return fn_(n);
    case Kind::random_centered:
      throw std::invalid_argument("PotentialSeq::at: random potential needs (seed, trial)");
  }
  return 0.0;
}

double PotentialSeq::sample(std::size_t n, std::uint64_t seed, std::uint64_t trial) const {
  if (kind_ != Kind::random_centered) return at(n);
  SubStream rng(seed, trial, static_cast<std::uint64_t>(n));
  return scale_(n) * base_.sample(rng);
}

double PotentialSeq::variance_at(std::size_t n) const {
  if (kind_ != Kind::random_centered) return 0.0;
  const double s = scale_(n);
  return s * s * base_.variance();
}

double PotentialSeq::variance_sum() const {
  if (kind_ != Kind::random_centered) return 0.0;
  if (scale_sq_sum_ < 0.0) return std::numeric_limits<double>::infinity();
  return scale_sq_sum_ * base_.variance();
}

HPoint free_fixed_point(const SpectralParam& lam) {
  const std::complex<double> l = lam.value();
  if (lam.im() == 0.0 && std::abs(lam.re()) >= 2.0)
    throw out_of_band_error("free_fixed_point: real lambda outside (-2,2)");
  // z^2 + lambda z + 1 = 0; the two roots multiply to 1, exactly one is in H
  const std::complex<double> s = std::sqrt(l * l - 4.0);
  const std::complex<double> r1 = 0.5 * (-l + s);
  const std::complex<double> r2 = 0.5 * (-l - s);
  return HPoint(r1.imag() >= r2.imag() ? r1 : r2);
}

HPoint green_1d(const PotentialSeq& pot, const SpectralParam& lam, std::size_t depth,
                const HPoint& start, std::uint64_t seed, std::uint64_t trial) {
  if (depth < 1) throw std::invalid_argument("green_1d: depth must be >= 1");
  lam.require_positive_im("green_1d");
  const std::complex<double> l = lam.value();
  std::complex<double> z = start.value();
  if (pot.random()) {
    for (std::size_t n = depth + 1; n-- > 0;) {
      const std::complex<double> w = z + l - pot.sample(n, seed, trial);
      z = -std::conj(w) / std::norm(w);
    }
  } else {
    for (std::size_t n = depth + 1; n-- > 0;) {
      const std::complex<double> w = z + l - pot.at(n);
      z = -std::conj(w) / std::norm(w);
    }
  }
  return HPoint(z);  // throws boundary_underflow if Im collapsed
}

CertificateSums certificate_sum(const PotentialSeq& pot, const SpectralParam& lam,
                                const CertificateSequence& zseq, std::size_t terms) {
  if (terms < 1) throw std::invalid_argument("certificate_sum: terms must be >= 1");
  if (zseq.size() < terms + 1)
    throw std::invalid_argument("certificate_sum: need terms+1 points z_1..z_{terms+1}");
  CertificateSums out;
  out.head_dist = poincare_dist(zseq[0], HPoint(0.0, 1.0));
  out.partial_sums.reserve(terms);
  double acc = 0.0;
  for (std::size_t n = 1; n <= terms; ++n) {
    // zseq[k] holds z_{k+1}; Phi_{n+1} carries q_{n+1}
    const HPoint image = mobius_step(zseq[n], pot.at(n + 1), lam);
    acc += poincare_dist(image, zseq[n - 1]);
    out.partial_sums.push_back(acc);
  }
  return out;
}

CertificateSequence mourre_fixed_points(const PotentialSeq& pot, const SpectralParam& lam,
                                        std::size_t n_begin, std::size_t n_end) {
  CertificateSequence seq;
  seq.reserve(n_end > n_begin ? n_end - n_begin : 0);
  for (std::size_t n = n_begin; n < n_end; ++n) {
    const std::complex<double> shifted = lam.value() - pot.at(n);
    if (shifted.imag() == 0.0 && std::abs(shifted.real()) >= 2.0)
      throw out_of_band_error("mourre_fixed_points: |lambda - q_n| >= 2 at n=" +
                              std::to_string(n));
    seq.push_back(free_fixed_point(SpectralParam(shifted)));
  }
  return seq;
}

double expansion_rate(const HPoint& z, double q, const SpectralParam& lam,
                      const HPoint& z_ref) {
  const double before = cd_weight(z, z_ref);
  const double after = cd_weight(mobius_step(z, q, lam), z_ref);
  return (after * after + 1.0) / (before * before + 1.0);
}

ExpansionEnvelope fit_expansion_envelope(double lam_real, std::size_t z_samples,
                                         double q_bound, std::uint64_t seed) {
  if (!(q_bound > 0.0)) throw std::invalid_argument("fit_expansion_envelope: q_bound <= 0");
  const SpectralParam lam(lam_real);
  const HPoint z_ref = free_fixed_point(lam);
  ExpansionEnvelope env{0.0, 0.0, 0.0};
  SubStream rng(seed, 0x656e76);
  constexpr int kQ = 9;
  for (std::size_t i = 0; i < z_samples; ++i) {
    const double re = rng.uniform(-6.0, 6.0);
    const double im = std::pow(10.0, rng.uniform(-4.0, 1.0));
    const HPoint z(re, im);
    // least squares fit of mu(z, q) to a quadratic in q over a symmetric grid
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, y0 = 0, y1 = 0, y2 = 0;
    for (int j = 0; j < kQ; ++j) {
      const double q = -q_bound + 2.0 * q_bound * double(j) / double(kQ - 1);
      const double mu = expansion_rate(z, q, lam, z_ref);
      s0 += 1;
      s1 += q;
      s2 += q * q;
      s3 += q * q * q;
      s4 += q * q * q * q;
      y0 += mu;
      y1 += mu * q;
      y2 += mu * q * q;
    }
    // symmetric grid: s1 = s3 = 0, the normal equations decouple
    const double a1 = y1 / s2;
    const double det = s0 * s4 - s2 * s2;
    const double a0 = (s4 * y0 - s2 * y2) / det;
    const double a2 = (s0 * y2 - s2 * y0) / det;
    env.a0_max = std::max(env.a0_max, a0);
    env.a1_max = std::max(env.a1_max, std::abs(a1));
    env.a2_max = std::max(env.a2_max, a2);
  }
  return env;
}

L2MomentResult l2_moment_experiment(const PotentialSeq& pot, double lam_real,
                                    const std::vector<double>& eps_ladder,
                                    std::size_t depth, std::size_t trials,
                                    std::uint64_t seed, double c0, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("l2_moment_experiment: trials < 1");
  L2MomentResult out;
  out.variance_sum = pot.variance_sum();
  if (!std::isfinite(out.variance_sum))
    throw std::invalid_argument("l2_moment_experiment: variance sum must be declared finite");
  out.c0 = c0 > 0.0 ? c0
                    : fit_expansion_envelope(lam_real, 2000, std::max(pot.bound(), 1e-3), seed)
                          .a2_max;
  out.bound = std::exp(out.c0 * out.variance_sum);

  const HPoint z_ref = free_fixed_point(SpectralParam(lam_real));
  for (double eps : eps_ladder) {
    const SpectralParam lam(lam_real, eps);
    std::vector<double> cd2(trials);
    const auto run = [&](std::size_t t) {
      const HPoint g = green_1d(pot, lam, depth, z_ref, seed, t);
      const double w = cd_weight(g, z_ref);
      cd2[t] = w * w;
    };
    if (threads <= 1 || trials < 2) {
      for (std::size_t t = 0; t < trials; ++t) run(t);
    } else {
      const unsigned n_workers = std::min<unsigned>(threads, trials);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < n_workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t t = w; t < trials; t += n_workers) run(t);
        });
      for (auto& th : pool) th.join();
    }
    double mean = 0.0;
    for (double v : cd2) mean += v;
    mean /= double(trials);
    double var = 0.0;
    for (double v : cd2) var += (v - mean) * (v - mean);
    var = trials > 1 ? var / double(trials - 1) : 0.0;
    out.rows.push_back({eps, mean, std::sqrt(var / double(trials))});
  }
  return out;
}

std::vector<std::pair<double, double>> density_profile(const PotentialSeq& pot, double c,
                                                       double d, double eps,
                                                       std::size_t grid,
                                                       std::size_t depth) {
  if (!(c < d)) throw std::invalid_argument("density_profile: need c < d");
  if (!(eps > 0.0)) throw std::invalid_argument("density_profile: need eps > 0");
  if (grid < 2) throw std::invalid_argument("density_profile: grid < 2");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(grid);
  const HPoint start(0.0, 1.0);
  for (std::size_t i = 0; i < grid; ++i) {
    const double lr = c + (d - c) * double(i) / double(grid - 1);
    const HPoint g = green_1d(pot, SpectralParam(lr, eps), depth, start);
    rows.emplace_back(lr, g.im() / M_PI);
  }
  return rows;
}

std::size_t default_depth(const SpectralParam& lam) {
  lam.require_positive_im("default_depth");
  const double d = std::ceil(8.0 / lam.im());
  return static_cast<std::size_t>(std::min(d, 1e6));
}

}  // namespace greenrec
