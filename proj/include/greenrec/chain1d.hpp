#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "greenrec/distributions.hpp"
#include "greenrec/halfplane.hpp"

namespace greenrec {

// Potential q : N_0 -> R, bounded. Deterministic kinds evaluate directly;
// the random kind draws site values from counter-based streams keyed by
// (seed, trial, site), so changing the depth never reshuffles shallow sites.
class PotentialSeq {
 public:
  enum class Kind { zero, explicit_list, deterministic, random_centered };

  static PotentialSeq zero();
  static PotentialSeq from_list(std::vector<double> values);  // zero beyond the end
  static PotentialSeq from_function(std::function<double(std::size_t)> f, double bound);
  // q_n = scale(n) * X_n with X_n iid from a centered base distribution.
  // scale_sq_sum = sum_n scale(n)^2 (pass a negative value for "infinite").
  static PotentialSeq random_centered(Distribution base,
                                      std::function<double(std::size_t)> scale,
                                      double scale_sq_sum, double bound);

  Kind kind() const { return kind_; }
  bool random() const { return kind_ == Kind::random_centered; }
  double bound() const { return bound_; }

  double at(std::size_t n) const;  // deterministic kinds only
  double sample(std::size_t n, std::uint64_t seed, std::uint64_t trial) const;
  // E[q_n^2] and sum_n E[q_n^2] for the random kind
  double variance_at(std::size_t n) const;
  double variance_sum() const;

 private:
  Kind kind_ = Kind::zero;
  std::vector<double> values_;
  std::function<double(std::size_t)> fn_;
  Distribution base_ = Distribution::bernoulli_pm1();
  std::function<double(std::size_t)> scale_;
  double scale_sq_sum_ = 0.0;
  double bound_ = 0.0;
};

using CertificateSequence = std::vector<HPoint>;  // z_1, z_2, ... (index 0 is z_1)

// Fixed point of z -> -1/(z + lambda) in H; out_of_band_error for real
// lambda with |lambda| >= 2.
HPoint free_fixed_point(const SpectralParam& lam);

// Backward composition Phi_0 . Phi_1 . ... . Phi_depth applied to `start`.
// Approximates G_lambda(0,0); start-independent in the limit.
HPoint green_1d(const PotentialSeq& pot, const SpectralParam& lam, std::size_t depth,
                const HPoint& start, std::uint64_t seed = 0, std::uint64_t trial = 0);

struct CertificateSums {
  std::vector<double> partial_sums;  // sum_{n=1..N} d(Phi_{n+1}(z_{n+1}), z_n)
  double head_dist;                  // d(z_1, i)
};

// Telescoping certificate: bounded partial sums pin the root Green value to a
// bounded hyperbolic ball. zseq must hold at least terms+1 points.
CertificateSums certificate_sum(const PotentialSeq& pot, const SpectralParam& lam,
                                const CertificateSequence& zseq, std::size_t terms);

// Per-site fixed points z_n = -(lambda - q_n)/2 + i sqrt(1 - (lambda - q_n)^2/4)
// for n in [n_begin, n_end); real lambda, requires |lambda - q_n| < 2.
CertificateSequence mourre_fixed_points(const PotentialSeq& pot, const SpectralParam& lam,
                                        std::size_t n_begin, std::size_t n_end);

// (cd^2(Phi_q(z)) + 1) / (cd^2(z) + 1) with cd taken relative to z_ref.
double expansion_rate(const HPoint& z, double q, const SpectralParam& lam,
                      const HPoint& z_ref);

struct ExpansionEnvelope {
  double a0_max;  // max over sampled z of the fitted constant term
  double a1_max;  // max |linear coefficient|
  double a2_max;  // max quadratic coefficient (the moment-bound constant C0)
};

// Fits expansion_rate(z, q) ~ a0 + a1 q + a2 q^2 per sampled z over
// q in [-q_bound, q_bound] and records the worst constants.
ExpansionEnvelope fit_expansion_envelope(double lam_real, std::size_t z_samples,
                                         double q_bound, std::uint64_t seed);

struct MomentEstimate {
  double eps;
  double mean_cd2;   // Monte Carlo estimate of E[cd^2(G_{lambda+i eps}(0,0))]
  double std_error;  // standard error of the mean
};

struct L2MomentResult {
  std::vector<MomentEstimate> rows;  // ordered as the input ladder
  double variance_sum;               // sum_n E[q_n^2]
  double c0;                         // calibrated envelope constant
  double bound;                      // exp(c0 * variance_sum); E[cd^2] + 1 <= bound
};

// Monte Carlo version of the square-summable-disorder moment bound: for each
// eps in the ladder, estimates E[cd^2] over independent potential draws, each
// evaluated by green_1d at `depth` from the unperturbed fixed point.
L2MomentResult l2_moment_experiment(const PotentialSeq& pot, double lam_real,
                                    const std::vector<double>& eps_ladder,
                                    std::size_t depth, std::size_t trials,
                                    std::uint64_t seed, double c0 = 0.0,
                                    unsigned threads = 1);

// Smoothed spectral density (1/pi) Im G_{lambda+i eps}(0,0) on a grid.
std::vector<std::pair<double, double>> density_profile(const PotentialSeq& pot, double c,
                                                       double d, double eps,
                                                       std::size_t grid,
                                                       std::size_t depth);

// ceil(8 / Im lambda) capped at 1e6; the mixing scale of the recursion
std::size_t default_depth(const SpectralParam& lam);

}  // namespace greenrec
