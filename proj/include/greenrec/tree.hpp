#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "greenrec/distributions.hpp"
#include "greenrec/halfplane.hpp"

namespace greenrec {

// Potential models on the rooted k-ary tree.
struct TreeModel {
  struct None {};
  struct Iid {  // iid per-vertex values: a * X, X ~ nu, nu centered and bounded
    Distribution nu;
    double disorder = 0.0;
  };
  struct TwoPeriodic {  // one random pair per sphere, repeated across it
    JointPairDistribution nu;
    Distribution root_measure = Distribution::two_point(1.0, 0.0, 0.0);
    double disorder = 0.0;
  };
  struct Oscillating {  // deterministic +-delta0 siblings with radial modulation
    double delta0 = 0.0;
    std::function<double(std::size_t)> mod1, mod2;
  };

  std::size_t branching = 2;
  std::variant<None, Iid, TwoPeriodic, Oscillating> potential = None{};

  static TreeModel free_tree(std::size_t k = 2);
  static TreeModel iid(std::size_t k, Distribution nu, double disorder);
  static TreeModel two_periodic(JointPairDistribution nu, double disorder,
                                Distribution root_measure = Distribution::two_point(1.0, 0.0,
                                                                                    0.0));
  void validate() const;
};

// Fixed-size resampling pool approximating the Green-value distribution at one
// recursion depth.
struct SamplePool {
  std::vector<HPoint> samples;
  SpectralParam lam{0.0, 1.0};
  std::size_t generation = 0;
};

// One tree recursion step: -1/(z_1 + ... + z_k + lambda - q).
HPoint psi_step(std::span<const HPoint> zs, double q, const SpectralParam& lam);

// H-solution of k z^2 + lambda z + 1 = 0; out_of_band_error for real lambda
// with |lambda| >= 2 sqrt(k).
HPoint tree_fixed_point(std::size_t k, const SpectralParam& lam);

// Population dynamics: each generation rebuilds the pool with
// z'_j = Psi(z_{i_1}, ..., z_{i_k}, a q, lambda), indices and q drawn from
// counter-based streams keyed by (seed, generation, slot). Two-periodic models
// delegate to two_periodic_population; the oscillating model is deterministic,
// use oscillating_green instead.
SamplePool population_green(const TreeModel& model, const SpectralParam& lam,
                            std::size_t pool_size, std::size_t generations,
                            std::uint64_t seed, const HPoint& start = HPoint(0.0, 1.0),
                            unsigned threads = 1);

// Two-periodic correlated model: one fresh (q1,q2) pair per new sample,
// applied through the nested two-level update
// Psi(z_1, Psi(z_2, z_3, a q2, lambda), a q1, lambda).
SamplePool two_periodic_population(const TreeModel& model, const SpectralParam& lam,
                                   std::size_t pool_size, std::size_t generations,
                                   std::uint64_t seed,
                                   const HPoint& start = HPoint(0.0, 1.0),
                                   unsigned threads = 1);

// Deterministic transversely oscillating potential: sphere-n siblings carry
// +delta0 + mod1(n) and -delta0 + mod2(n); returns the root Green value of the
// two-value radial recursion at the given depth (root potential set to zero).
HPoint oscillating_green(double delta0, const std::function<double(std::size_t)>& mod1,
                         const std::function<double(std::size_t)>& mod2,
                         const SpectralParam& lam, std::size_t depth);

// Empirical moment (1/P) sum cd(z_j, z_ref)^p.
double moment_Mp(const SamplePool& pool, double p, const HPoint& z_ref);
struct MomentStat {
  double mean;
  double std_error;
};
MomentStat moment_Mp_stats(const SamplePool& pool, double p, const HPoint& z_ref);

// One-level contraction ratio of cd^p under the binary recursion:
// cd^p(Psi(z1,z2,q,lambda)) / (cd^p(z1)/2 + cd^p(z2)/2), cd referenced to the
// free binary-tree fixed point z_lambda. 0/0 exactly at z1 = z2 = z_lambda.
double mu2p(const HPoint& z1, const HPoint& z2, double q, const SpectralParam& lam,
            double p);

// Radial compactification of mu2p in the u = (z - z_lambda)/sqrt(Im z)
// coordinates: 1/u_i = r omega_i with |omega| = 1. At r = 0 the value is
// (|<(omega2,omega1),v>|^2/2)^p / (|omega1|^{2p}/2 + |omega2|^{2p}/2) with v
// the declared imaginary-weight vector.
double mu2p_boundary(const std::array<std::complex<double>, 2>& omega,
                     const std::array<double, 2>& v, double q, double lam_real, double p,
                     double r);

struct Mu3pValue {
  double direct;         // cyclic sum of two-level cd^p ratios
  double reconstructed;  // the mu2p / n_j decomposition of the same quantity
};

// Two-level contraction functional; the two members must agree (checked to
// 1e-9, numerical_degeneracy otherwise).
Mu3pValue mu3p(const std::array<HPoint, 3>& zs, const std::array<double, 2>& qs,
               const SpectralParam& lam, double p);

enum class AcClassification { ac_interior, not_ac, boundary };

// Classification of the deterministic oscillating potential via the cubic
// z^3 + 2 lambda z^2 + (2 + lambda^2 - delta^2) z + 2 lambda: interior of the
// ac spectrum iff one real root and a complex-conjugate pair.
AcClassification oscillating_ac_test(double lam, double delta);
// the three roots (Cardano) and the discriminant, for diagnostics
std::array<std::complex<double>, 3> oscillating_cubic_roots(double lam, double delta);
double oscillating_cubic_discriminant(double lam, double delta);

struct CorrelationCheck {
  double delta;     // 2 c12 / (c11 + c22)
  bool admissible;  // delta < 1/2
};
CorrelationCheck correlation_delta(double c11, double c22, double c12);

}  // namespace greenrec
