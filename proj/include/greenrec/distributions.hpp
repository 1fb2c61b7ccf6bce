#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "greenrec/rng.hpp"

namespace greenrec {

// Compactly supported site distribution for random potentials.
class Distribution {
 public:
  enum class Kind { bernoulli_pm1, uniform, two_point };

  static Distribution bernoulli_pm1();
  static Distribution uniform(double lo, double hi);
  // value1 with probability p, value2 otherwise
  static Distribution two_point(double p, double value1, double value2);

  double sample(SubStream& rng) const;
  double mean() const;
  double variance() const;
  double bound() const;  // sup |support|
  Kind kind() const { return kind_; }
  // (value, probability) pairs; throws for continuous kinds
  std::vector<std::pair<double, double>> discrete_atoms() const;

 private:
  Kind kind_ = Kind::bernoulli_pm1;
  double lo_ = -1.0, hi_ = 1.0;  // uniform
  double p_ = 0.5, v1_ = 1.0, v2_ = -1.0;  // two_point
};

// Joint law of a potential pair (q1,q2), given as explicit atoms. Carries the
// second moments c11, c22, c12 used by the correlation bound.
class JointPairDistribution {
 public:
  struct Atom {
    double q1, q2, prob;
  };

  static JointPairDistribution from_atoms(std::vector<Atom> atoms);
  // independent product of two discrete marginals
  static JointPairDistribution product(const Distribution& a, const Distribution& b);
  // q1 = q2 almost surely
  static JointPairDistribution fully_correlated(const Distribution& a);

  std::pair<double, double> sample(SubStream& rng) const;
  double c11() const { return c11_; }
  double c22() const { return c22_; }
  double c12() const { return c12_; }
  double mean_sum() const { return mean_sum_; }      // E[q1 + q2]
  double support_bound() const { return bound_; }    // max over atoms of max(|q1|,|q2|)
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<Atom> atoms_;
  double c11_ = 0, c22_ = 0, c12_ = 0, mean_sum_ = 0, bound_ = 0;
};

}  // namespace greenrec
