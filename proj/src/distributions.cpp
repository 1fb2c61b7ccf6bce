#include "greenrec/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace greenrec {

Distribution Distribution::bernoulli_pm1() {
  Distribution d;
  d.kind_ = Kind::bernoulli_pm1;
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform distribution needs lo < hi");
  Distribution d;
  d.kind_ = Kind::uniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Distribution Distribution::two_point(double p, double value1, double value2) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("two_point probability outside [0,1]");
  Distribution d;
  d.kind_ = Kind::two_point;
  d.p_ = p;
  d.v1_ = value1;
  d.v2_ = value2;
  return d;
}

double Distribution::sample(SubStream& rng) const {
  switch (kind_) {
    case Kind::bernoulli_pm1:
      return (rng.next_u64() >> 63) ? 1.0 : -1.0;
    case Kind::uniform:
      return rng.uniform(lo_, hi_);
    case Kind::two_point:
      return rng.uniform01() < p_ ? v1_ : v2_;
  }
  return 0.0;
}

double Distribution::mean() const {
  switch (kind_) {
    case Kind::bernoulli_pm1:
      return 0.0;
    case Kind::uniform:
      return 0.5 * (lo_ + hi_);
    case Kind::two_point:
      return p_ * v1_ + (1.0 - p_) * v2_;
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind_) {
    case Kind::bernoulli_pm1:
      return 1.0;
    case Kind::uniform: {
      const double w = hi_ - lo_;
      return w * w / 12.0;
    }
    case Kind::two_point: {
      const double m = mean();
      return p_ * (v1_ - m) * (v1_ - m) + (1.0 - p_) * (v2_ - m) * (v2_ - m);
    }
  }
  return 0.0;
}

double Distribution::bound() const {
  switch (kind_) {
    case Kind::bernoulli_pm1:
      return 1.0;
    case Kind::uniform:
      return std::max(std::abs(lo_), std::abs(hi_));
    case Kind::two_point:
      return std::max(std::abs(v1_), std::abs(v2_));
  }
  return 0.0;
}

JointPairDistribution JointPairDistribution::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("joint distribution needs at least one atom");
  double total = 0.0;
  JointPairDistribution j;
  for (const Atom& a : atoms) {
    if (a.prob < 0.0) throw std::invalid_argument("joint atom with negative probability");
    total += a.prob;
    j.c11_ += a.prob * a.q1 * a.q1;
    j.c22_ += a.prob * a.q2 * a.q2;
    j.c12_ += a.prob * a.q1 * a.q2;
    j.mean_sum_ += a.prob * (a.q1 + a.q2);
    j.bound_ = std::max({j.bound_, std::abs(a.q1), std::abs(a.q2)});
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("joint atom probabilities do not sum to 1");
  j.atoms_ = std::move(atoms);
  return j;
}

std::vector<std::pair<double, double>> Distribution::discrete_atoms() const {
  switch (kind_) {
    case Kind::bernoulli_pm1:
      return {{1.0, 0.5}, {-1.0, 0.5}};
    case Kind::two_point:
      return {{v1_, p_}, {v2_, 1.0 - p_}};
    default:
      throw std::invalid_argument("discrete_atoms: continuous distribution");
  }
}

JointPairDistribution JointPairDistribution::product(const Distribution& a,
                                                     const Distribution& b) {
  std::vector<Atom> atoms;
  for (const auto& [va, pa] : a.discrete_atoms())
    for (const auto& [vb, pb] : b.discrete_atoms()) atoms.push_back({va, vb, pa * pb});
  return from_atoms(std::move(atoms));
}

JointPairDistribution JointPairDistribution::fully_correlated(const Distribution& a) {
  std::vector<Atom> atoms;
  for (const auto& [v, p] : a.discrete_atoms()) atoms.push_back({v, v, p});
  return from_atoms(std::move(atoms));
}

std::pair<double, double> JointPairDistribution::sample(SubStream& rng) const {
  double u = rng.uniform01();
  for (const Atom& a : atoms_) {
    if (u < a.prob) return {a.q1, a.q2};
    u -= a.prob;
  }
  return {atoms_.back().q1, atoms_.back().q2};
}

}  // namespace greenrec
