#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "greenrec/halfplane.hpp"
#include "greenrec/tree.hpp"

namespace greenrec {

// Single-forward-edge-deletion percolation on the binary tree: at each vertex
// exactly one forward edge is deleted with probability q_del (split evenly),
// both are kept with probability 1 - q_del.
struct PercolationSpec {
  double q_del = 0.0;

  explicit PercolationSpec(double q) : q_del(q) {
    if (q < 0.0 || q > 1.0)
      throw std::invalid_argument("PercolationSpec: q_del outside [0,1]");
  }
};

enum class EdgeOutcome { both, only_left, only_right };

// Green recursion with deleted edges: both -> -1/(z1+z2+lambda),
// only_left -> -1/(z1+lambda), only_right -> -1/(z2+lambda).
HPoint percolation_step(const HPoint& z1, const HPoint& z2, const SpectralParam& lam,
                        EdgeOutcome outcome);

struct PercolationRun {
  SamplePool pool;
  // per generation: {# both, # only_left, # only_right}
  std::vector<std::array<std::uint64_t, 3>> outcome_counts;
};

PercolationRun percolation_population(const PercolationSpec& spec, const SpectralParam& lam,
                                      std::size_t pool_size, std::size_t generations,
                                      std::uint64_t seed,
                                      const HPoint& start = HPoint(0.0, 1.0),
                                      unsigned threads = 1);

// One-level contraction ratio with deletions, symmetrized over the two
// single-edge branches; cd referenced to the free binary-tree fixed point:
//   [q/2 (cd^p(-1/(z1+l)) + cd^p(-1/(z2+l))) + (1-q) cd^p(-1/(z1+z2+l))]
//     / (cd^p(z1)/2 + cd^p(z2)/2)
double mu2pq(const HPoint& z1, const HPoint& z2, const SpectralParam& lam, double p,
             double q_del);

struct Mu3pqParts {
  double total;       // full two-level outcome expansion
  double smooth_part; // (1-q)^2 * mu3p(zs, (0,0))
  double remainder;   // the deletion terms, summed independently
};

// Two-level percolation functional expanded over the 3x3 outcome combinations;
// total must equal smooth_part + remainder (checked to 1e-9).
Mu3pqParts mu3pq_decomposition(const std::array<HPoint, 3>& zs, const SpectralParam& lam,
                               double p, double q_del);

}  // namespace greenrec
