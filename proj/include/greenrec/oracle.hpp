#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "greenrec/graph.hpp"
#include "greenrec/halfplane.hpp"

namespace greenrec {
namespace oracle {

// Explicit truncation H = -(weighted adjacency) + diag(q), root at index 0.
struct FiniteHamiltonian {
  Eigen::SparseMatrix<double> h;
  int root = 0;
};

// Named finite models, reproducible from (descriptor, depth, seed).
struct ModelDescriptor {
  enum class Type {
    chain,
    kary_tree,
    box,
    regular_loop_tree,
    meanfield_loop_tree,
    percolation_sample
  };
  Type type = Type::chain;
  std::size_t k = 2;        // kary_tree branching
  std::size_t dims = 2;     // box dimension
  double gamma = 0.0;       // loop weight
  double q_del = 0.0;       // percolation deletion probability
  bool meanfield_diagonal = true;
};

// Desk-scale caps: tree-like depth <= 16, box side <= 64.
RootedGraph build_graph(const ModelDescriptor& m, std::size_t depth, std::uint64_t seed = 0);

FiniteHamiltonian build_truncation(const RootedGraph& g, const std::vector<double>& pot = {});
FiniteHamiltonian build_truncation(const ModelDescriptor& m, std::size_t depth,
                                   std::uint64_t seed = 0,
                                   const std::vector<double>& pot = {});

// e_v^T (H - lambda)^{-1} e_v via sparse factorization; Im of the result is
// positive for Im(lambda) > 0.
std::complex<double> solve_green(const FiniteHamiltonian& h, const SpectralParam& lam, int v);

// Full sphere-n block P_n (H_n - lambda)^{-1} P_n of the radial truncation
// H_n = P_{n,inf} H P_{n,inf} (dense; test-scale sizes only).
Eigen::MatrixXcd truncated_green_block(const FiniteHamiltonian& h,
                                       const SphereDecomposition& dec, std::size_t n,
                                       const SpectralParam& lam);

// Dense symmetric spectrum, ascending. Capped at dimension 4096.
std::vector<double> eig_spectrum(const FiniteHamiltonian& h);

}  // namespace oracle
}  // namespace greenrec
