#include "greenrec/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "greenrec/errors.hpp"

namespace greenrec {
namespace oracle {

RootedGraph build_graph(const ModelDescriptor& m, std::size_t depth, std::uint64_t seed) {
  switch (m.type) {
    case ModelDescriptor::Type::chain:
      return RootedGraph::half_line(depth + 1);
    case ModelDescriptor::Type::kary_tree:
      if (depth > 16) throw size_cap_exceeded("build_graph: tree depth > 16");
      return RootedGraph::kary_tree(m.k, depth);
    case ModelDescriptor::Type::box:
      if (depth + 1 > 64) throw size_cap_exceeded("build_graph: box side > 64");
      return RootedGraph::box(m.dims, depth + 1);
    case ModelDescriptor::Type::regular_loop_tree:
      if (depth > 16) throw size_cap_exceeded("build_graph: tree depth > 16");
      return RootedGraph::regular_loop_tree(m.gamma, depth);
    case ModelDescriptor::Type::meanfield_loop_tree:
      if (depth > 16) throw size_cap_exceeded("build_graph: tree depth > 16");
      return RootedGraph::meanfield_loop_tree(m.gamma, depth, m.meanfield_diagonal);
    case ModelDescriptor::Type::percolation_sample:
      if (depth > 20) throw size_cap_exceeded("build_graph: percolation depth > 20");
      return RootedGraph::percolation_tree_sample(m.q_del, depth, seed);
  }
  throw std::invalid_argument("build_graph: unknown model");
}

FiniteHamiltonian build_truncation(const RootedGraph& g, const std::vector<double>& pot) {
  const std::size_t n = g.size();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t v = 0; v < n; ++v) {
    double diag = v < pot.size() ? pot[v] : 0.0;
    for (const auto& [w, wt] : g.neighbors(v)) {
      if (w == static_cast<std::uint32_t>(v))
        diag -= wt;  // self-loop weight enters -Delta on the diagonal
      else
        trip.emplace_back(static_cast<int>(v), static_cast<int>(w), -wt);
    }
    if (diag != 0.0) trip.emplace_back(static_cast<int>(v), static_cast<int>(v), diag);
  }
  FiniteHamiltonian h;
  h.h.resize(static_cast<int>(n), static_cast<int>(n));
  h.h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

FiniteHamiltonian build_truncation(const ModelDescriptor& m, std::size_t depth,
                                   std::uint64_t seed, const std::vector<double>& pot) {
  return build_truncation(build_graph(m, depth, seed), pot);
}

std::complex<double> solve_green(const FiniteHamiltonian& h, const SpectralParam& lam, int v) {
  lam.require_positive_im("solve_green");
  const int n = static_cast<int>(h.h.rows());
  if (v < 0 || v >= n) throw std::invalid_argument("solve_green: vertex out of range");
  Eigen::SparseMatrix<std::complex<double>> a = h.h.cast<std::complex<double>>();
  Eigen::SparseMatrix<std::complex<double>> id(n, n);
  id.setIdentity();
  a -= lam.value() * id;
  Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw numerical_degeneracy("solve_green: factorization failed");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs[v] = 1.0;
  const Eigen::VectorXcd phi = lu.solve(rhs);
  return phi[v];
}

Eigen::MatrixXcd truncated_green_block(const FiniteHamiltonian& h,
                                       const SphereDecomposition& dec, std::size_t n,
                                       const SpectralParam& lam) {
  lam.require_positive_im("truncated_green_block");
  // vertices at distance >= n, sphere n first (in sphere order)
  std::vector<int> keep;
  for (std::size_t lvl = n; lvl < dec.spheres.size(); ++lvl)
    for (std::uint32_t v : dec.spheres[lvl]) keep.push_back(static_cast<int>(v));
  const int m = static_cast<int>(keep.size());
  const int dn = static_cast<int>(dec.spheres[n].size());
  Eigen::MatrixXcd sub(m, m);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h.h);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub(i, j) = dense(keep[i], keep[j]);
  sub -= lam.value() * Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd inv = sub.partialPivLu().inverse();
  return inv.topLeftCorner(dn, dn);
}

std::vector<double> eig_spectrum(const FiniteHamiltonian& h) {
  const Eigen::Index n = h.h.rows();
  if (n > 4096) throw size_cap_exceeded("eig_spectrum: dimension > 4096");
  Eigen::MatrixXd dense = Eigen::MatrixXd(h.h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

}  // namespace oracle
}  // namespace greenrec
