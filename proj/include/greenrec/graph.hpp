#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

namespace greenrec {

// Undirected weighted graph rooted at vertex 0. Edges are stored symmetrically;
// self-loops (diagonal adjacency weights) are allowed for the mean-field model.
class RootedGraph {
 public:
  explicit RootedGraph(std::size_t n_vertices);

  void add_edge(std::uint32_t u, std::uint32_t v, double weight = 1.0);
  std::size_t size() const { return adj_.size(); }
  const std::vector<std::pair<std::uint32_t, double>>& neighbors(std::uint32_t v) const {
    return adj_[v];
  }
  std::size_t max_degree() const;

  static RootedGraph half_line(std::size_t sites);
  static RootedGraph kary_tree(std::size_t k, std::size_t depth);
  // {0..side-1}^d box with l1-nearest-neighbor edges, rooted at the origin
  static RootedGraph box(std::size_t dims, std::size_t side);
  // binary tree plus a weight-gamma cycle inside each sphere n >= 2; the
  // two-vertex sphere n = 1 gets a single edge of weight 2*gamma
  static RootedGraph regular_loop_tree(double gamma, std::size_t depth);
  // binary tree plus complete-graph weights gamma*2^-n inside each sphere;
  // include_diagonal additionally puts gamma*2^-n on the diagonal (full
  // rank-one form), which is the convention matching the two-interval spectrum
  static RootedGraph meanfield_loop_tree(double gamma, std::size_t depth,
                                         bool include_diagonal = true);
  // binary tree with one forward edge deleted per vertex w.p. q_del (split
  // evenly between the two children), both kept w.p. 1-q_del
  static RootedGraph percolation_tree_sample(double q_del, std::size_t depth,
                                             std::uint64_t seed);
  // text lines "u v [weight]"; vertex ids are nonnegative integers, root is 0
  static RootedGraph from_edge_list(std::istream& in);

 private:
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
};

// Breadth-first sphere decomposition: S_n = vertices at distance n from the
// root, intra-sphere blocks D_n and forward blocks E_n : l2(S_n) -> l2(S_{n+1}).
struct SphereDecomposition {
  std::vector<std::vector<std::uint32_t>> spheres;
  std::vector<Eigen::SparseMatrix<double>> intra;    // D_n, |S_n| x |S_n|
  std::vector<Eigen::SparseMatrix<double>> forward;  // E_n, |S_{n+1}| x |S_n|
  std::size_t unreachable = 0;  // vertices never reached from the root
};

SphereDecomposition decompose_spheres(const RootedGraph& g, std::size_t depth);

}  // namespace greenrec
