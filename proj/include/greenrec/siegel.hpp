#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "greenrec/graph.hpp"
#include "greenrec/halfplane.hpp"

namespace greenrec {

// Complex symmetric matrix Z = X + iY with Y positive definite; the
// matrix-valued analogue of the upper half-plane for sphere blocks.
class SiegelPoint {
 public:
  explicit SiegelPoint(Eigen::MatrixXcd z);
  explicit SiegelPoint(const HPoint& z);

  const Eigen::MatrixXcd& matrix() const { return z_; }
  Eigen::Index dim() const { return z_.rows(); }
  Eigen::MatrixXd imag_part() const;  // Y, real symmetric
  HPoint as_hpoint() const;           // 1x1 only

 private:
  Eigen::MatrixXcd z_;
};

// One sphere step of the matrix recursion:
//   Z -> -(E_n^T Z E_n + D_n - diag(q_n) + lambda)^{-1},
// mapping the Siegel space of S_{n+1} into that of S_n (Schur complement of
// the truncated resolvent).
SiegelPoint siegel_mobius(const SiegelPoint& z, const SphereDecomposition& dec,
                          std::size_t n, const Eigen::VectorXd& q_n,
                          const SpectralParam& lam);

// Initialization of the deepest sphere.
struct SeedSpec {
  enum class Mode {
    scalar,    // seed * identity
    matrix,    // explicit Siegel point
    dirichlet  // the deepest sphere's own resolvent -(D_L - q_L + lambda)^{-1},
               // matching a hard truncation at that depth
  };
  Mode mode = Mode::scalar;
  std::complex<double> scalar{0.0, 1.0};
  std::optional<Eigen::MatrixXcd> matrix;

  static SeedSpec scalar_seed(std::complex<double> s) { return {Mode::scalar, s, {}}; }
  static SeedSpec matrix_seed(Eigen::MatrixXcd m) {
    return {Mode::matrix, {0.0, 1.0}, std::move(m)};
  }
  static SeedSpec dirichlet() { return {Mode::dirichlet, {0.0, 1.0}, {}}; }
};

// Root Green value by composing the sphere recursion from `depth` down to the
// root. Checks the trivial-kernel condition on every forward block on the way.
// Radially tree-like decompositions (no intra-sphere edges, one parent per
// vertex) with a diagonal seed take a per-entry scalar fast path; everything
// else runs dense with sphere sizes capped at 2048.
HPoint green_root_graph(const RootedGraph& g, const std::vector<double>& pot,
                        const SpectralParam& lam, std::size_t depth,
                        const SeedSpec& seed = {});

// Operator norm of Y^{-1/2} W Y^{-1/2}; the Finsler length of the tangent W at Z.
double finsler_norm(const SiegelPoint& z, const Eigen::MatrixXcd& w);

// Midpoint-rule length of the straight segment from Z1 to Z2; an upper bound
// for the Finsler distance (the segment stays in the Siegel space by convexity
// of the positive-definite cone).
double finsler_path_upper(const SiegelPoint& z1, const SiegelPoint& z2,
                          std::size_t segments);

// true iff E_n has trivial kernel (full column rank)
std::vector<bool> check_kernel_condition(const SphereDecomposition& dec);

}  // namespace greenrec
