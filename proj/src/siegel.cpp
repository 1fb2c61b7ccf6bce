#include "greenrec/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "greenrec/errors.hpp"

namespace greenrec {

namespace {

constexpr std::size_t kDenseSphereCap = 2048;
constexpr double kRankTol = 1e-10;  // singular values below tol * largest count as zero

Eigen::MatrixXd imag_of(const Eigen::MatrixXcd& z) { return z.imag(); }

void validate_siegel(const Eigen::MatrixXcd& z) {
  if (z.rows() != z.cols()) throw std::invalid_argument("SiegelPoint: matrix not square");
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    throw std::invalid_argument("SiegelPoint: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(imag_of(z), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw std::invalid_argument("SiegelPoint: imaginary part not positive definite");
}

}  // namespace

SiegelPoint::SiegelPoint(Eigen::MatrixXcd z) : z_(std::move(z)) { validate_siegel(z_); }

SiegelPoint::SiegelPoint(const HPoint& z) : z_(1, 1) { z_(0, 0) = z.value(); }

Eigen::MatrixXd SiegelPoint::imag_part() const { return imag_of(z_); }

HPoint SiegelPoint::as_hpoint() const {
  if (dim() != 1) throw std::invalid_argument("SiegelPoint::as_hpoint: dimension != 1");
  return HPoint(z_(0, 0));
}

namespace {

Eigen::MatrixXcd mobius_matrix(const Eigen::MatrixXcd& z, const SphereDecomposition& dec,
                               std::size_t n, const Eigen::VectorXd& q_n,
                               const std::complex<double>& lam) {
  const Eigen::SparseMatrix<double>& e = dec.forward.at(n);
  const Eigen::Index dn = e.cols();
  if (z.rows() != e.rows())
    throw std::invalid_argument("siegel_mobius: dimension mismatch with E_n");
  if (q_n.size() != dn) throw std::invalid_argument("siegel_mobius: q_n has wrong length");
  Eigen::MatrixXcd m = e.transpose().cast<std::complex<double>>() * z *
                       e.cast<std::complex<double>>();
  m += dec.intra.at(n).cast<std::complex<double>>();
  m -= q_n.cast<std::complex<double>>().asDiagonal().toDenseMatrix();
  m += lam * Eigen::MatrixXcd::Identity(dn, dn);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite())
    throw numerical_degeneracy("siegel_mobius: singular step matrix at sphere " +
                               std::to_string(n));
  return -inv;
}

}  // namespace

SiegelPoint siegel_mobius(const SiegelPoint& z, const SphereDecomposition& dec,
                          std::size_t n, const Eigen::VectorXd& q_n,
                          const SpectralParam& lam) {
  return SiegelPoint(mobius_matrix(z.matrix(), dec, n, q_n, lam.value()));
}

namespace {

struct TreeStructure {
  bool is_tree = true;                         // no intra edges, one parent per vertex
  std::vector<std::vector<std::pair<Eigen::Index, double>>> children;  // per level n: for each
                                               // v in S_n, (child row, edge weight)
};

// A decomposition is radially tree-like when every D_n is empty and every row
// of E_n holds exactly one entry (each vertex has a unique parent).
bool radially_tree_like(const SphereDecomposition& dec, std::size_t depth) {
  for (std::size_t n = 0; n < depth; ++n) {
    if (dec.intra[n].nonZeros() != 0) return false;
    const auto& e = dec.forward[n];
    std::vector<int> row_count(e.rows(), 0);
    for (int k = 0; k < e.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(e, k); it; ++it)
        if (++row_count[it.row()] > 1) return false;
    for (int c : row_count)
      if (c != 1) return false;
  }
  if (dec.intra[depth].nonZeros() != 0) return false;
  return true;
}

std::vector<bool> kernel_flags(const SphereDecomposition& dec, std::size_t levels) {
  std::vector<bool> ok;
  ok.reserve(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const auto& e = dec.forward[n];
    // structural shortcut: disjoint-row columns are independent iff all nonzero
    std::vector<int> row_count(e.rows(), 0);
    bool forest = true;
    for (int k = 0; k < e.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(e, k); it; ++it)
        if (++row_count[it.row()] > 1) forest = false;
    if (forest) {
      bool all_cols = true;
      for (int k = 0; k < e.outerSize(); ++k) {
        bool nonempty = false;
        for (Eigen::SparseMatrix<double>::InnerIterator it(e, k); it; ++it)
          if (it.value() != 0.0) nonempty = true;
        if (!nonempty) all_cols = false;
      }
      ok.push_back(all_cols);
      continue;
    }
    Eigen::MatrixXd dense = Eigen::MatrixXd(e);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense);
    qr.setThreshold(kRankTol);
    ok.push_back(qr.rank() == dense.cols());
  }
  return ok;
}

}  // namespace

std::vector<bool> check_kernel_condition(const SphereDecomposition& dec) {
  return kernel_flags(dec, dec.forward.size());
}

HPoint green_root_graph(const RootedGraph& g, const std::vector<double>& pot,
                        const SpectralParam& lam, std::size_t depth,
                        const SeedSpec& seed) {
  if (depth < 1) throw std::invalid_argument("green_root_graph: depth must be >= 1");
  lam.require_positive_im("green_root_graph");
  const SphereDecomposition dec = decompose_spheres(g, depth);
  if (dec.spheres.size() <= depth)
    throw std::invalid_argument("green_root_graph: graph shallower than requested depth");

  const auto q_of = [&pot](const std::vector<std::uint32_t>& sphere) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(sphere.size());
    for (std::size_t i = 0; i < sphere.size(); ++i)
      if (sphere[i] < pot.size()) q[i] = pot[sphere[i]];
    return q;
  };

  const std::vector<bool> kernels = kernel_flags(dec, depth);
  for (std::size_t n = 0; n < depth; ++n)
    if (!kernels[n])
      throw std::invalid_argument("green_root_graph: E_" + std::to_string(n) +
                                  " has nontrivial kernel");

  const std::complex<double> l = lam.value();
  const bool diagonal_seed = seed.mode != SeedSpec::Mode::matrix;

  if (diagonal_seed && radially_tree_like(dec, depth)) {
    // scalar recursion per vertex: (E^T Z E) is diagonal with entries
    // sum over children of weight^2 * z_child
    Eigen::VectorXcd z;
    {
      const auto& sphere = dec.spheres[depth];
      const Eigen::VectorXd q = q_of(sphere);
      z.resize(sphere.size());
      if (seed.mode == SeedSpec::Mode::dirichlet) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = -1.0 / (-q[i] + l);
      } else {
        z.setConstant(seed.scalar);
      }
    }
    for (std::size_t n = depth; n-- > 0;) {
      const auto& e = dec.forward[n];
      const Eigen::VectorXd q = q_of(dec.spheres[n]);
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(e.cols());
      for (int k = 0; k < e.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(e, k); it; ++it)
          acc[it.col()] += it.value() * it.value() * z[it.row()];
      Eigen::VectorXcd next(e.cols());
      for (Eigen::Index i = 0; i < next.size(); ++i)
        next[i] = -1.0 / (acc[i] - q[i] + l);
      z = std::move(next);
    }
    return HPoint(z[0]);
  }

  for (std::size_t n = 0; n <= depth; ++n)
    if (dec.spheres[n].size() > kDenseSphereCap)
      throw size_cap_exceeded("green_root_graph: sphere " + std::to_string(n) + " has " +
                              std::to_string(dec.spheres[n].size()) +
                              " vertices, dense cap is " + std::to_string(kDenseSphereCap));

  Eigen::MatrixXcd z;
  {
    const std::size_t d_deep = dec.spheres[depth].size();
    switch (seed.mode) {
      case SeedSpec::Mode::scalar:
        z = seed.scalar * Eigen::MatrixXcd::Identity(d_deep, d_deep);
        break;
      case SeedSpec::Mode::matrix:
        z = SiegelPoint(*seed.matrix).matrix();
        if (z.rows() != static_cast<Eigen::Index>(d_deep))
          throw std::invalid_argument("green_root_graph: seed matrix dimension mismatch");
        break;
      case SeedSpec::Mode::dirichlet: {
        Eigen::MatrixXcd m = dec.intra[depth].cast<std::complex<double>>().toDense();
        m -= q_of(dec.spheres[depth]).cast<std::complex<double>>().asDiagonal().toDenseMatrix();
        m += l * Eigen::MatrixXcd::Identity(d_deep, d_deep);
        z = -m.partialPivLu().inverse();
        break;
      }
    }
  }
  for (std::size_t n = depth; n-- > 0;)
    z = mobius_matrix(z, dec, n, q_of(dec.spheres[n]), l);
  return HPoint(z(0, 0));
}

double finsler_norm(const SiegelPoint& z, const Eigen::MatrixXcd& w) {
  if (w.rows() != z.dim() || w.cols() != z.dim())
    throw std::invalid_argument("finsler_norm: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.imag_part());
  const double y_min = es.eigenvalues().minCoeff();
  if (y_min < 1e-12)
    throw numerical_degeneracy("finsler_norm: Im Z nearly singular");
  const Eigen::MatrixXd y_inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  const Eigen::MatrixXcd scaled = y_inv_sqrt * w * y_inv_sqrt;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(scaled);
  return svd.singularValues()(0);
}

double finsler_path_upper(const SiegelPoint& z1, const SiegelPoint& z2,
                          std::size_t segments) {
  if (z1.dim() != z2.dim()) throw std::invalid_argument("finsler_path_upper: dimensions differ");
  if (segments < 1) throw std::invalid_argument("finsler_path_upper: segments < 1");
  const Eigen::MatrixXcd delta = z2.matrix() - z1.matrix();
  if (delta.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  double len = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double t = (double(s) + 0.5) / double(segments);
    const SiegelPoint mid(((1.0 - t) * z1.matrix() + t * z2.matrix()).eval());
    len += finsler_norm(mid, delta);
  }
  return len / double(segments);
}

}  // namespace greenrec
