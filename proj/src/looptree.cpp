#include "greenrec/looptree.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "greenrec/errors.hpp"
#include "greenrec/oracle.hpp"
#include "greenrec/tree.hpp"

namespace greenrec {

namespace {

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_spectrum(std::size_t level, const Eigen::VectorXcd& f) {
  if (f.size() != (Eigen::Index(1) << level))
    throw std::invalid_argument("CirculantSpectrum: size is not 2^level");
  const Eigen::Index n = f.size();
  double scale = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(f[k].imag() > 0.0))
      throw std::invalid_argument("CirculantSpectrum: symbol leaves the upper half-plane");
    scale = std::max(scale, std::abs(f[k]));
  }
  for (Eigen::Index k = 1; k < n; ++k)
    if (std::abs(f[k] - f[n - k]) > 1e-9 * std::max(1.0, scale))
      throw numerical_degeneracy("CirculantSpectrum: f_k = f_{N-k} symmetry violated");
}

}  // namespace

CirculantSpectrum::CirculantSpectrum(std::size_t lvl, Eigen::VectorXcd symbol)
    : level(lvl), f(std::move(symbol)) {
  validate_spectrum(level, f);
}

Eigen::VectorXcd fft_symbol(const Eigen::VectorXcd& first_row) {
  const std::size_t n = static_cast<std::size_t>(first_row.size());
  if (!power_of_two(n)) throw std::invalid_argument("fft_symbol: length not a power of two");
  // f_j = sum_l z_l e^{+2 pi i l j / N} = N * ifft(z)
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(first_row.data(), first_row.data() + n), out(n);
  fft.inv(out, in);
  Eigen::VectorXcd f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = out[j] * double(n);
  return f;
}

Eigen::VectorXcd fft_symbol_inverse(const Eigen::VectorXcd& f) {
  const std::size_t n = static_cast<std::size_t>(f.size());
  if (!power_of_two(n))
    throw std::invalid_argument("fft_symbol_inverse: length not a power of two");
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(f.data(), f.data() + n), out(n);
  fft.fwd(out, in);
  Eigen::VectorXcd z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = out[j] / double(n);
  return z;
}

CirculantSpectrum loop_recursion_step(const CirculantSpectrum& f_next, double gamma,
                                      const SpectralParam& lam) {
  lam.require_positive_im("loop_recursion_step");
  if (f_next.level < 1)
    throw std::invalid_argument("loop_recursion_step: nothing below level 0");
  const std::size_t level = f_next.level - 1;
  const Eigen::Index n = Eigen::Index(1) << level;  // N = 2^n target size
  const std::complex<double> l = lam.value();
  Eigen::VectorXcd f(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double theta = M_PI * double(k) / (2.0 * double(n));
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    std::complex<double> den =
        2.0 * c2 * f_next.f[k] + 2.0 * s2 * f_next.f[k + n] + l;
    if (level >= 1) den += 2.0 * gamma * std::cos(2.0 * M_PI * double(k) / double(n));
    if (std::norm(den) == 0.0)
      throw numerical_degeneracy("loop_recursion_step: degenerate denominator");
    f[k] = -1.0 / den;
  }
  return CirculantSpectrum(level, std::move(f));
}

std::vector<CirculantSpectrum> loop_levels_from(CirculantSpectrum deepest, double gamma,
                                                const SpectralParam& lam) {
  std::vector<CirculantSpectrum> levels;
  levels.reserve(deepest.level + 1);
  levels.push_back(std::move(deepest));
  while (levels.back().level > 0)
    levels.push_back(loop_recursion_step(levels.back(), gamma, lam));
  return levels;
}

std::vector<CirculantSpectrum> loop_levels(double gamma, const SpectralParam& lam,
                                           std::size_t levels,
                                           std::optional<std::complex<double>> seed) {
  if (levels < 1) throw std::invalid_argument("loop_levels: levels must be >= 1");
  if (levels > 24) throw size_cap_exceeded("loop_levels: levels > 24");
  if (gamma < 0.0) throw std::invalid_argument("loop_levels: gamma < 0");
  const std::complex<double> s =
      seed ? *seed : theta_zero_fixed_point(gamma, lam).value();
  Eigen::VectorXcd f = Eigen::VectorXcd::Constant(Eigen::Index(1) << levels, s);
  return loop_levels_from(CirculantSpectrum(levels, std::move(f)), gamma, lam);
}

HPoint loop_green_root(double gamma, const SpectralParam& lam, std::size_t levels) {
  const auto stack = loop_levels(gamma, lam, levels);
  return HPoint(stack.back().f[0]);
}

HPoint theta_zero_fixed_point(double gamma, const SpectralParam& lam) {
  if (gamma < 0.0) throw std::invalid_argument("theta_zero_fixed_point: gamma < 0");
  const std::complex<double> shift = 2.0 * gamma + lam.value();
  if (lam.im() == 0.0 && std::abs(shift.real()) >= 2.0 * std::sqrt(2.0))
    throw out_of_band_error("theta_zero_fixed_point: |2 gamma + lambda| >= 2 sqrt 2");
  // 2 w^2 + (2 gamma + lambda) w + 1 = 0, H branch
  const std::complex<double> s = std::sqrt(shift * shift - 8.0);
  const std::complex<double> r1 = 0.25 * (-shift + s);
  const std::complex<double> r2 = 0.25 * (-shift - s);
  return HPoint(r1.imag() >= r2.imag() ? r1 : r2);
}

double variational_energy_check(double gamma, std::size_t n) {
  if (n < 1) throw std::invalid_argument("variational_energy_check: n must be >= 1");
  if (n > 16) throw size_cap_exceeded("variational_energy_check: n > 16");
  const RootedGraph g = RootedGraph::regular_loop_tree(gamma, n);
  const SphereDecomposition dec = decompose_spheres(g, n);
  const auto& sphere = dec.spheres.at(n);
  const double amp = 1.0 / std::sqrt(double(sphere.size()));
  // phi_n is supported on S_n only, so only intra-sphere weights contribute
  const Eigen::SparseMatrix<double>& d = dec.intra.at(n);
  double energy = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      energy += amp * it.value() * amp;
  return energy;
}

std::pair<Interval, Interval> meanfield_spectrum(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("meanfield_spectrum: gamma < 0");
  const double edge = 2.0 * std::sqrt(2.0);
  return {Interval{-edge, edge}, Interval{-edge + gamma, edge + gamma}};
}

MeanfieldSupportCheck meanfield_support_check(double gamma, std::size_t depth, double margin,
                                              bool include_diagonal) {
  const auto [tree_band, shifted_band] = meanfield_spectrum(gamma);
  oracle::ModelDescriptor m;
  m.type = oracle::ModelDescriptor::Type::meanfield_loop_tree;
  m.gamma = gamma;
  m.meanfield_diagonal = include_diagonal;
  // eigenvalues of the adjacency = -(spectrum of H with zero potential)
  const auto h = oracle::build_truncation(m, depth);
  std::vector<double> eigs = oracle::eig_spectrum(h);
  for (double& e : eigs) e = -e;
  std::sort(eigs.begin(), eigs.end());

  MeanfieldSupportCheck out{eigs.size(), 0, 0.0, eigs.back(), shifted_band.hi};
  const auto excursion = [&](double e) {
    const auto dist = [&](const Interval& iv) {
      if (e < iv.lo) return iv.lo - e;
      if (e > iv.hi) return e - iv.hi;
      return 0.0;
    };
    return std::min(dist(tree_band), dist(shifted_band));
  };
  for (double e : eigs) {
    const double d = excursion(e);
    out.max_excursion = std::max(out.max_excursion, d);
    if (d > margin) ++out.outside_union;
  }
  return out;
}

}  // namespace greenrec
