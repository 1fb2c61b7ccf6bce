#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "greenrec/halfplane.hpp"

namespace greenrec {

// Fourier symbol of a circulant truncated Green matrix on sphere `level` of
// the regular loop tree: f_k, k = 0..2^level - 1, all in H, with the
// real-symmetric-first-row symmetry f_k = f_{N-k mod N}.
struct CirculantSpectrum {
  std::size_t level;
  Eigen::VectorXcd f;

  CirculantSpectrum(std::size_t level, Eigen::VectorXcd f);
};

// f_j = sum_l z_l e^{2 pi i l j / N} for a circulant with first row z;
// satisfies U* Z U = diag(f). N must be a power of two.
Eigen::VectorXcd fft_symbol(const Eigen::VectorXcd& first_row);
// inverse: first row from the symbol
Eigen::VectorXcd fft_symbol_inverse(const Eigen::VectorXcd& f);

// One level of the loop-tree recursion in Fourier variables,
//   f^{(n)}_k = -1 / (2 cos^2(pi k / 2N) f^{(n+1)}_k
//               + 2 sin^2(pi k / 2N) f^{(n+1)}_{k+N}
//               + 2 gamma cos(2 pi k / N) + lambda),  N = 2^n,
// where the level-(n+1) spectrum is read at indices k and k+N of the finer
// grid (same Fourier mode, halved angle). The root level n = 0 carries no
// intra-sphere loop, so its gamma term is dropped.
CirculantSpectrum loop_recursion_step(const CirculantSpectrum& f_next, double gamma,
                                      const SpectralParam& lam);

// All levels from `levels` down to 0. The deepest level is seeded with the
// given constant (default: the theta = 0 channel fixed point, which makes the
// k = 0 line exact at every level and reduces exactly to the free tree at
// gamma = 0). An explicit spectrum can be supplied instead.
std::vector<CirculantSpectrum> loop_levels(double gamma, const SpectralParam& lam,
                                           std::size_t levels,
                                           std::optional<std::complex<double>> seed = {});
std::vector<CirculantSpectrum> loop_levels_from(CirculantSpectrum deepest, double gamma,
                                                const SpectralParam& lam);

// Root Green value f^{(0)}_0 of the regular loop tree.
HPoint loop_green_root(double gamma, const SpectralParam& lam, std::size_t levels);

// H-fixed point of w -> -1/(2w + 2 gamma + lambda); closed form
// -(2 gamma + lambda)/4 + (i/4) sqrt(8 - (2 gamma + lambda)^2). Out of band for
// real lambda with |2 gamma + lambda| >= 2 sqrt(2).
HPoint theta_zero_fixed_point(double gamma, const SpectralParam& lam);

// <phi_n, Delta_gamma phi_n> for the normalized sphere-uniform state phi_n on
// the regular loop tree; equals 2 gamma for every n >= 1.
double variational_energy_check(double gamma, std::size_t n);

struct Interval {
  double lo, hi;
};

// Spectrum of the mean-field loop tree adjacency: [-2 sqrt 2, 2 sqrt 2] union
// [-2 sqrt 2 + gamma, 2 sqrt 2 + gamma].
std::pair<Interval, Interval> meanfield_spectrum(double gamma);

struct MeanfieldSupportCheck {
  std::size_t n_eigenvalues;
  std::size_t outside_union;   // eigenvalues farther than `margin` outside both intervals
  double max_excursion;        // largest distance outside the union
  double top_eigenvalue;
  double top_edge;             // 2 sqrt 2 + gamma
};

// Dense eigencheck of the depth-L truncation against the stated interval union.
MeanfieldSupportCheck meanfield_support_check(double gamma, std::size_t depth, double margin,
                                              bool include_diagonal = true);

}  // namespace greenrec
