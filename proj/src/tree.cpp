#include "greenrec/tree.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace greenrec {

TreeModel TreeModel::free_tree(std::size_t k) {
  TreeModel m;
  m.branching = k;
  return m;
}

TreeModel TreeModel::iid(std::size_t k, Distribution nu, double disorder) {
  TreeModel m;
  m.branching = k;
  m.potential = Iid{nu, disorder};
  m.validate();
  return m;
}

TreeModel TreeModel::two_periodic(JointPairDistribution nu, double disorder,
                                  Distribution root_measure) {
  TreeModel m;
  m.branching = 2;
  m.potential = TwoPeriodic{std::move(nu), root_measure, disorder};
  m.validate();
  return m;
}

void TreeModel::validate() const {
  if (branching < 1) throw std::invalid_argument("TreeModel: branching must be >= 1");
  if (const auto* iid = std::get_if<Iid>(&potential)) {
    if (std::abs(iid->nu.mean()) > 1e-12)
      throw std::invalid_argument("TreeModel: iid distribution must have mean zero");
    if (!(iid->disorder >= 0.0)) throw std::invalid_argument("TreeModel: disorder < 0");
  } else if (const auto* tp = std::get_if<TwoPeriodic>(&potential)) {
    if (tp->nu.support_bound() > 1.0 + 1e-12)
      throw std::invalid_argument("TreeModel: two-periodic pair support must lie in [-1,1]^2");
    if (std::abs(tp->nu.mean_sum()) > 1e-12)
      throw std::invalid_argument("TreeModel: two-periodic pair must be centered, E[q1+q2]=0");
    if (!(tp->nu.c11() + tp->nu.c22() > 0.0))
      throw std::invalid_argument("TreeModel: two-periodic pair has zero variance");
    if (!(tp->disorder >= 0.0)) throw std::invalid_argument("TreeModel: disorder < 0");
  }
}

HPoint psi_step(std::span<const HPoint> zs, double q, const SpectralParam& lam) {
  if (zs.empty()) throw std::invalid_argument("psi_step: needs at least one point");
  std::complex<double> s = lam.value() - q;
  for (const HPoint& z : zs) s += z.value();
  const double n2 = std::norm(s);
  if (n2 == 0.0) throw numerical_degeneracy("psi_step: degenerate denominator");
  return HPoint(-std::conj(s) / n2);
}

HPoint tree_fixed_point(std::size_t k, const SpectralParam& lam) {
  if (k < 1) throw std::invalid_argument("tree_fixed_point: k must be >= 1");
  const double kk = double(k);
  const std::complex<double> l = lam.value();
  if (lam.im() == 0.0 && std::abs(lam.re()) >= 2.0 * std::sqrt(kk))
    throw out_of_band_error("tree_fixed_point: real lambda outside (-2 sqrt k, 2 sqrt k)");
  // k z^2 + lambda z + 1 = 0
  const std::complex<double> s = std::sqrt(l * l - 4.0 * kk);
  const std::complex<double> r1 = (-l + s) / (2.0 * kk);
  const std::complex<double> r2 = (-l - s) / (2.0 * kk);
  return HPoint(r1.imag() >= r2.imag() ? r1 : r2);
}

namespace {

// raw complex step, skipping HPoint round trips in hot loops
inline std::complex<double> psi_raw(const std::complex<double>& sum_children,
                                    double q, const std::complex<double>& lam) {
  const std::complex<double> w = sum_children + lam - q;
  return -std::conj(w) / std::norm(w);
}

void check_pool_args(std::size_t pool_size, std::size_t generations) {
  if (pool_size < 10) throw std::invalid_argument("population: pool_size must be >= 10");
  if (generations < 1) throw std::invalid_argument("population: generations must be >= 1");
}

template <typename MakeSample>
std::vector<std::complex<double>> evolve_pool(std::size_t pool_size, std::size_t generations,
                                              const std::complex<double>& start,
                                              unsigned threads, MakeSample&& make) {
  std::vector<std::complex<double>> pool(pool_size, start), next(pool_size);
  for (std::size_t g = 1; g <= generations; ++g) {
    const auto slot = [&](std::size_t j) { next[j] = make(pool, g, j); };
    if (threads <= 1) {
      for (std::size_t j = 0; j < pool_size; ++j) slot(j);
    } else {
      std::vector<std::thread> workers;
      const unsigned n_workers = std::min<unsigned>(threads, pool_size);
      for (unsigned w = 0; w < n_workers; ++w)
        workers.emplace_back([&, w] {
          for (std::size_t j = w; j < pool_size; j += n_workers) slot(j);
        });
      for (auto& th : workers) th.join();
    }
    pool.swap(next);
    // first invalid sample aborts with its generation index
    for (std::size_t j = 0; j < pool_size; ++j)
      if (!(pool[j].imag() > 1e-300))
        throw boundary_underflow("population: sample Im underflow at generation " +
                                 std::to_string(g));
  }
  return pool;
}

SamplePool finish_pool(std::vector<std::complex<double>> raw, const SpectralParam& lam,
                       std::size_t generations) {
  SamplePool out;
  out.samples.reserve(raw.size());
  for (const auto& z : raw) out.samples.emplace_back(z);
  out.lam = lam;
  out.generation = generations;
  return out;
}

}  // namespace

SamplePool population_green(const TreeModel& model, const SpectralParam& lam,
                            std::size_t pool_size, std::size_t generations,
                            std::uint64_t seed, const HPoint& start, unsigned threads) {
  model.validate();
  lam.require_positive_im("population_green");
  check_pool_args(pool_size, generations);
  if (std::holds_alternative<TreeModel::TwoPeriodic>(model.potential))
    return two_periodic_population(model, lam, pool_size, generations, seed, start, threads);
  if (std::holds_alternative<TreeModel::Oscillating>(model.potential))
    throw std::invalid_argument(
        "population_green: oscillating model is deterministic, use oscillating_green");

  const std::size_t k = model.branching;
  const std::complex<double> l = lam.value();
  const auto* iid = std::get_if<TreeModel::Iid>(&model.potential);

  auto raw = evolve_pool(
      pool_size, generations, start.value(), threads,
      [&](const std::vector<std::complex<double>>& pool, std::size_t g, std::size_t j) {
        SubStream rng(seed, g, j);
        std::complex<double> sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) sum += pool[rng.index(pool.size())];
        const double q = iid ? iid->disorder * iid->nu.sample(rng) : 0.0;
        return psi_raw(sum, q, l);
      });
  return finish_pool(std::move(raw), lam, generations);
}

SamplePool two_periodic_population(const TreeModel& model, const SpectralParam& lam,
                                   std::size_t pool_size, std::size_t generations,
                                   std::uint64_t seed, const HPoint& start,
                                   unsigned threads) {
  model.validate();
  lam.require_positive_im("two_periodic_population");
  check_pool_args(pool_size, generations);
  const auto* tp = std::get_if<TreeModel::TwoPeriodic>(&model.potential);
  if (!tp) throw std::invalid_argument("two_periodic_population: model is not two-periodic");

  const std::complex<double> l = lam.value();
  const double a = tp->disorder;
  // The pair (q1,q2) is repeated across a whole sphere, so per realization the
  // truncated Green values take exactly two values per level, evolving as
  //   beta_m' = Psi(beta_1, beta_2, a q_m, lambda),  m = 1,2,
  // with one fresh pair per level. Each pool slot carries one independent
  // realization of this two-value chain; the returned samples are the root
  // values, one Monte Carlo draw of G(0,0) per realization.
  std::vector<std::complex<double>> roots(pool_size);
  const auto run_chain = [&](std::size_t r) {
    std::complex<double> b1 = start.value(), b2 = start.value();
    for (std::size_t level = generations; level >= 1; --level) {
      SubStream rng(seed, r, level);
      const auto [q1, q2] = tp->nu.sample(rng);
      const std::complex<double> sum = b1 + b2;
      const std::complex<double> n1 = psi_raw(sum, a * q1, l);
      const std::complex<double> n2 = psi_raw(sum, a * q2, l);
      b1 = n1;
      b2 = n2;
      if (!(b1.imag() > 1e-300) || !(b2.imag() > 1e-300))
        throw boundary_underflow("two_periodic_population: Im underflow at level " +
                                 std::to_string(level));
    }
    SubStream root_rng(seed, r, 0);
    const double q0 = tp->root_measure.sample(root_rng);
    roots[r] = psi_raw(b1 + b2, a * q0, l);
  };
  if (threads <= 1) {
    for (std::size_t r = 0; r < pool_size; ++r) run_chain(r);
  } else {
    std::vector<std::thread> workers;
    const unsigned n_workers = std::min<unsigned>(threads, pool_size);
    for (unsigned w = 0; w < n_workers; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t r = w; r < pool_size; r += n_workers) run_chain(r);
      });
    for (auto& th : workers) th.join();
  }
  return finish_pool(std::move(roots), lam, generations);
}

HPoint oscillating_green(double delta0, const std::function<double(std::size_t)>& mod1,
                         const std::function<double(std::size_t)>& mod2,
                         const SpectralParam& lam, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("oscillating_green: depth must be >= 1");
  const std::complex<double> l = lam.value();
  // two values per sphere: every parent has one +delta child and one -delta child
  std::complex<double> plus(0.0, 1.0), minus(0.0, 1.0);
  for (std::size_t n = depth; n >= 1; --n) {
    const double v_plus = delta0 + (mod1 ? mod1(n) : 0.0);
    const double v_minus = -delta0 + (mod2 ? mod2(n) : 0.0);
    const std::complex<double> sum = plus + minus;
    plus = psi_raw(sum, v_plus, l);
    minus = psi_raw(sum, v_minus, l);
  }
  return HPoint(psi_raw(plus + minus, 0.0, l));
}

double moment_Mp(const SamplePool& pool, double p, const HPoint& z_ref) {
  if (!(p > 1.0)) throw std::invalid_argument("moment_Mp: p must be > 1");
  double acc = 0.0;
  for (const HPoint& z : pool.samples) acc += std::pow(cd_weight(z, z_ref), p);
  return acc / double(pool.samples.size());
}

MomentStat moment_Mp_stats(const SamplePool& pool, double p, const HPoint& z_ref) {
  if (!(p > 1.0)) throw std::invalid_argument("moment_Mp_stats: p must be > 1");
  const std::size_t n = pool.samples.size();
  double mean = 0.0;
  for (const HPoint& z : pool.samples) mean += std::pow(cd_weight(z, z_ref), p);
  mean /= double(n);
  double var = 0.0;
  for (const HPoint& z : pool.samples) {
    const double d = std::pow(cd_weight(z, z_ref), p) - mean;
    var += d * d;
  }
  var = n > 1 ? var / double(n - 1) : 0.0;
  return {mean, std::sqrt(var / double(n))};
}

double mu2p(const HPoint& z1, const HPoint& z2, double q, const SpectralParam& lam,
            double p) {
  const HPoint z_ref = tree_fixed_point(2, lam);
  const double denom =
      0.5 * std::pow(cd_weight(z1, z_ref), p) + 0.5 * std::pow(cd_weight(z2, z_ref), p);
  if (denom == 0.0)
    throw indeterminate_value("mu2p: 0/0, both arguments at the fixed point");
  const std::array<HPoint, 2> zs{z1, z2};
  const double num = std::pow(cd_weight(psi_step(zs, q, lam), z_ref), p);
  return num / denom;
}

double mu2p_boundary(const std::array<std::complex<double>, 2>& omega,
                     const std::array<double, 2>& v, double q, double lam_real, double p,
                     double r) {
  const double norm2 = std::norm(omega[0]) + std::norm(omega[1]);
  if (std::abs(norm2 - 1.0) > 1e-12)
    throw std::invalid_argument("mu2p_boundary: omega not normalized");
  if (r < 0.0) throw std::invalid_argument("mu2p_boundary: r < 0");

  // <(omega2, omega1), v> with the Hermitian inner product, v real
  const std::complex<double> swapped =
      std::conj(omega[1]) * v[0] + std::conj(omega[0]) * v[1];
  const double denom = 0.5 * std::pow(std::abs(omega[0]), 2.0 * p) +
                       0.5 * std::pow(std::abs(omega[1]), 2.0 * p);
  double core = 0.5 * std::norm(swapped);
  if (r > 0.0) {
    // reconstruct z_i from u_i = 1/(r omega_i): Im z solves
    // y - Im(u) sqrt(y) - Im(z_lambda) = 0, then z = z_lambda + sqrt(y) u
    const HPoint z_ref = tree_fixed_point(2, SpectralParam(lam_real));
    std::array<std::complex<double>, 2> z;
    for (int i = 0; i < 2; ++i) {
      const std::complex<double> u = 1.0 / (r * omega[i]);
      const double su = 0.5 * (u.imag() + std::sqrt(u.imag() * u.imag() + 4.0 * z_ref.im()));
      z[i] = z_ref.value() + su * u;
    }
    const double quad_denom = std::norm(omega[0] * omega[0] * (z[0] - z_ref.value())) +
                              std::norm(omega[1] * omega[1] * (z[1] - z_ref.value()));
    core += -q * r * swapped.real() +
            0.5 * q * q * std::norm(omega[0] * omega[1]) / quad_denom;
  }
  if (core < 0.0) core = 0.0;  // the exact expression is a cd value, >= 0
  return std::pow(core, p) / denom;
}

namespace {

constexpr std::array<std::array<int, 3>, 3> kCyclic{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};

}  // namespace

Mu3pValue mu3p(const std::array<HPoint, 3>& zs, const std::array<double, 2>& qs,
               const SpectralParam& lam, double p) {
  const HPoint z_ref = tree_fixed_point(2, lam);
  std::array<double, 3> cdp;
  double total_cdp = 0.0;
  for (int j = 0; j < 3; ++j) {
    cdp[j] = std::pow(cd_weight(zs[j], z_ref), p);
    total_cdp += cdp[j];
  }
  if (total_cdp == 0.0)
    throw indeterminate_value("mu3p: 0/0, all arguments at the fixed point");

  double direct = 0.0, reconstructed = 0.0;
  for (const auto& sig : kCyclic) {
    const std::array<HPoint, 2> inner_args{zs[sig[1]], zs[sig[2]]};
    const HPoint inner = psi_step(inner_args, qs[1], lam);
    const std::array<HPoint, 2> outer_args{zs[sig[0]], inner};
    const HPoint outer = psi_step(outer_args, qs[0], lam);
    direct += std::pow(cd_weight(outer, z_ref), p) / total_cdp;

    // decomposition: cd^p(outer) = mu2p(z_s1, inner) (cd^p(z_s1) + cd^p(inner))/2
    // and cd^p(inner) = mu2p(z_s2, z_s3) (cd^p(z_s2) + cd^p(z_s3))/2; a factor
    // with weight zero is skipped so fixed-point arguments stay harmless
    const std::array<double, 3> n{cdp[sig[0]] / total_cdp, cdp[sig[1]] / total_cdp,
                                  cdp[sig[2]] / total_cdp};
    const double inner_weight = n[1] + n[2];
    double term = 0.0;
    const double outer_denom =
        0.5 * cdp[sig[0]] + 0.5 * std::pow(cd_weight(inner, z_ref), p);
    if (outer_denom > 0.0) {
      const double mu_outer =
          std::pow(cd_weight(outer, z_ref), p) / outer_denom;
      double inner_factor = 0.0;
      if (inner_weight > 0.0)
        inner_factor = 0.25 *
                       (std::pow(cd_weight(inner, z_ref), p) /
                        (0.5 * cdp[sig[1]] + 0.5 * cdp[sig[2]])) *
                       inner_weight;
      term = mu_outer * (0.5 * n[0] + inner_factor);
    }
    reconstructed += term;
  }
  if (std::abs(direct - reconstructed) > 1e-9 * std::max(1.0, std::abs(direct)))
    throw numerical_degeneracy("mu3p: decomposition mismatch");
  return {direct, reconstructed};
}

double oscillating_cubic_discriminant(double lam, double delta) {
  const double b = 2.0 * lam;
  const double c = 2.0 + lam * lam - delta * delta;
  const double d = 2.0 * lam;
  return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c -
         27.0 * d * d;
}

std::array<std::complex<double>, 3> oscillating_cubic_roots(double lam, double delta) {
  // depressed cubic t^3 + pt + q with z = t - b/3
  const double b = 2.0 * lam;
  const double c = 2.0 + lam * lam - delta * delta;
  const double d = 2.0 * lam;
  const double pp = c - b * b / 3.0;
  const double qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const std::complex<double> disc = std::complex<double>(qq * qq / 4.0 + pp * pp * pp / 27.0);
  const std::complex<double> sq = std::sqrt(disc);
  std::complex<double> u = std::pow(-qq / 2.0 + sq, 1.0 / 3.0);
  if (std::abs(u) < 1e-30) u = std::pow(-qq / 2.0 - sq, 1.0 / 3.0);
  const std::complex<double> v = std::abs(u) < 1e-30 ? 0.0 : -pp / (3.0 * u);
  const std::complex<double> w(-0.5, std::sqrt(3.0) / 2.0);
  std::array<std::complex<double>, 3> roots;
  std::complex<double> uk = u, vk = v;
  for (int k = 0; k < 3; ++k) {
    roots[k] = uk + vk - b / 3.0;
    uk *= w;
    vk *= std::conj(w);
  }
  return roots;
}

AcClassification oscillating_ac_test(double lam, double delta) {
  if (!std::isfinite(lam) || !std::isfinite(delta))
    throw std::invalid_argument("oscillating_ac_test: non-finite input");
  const double disc = oscillating_cubic_discriminant(lam, delta);
  if (std::abs(disc) <= 1e-9) return AcClassification::boundary;
  // positive discriminant: three distinct real roots; negative: one real root
  // and a complex-conjugate pair
  return disc < 0.0 ? AcClassification::ac_interior : AcClassification::not_ac;
}

CorrelationCheck correlation_delta(double c11, double c22, double c12) {
  if (!(c11 + c22 > 0.0))
    throw std::invalid_argument("correlation_delta: c11 + c22 must be > 0");
  const double delta = 2.0 * c12 / (c11 + c22);
  return {delta, delta < 0.5};
}

}  // namespace greenrec
