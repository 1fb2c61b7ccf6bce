#include <cmath>
#include <complex>

#include "doctest.h"

#include "greenrec/chain1d.hpp"
#include "greenrec/percolation.hpp"
#include "greenrec/rng.hpp"

using namespace greenrec;

namespace {

HPoint random_hpoint(SubStream& rng) {
  return HPoint(rng.uniform(-3.0, 3.0), 1e-3 * std::pow(5e3, rng.uniform01()));
}

}  // namespace

TEST_CASE("percolation_step values and fixed points") {
  const HPoint i(0.0, 1.0);
  CHECK(std::abs(percolation_step(i, i, SpectralParam(0.0), EdgeOutcome::both).value() -
                 std::complex<double>(0.0, 0.5)) < 1e-15);
  // keeping both edges fixes the free tree point
  const SpectralParam lam(0.5);
  const HPoint ztree = tree_fixed_point(2, lam);
  CHECK(std::abs(
            percolation_step(ztree, ztree, lam, EdgeOutcome::both).value() -
            ztree.value()) < 1e-14);
  // a single kept edge fixes the half-line point
  const HPoint zline = free_fixed_point(lam);
  CHECK(std::abs(
            percolation_step(zline, i, lam, EdgeOutcome::only_left).value() -
            zline.value()) < 1e-14);
  CHECK(std::abs(
            percolation_step(i, zline, lam, EdgeOutcome::only_right).value() -
            zline.value()) < 1e-14);
}

TEST_CASE("PercolationSpec validates the deletion probability") {
  CHECK_NOTHROW(PercolationSpec(0.0));
  CHECK_NOTHROW(PercolationSpec(1.0));
  CHECK_THROWS_AS(PercolationSpec(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(PercolationSpec(1.1), std::invalid_argument);
}

TEST_CASE("percolation_population reduces to the tree at q_del = 0") {
  const SpectralParam lam(0.5, 0.1);
  const auto run = percolation_population(PercolationSpec(0.0), lam, 100, 400, 3);
  const std::complex<double> ztree = tree_fixed_point(2, lam).value();
  for (const HPoint& z : run.pool.samples) CHECK(std::abs(z.value() - ztree) < 1e-6);
  for (const auto& c : run.outcome_counts) {
    CHECK(c[1] == 0);
    CHECK(c[2] == 0);
  }
}

TEST_CASE("percolation_population reduces to the half-line at q_del = 1") {
  const SpectralParam lam(0.5, 0.01);
  const auto run = percolation_population(PercolationSpec(1.0), lam, 100, 2000, 3);
  const std::complex<double> zline = free_fixed_point(lam).value();
  std::complex<double> mean = 0.0;
  for (const HPoint& z : run.pool.samples) mean += z.value();
  mean /= double(run.pool.samples.size());
  CHECK(std::abs(mean - zline) < 1e-4);
  for (const auto& c : run.outcome_counts) CHECK(c[0] == 0);
}

TEST_CASE("percolation outcome frequencies match (1-q, q/2, q/2)") {
  const SpectralParam lam(0.3, 0.05);
  const double q = 0.3;
  const std::size_t pool = 20000, gens = 50;
  const auto run = percolation_population(PercolationSpec(q), lam, pool, gens, 17);
  std::array<double, 3> expected{1.0 - q, q / 2.0, q / 2.0};
  for (const auto& counts : run.outcome_counts) {
    for (int o = 0; o < 3; ++o) {
      const double p_hat = double(counts[o]) / double(pool);
      const double sigma = std::sqrt(expected[o] * (1.0 - expected[o]) / double(pool));
      CHECK(std::abs(p_hat - expected[o]) <= 5.0 * sigma);
    }
  }
  // aggregate over generations tightens to 3 sigma comfortably
  std::array<double, 3> tot{0, 0, 0};
  for (const auto& c : run.outcome_counts)
    for (int o = 0; o < 3; ++o) tot[o] += double(c[o]);
  const double n = double(pool) * double(gens);
  for (int o = 0; o < 3; ++o) {
    const double sigma = std::sqrt(expected[o] * (1.0 - expected[o]) / n);
    CHECK(std::abs(tot[o] / n - expected[o]) <= 3.0 * sigma);
  }
}

TEST_CASE("percolation_population is thread-count independent") {
  const SpectralParam lam(0.3, 0.05);
  const auto a = percolation_population(PercolationSpec(0.2), lam, 64, 20, 5,
                                        HPoint(0.0, 1.0), 1);
  const auto b = percolation_population(PercolationSpec(0.2), lam, 64, 20, 5,
                                        HPoint(0.0, 1.0), 4);
  for (std::size_t j = 0; j < a.pool.samples.size(); ++j)
    CHECK(a.pool.samples[j].value() == b.pool.samples[j].value());
}

TEST_CASE("mu2pq reduces to the tree functional at q_del = 0") {
  SubStream rng(12001);
  for (int it = 0; it < 1000; ++it) {
    const SpectralParam lam(rng.uniform(-2.5, 2.5));
    const HPoint z1 = random_hpoint(rng), z2 = random_hpoint(rng);
    const double p = rng.uniform(1.1, 2.0);
    CHECK(mu2pq(z1, z2, lam, p, 0.0) ==
          doctest::Approx(mu2p(z1, z2, 0.0, lam, p)).epsilon(1e-12));
  }
}

TEST_CASE("mu2pq regression values") {
  // q_del = 1 at the half-line fixed point: the deleted-edge branch fixes
  // z_plus, so numerator and denominator coincide
  const SpectralParam lam(0.5);
  const HPoint zp = free_fixed_point(lam);
  CHECK(mu2pq(zp, zp, lam, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // z1 = z2 = i at lambda = 0: cross-checked by independent raw arithmetic
  const HPoint i(0.0, 1.0);
  const double got = mu2pq(i, i, SpectralParam(0.0), 2.0, 0.5);
  const std::complex<double> zref(0.0, 1.0 / std::sqrt(2.0));
  const auto cd = [&](std::complex<double> z) {
    return std::norm(z - zref) / z.imag();
  };
  const std::complex<double> both = -1.0 / (std::complex<double>(0.0, 2.0));
  const std::complex<double> single = -1.0 / (std::complex<double>(0.0, 1.0));
  const double expected =
      (0.5 * 0.5 * (cd(single) * cd(single) + cd(single) * cd(single)) +
       0.5 * cd(both) * cd(both)) /
      (0.5 * cd({0.0, 1.0}) * cd({0.0, 1.0}) + 0.5 * cd({0.0, 1.0}) * cd({0.0, 1.0}));
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got == doctest::Approx(1.0).epsilon(1e-12));

  const HPoint ztree = tree_fixed_point(2, lam);
  CHECK_THROWS_AS(mu2pq(ztree, ztree, lam, 2.0, 0.5), indeterminate_value);
}

TEST_CASE("mu3pq decomposition identity on random inputs") {
  SubStream rng(12002);
  for (int it = 0; it < 10000; ++it) {
    const SpectralParam lam(rng.uniform(-2.5, 2.5));
    const std::array<HPoint, 3> zs{random_hpoint(rng), random_hpoint(rng),
                                   random_hpoint(rng)};
    const double p = rng.uniform(1.1, 2.0);
    const double q = rng.uniform01();
    const Mu3pqParts parts = mu3pq_decomposition(zs, lam, p, q);
    CHECK(parts.total ==
          doctest::Approx(parts.smooth_part + parts.remainder).epsilon(1e-9));
    CHECK(parts.smooth_part ==
          doctest::Approx((1.0 - q) * (1.0 - q) * mu3p(zs, {0.0, 0.0}, lam, p).direct)
              .epsilon(1e-12));
  }
}

TEST_CASE("mu3pq at q_del = 0 has no remainder") {
  SubStream rng(12003);
  for (int it = 0; it < 200; ++it) {
    const std::array<HPoint, 3> zs{random_hpoint(rng), random_hpoint(rng),
                                   random_hpoint(rng)};
    const Mu3pqParts parts = mu3pq_decomposition(zs, SpectralParam(0.4), 1.5, 0.0);
    CHECK(parts.remainder == 0.0);
    CHECK(parts.total ==
          doctest::Approx(mu3p(zs, {0.0, 0.0}, SpectralParam(0.4), 1.5).direct)
              .epsilon(1e-12));
  }
}

TEST_CASE("mu3pq keeps a margin below one near the boundary for small q_del") {
  const SpectralParam lam(0.3);
  const double p = 1.5;
  // the deletion-free functional has a uniform margin mu on this scan; with a
  // small deletion probability the total must stay below 1 - mu/2
  double mu_margin = 1.0;
  std::size_t violated = 0;
  for (double re1 = -3.0; re1 <= 3.0; re1 += 0.5)
    for (double re2 = -3.0; re2 <= 3.0; re2 += 0.75)
      for (double re3 = -3.0; re3 <= 3.0; re3 += 1.0) {
        const std::array<HPoint, 3> zs{HPoint(re1, 1e-6), HPoint(re2, 1e-6),
                                       HPoint(re3, 1e-6)};
        mu_margin = std::min(mu_margin, 1.0 - mu3p(zs, {0.0, 0.0}, lam, p).direct);
      }
  REQUIRE(mu_margin > 0.0);
  for (double re1 = -3.0; re1 <= 3.0; re1 += 0.5)
    for (double re2 = -3.0; re2 <= 3.0; re2 += 0.75)
      for (double re3 = -3.0; re3 <= 3.0; re3 += 1.0) {
        const std::array<HPoint, 3> zs{HPoint(re1, 1e-6), HPoint(re2, 1e-6),
                                       HPoint(re3, 1e-6)};
        if (mu3pq_decomposition(zs, lam, p, 0.02).total > 1.0 - mu_margin / 2.0)
          ++violated;
      }
  MESSAGE("margin ", mu_margin, ", violated cells: ", violated);
  CHECK(violated == 0);
}

TEST_CASE("percolation moment trend stays bounded at small q_del") {
  const PercolationSpec spec(0.05);
  std::vector<double> ms;
  for (double eps : {1e-2, 1e-4}) {
    const SpectralParam lam(0.3, eps);
    const HPoint zfp = tree_fixed_point(2, lam);
    const auto run = percolation_population(spec, lam, 20000, 300, 11, zfp);
    ms.push_back(moment_Mp(run.pool, 1.5, zfp));
  }
  CHECK(ms[1] < 5.0 * (ms[0] + 0.01));
}
