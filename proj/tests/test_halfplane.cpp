#include <cmath>
#include <complex>

#include "doctest.h"

#include "greenrec/halfplane.hpp"
#include "greenrec/rng.hpp"

using namespace greenrec;

namespace {

// textbook form, used as the independent reference for the stable evaluation
double naive_poincare(const HPoint& a, const HPoint& b) {
  const double t = std::norm(a.value() - b.value()) / (2.0 * a.im() * b.im());
  return std::acosh(1.0 + t);
}

HPoint random_hpoint(SubStream& rng, double re_span = 5.0, double im_lo = 1e-4,
                     double im_hi = 10.0) {
  const double re = rng.uniform(-re_span, re_span);
  const double im = im_lo * std::pow(im_hi / im_lo, rng.uniform01());
  return HPoint(re, im);
}

}  // namespace

TEST_CASE("HPoint construction guards") {
  CHECK_THROWS_AS(HPoint(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HPoint(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(HPoint(std::nan(""), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HPoint(0.0, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(HPoint(0.0, 1e-301), boundary_underflow);
  CHECK_NOTHROW(HPoint(0.0, 1e-299));
}

TEST_CASE("SpectralParam guards") {
  CHECK_THROWS_AS(SpectralParam(0.0, -1e-12), std::invalid_argument);
  CHECK_NOTHROW(SpectralParam(3.0, 0.0));
  CHECK_THROWS_AS(SpectralParam(0.0, 0.0).require_positive_im("test"),
                  std::invalid_argument);
}

TEST_CASE("poincare_dist closed-form values") {
  const HPoint i(0.0, 1.0);
  CHECK(poincare_dist(i, i) == 0.0);
  CHECK(poincare_dist(i, HPoint(0.0, 2.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(poincare_dist(i, HPoint(1.0, 1.0)) ==
        doctest::Approx(std::acosh(1.5)).epsilon(1e-12));
}

TEST_CASE("poincare_dist is a metric on random triples") {
  SubStream rng(7001);
  for (int it = 0; it < 2000; ++it) {
    const HPoint a = random_hpoint(rng), b = random_hpoint(rng), c = random_hpoint(rng);
    const double dab = poincare_dist(a, b);
    CHECK(dab == poincare_dist(b, a));  // symmetric by construction, exactly
    CHECK(dab >= 0.0);
    CHECK(dab <= poincare_dist(a, c) + poincare_dist(c, b) + 1e-12);
    CHECK(dab == doctest::Approx(naive_poincare(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("poincare_dist stable near coincident points") {
  const HPoint a(0.0, 1.0), b(1e-9, 1.0);
  // the naive acosh(1 + t) form loses about half the digits here
  CHECK(poincare_dist(a, b) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("mobius_step fixed points and direct arithmetic") {
  const HPoint i(0.0, 1.0);
  CHECK(mobius_step(i, 0.0, SpectralParam(0.0)).value() ==
        std::complex<double>(0.0, 1.0));
  const HPoint half_i = mobius_step(i, 0.0, SpectralParam(0.0, 1.0));
  CHECK(half_i.re() == doctest::Approx(0.0));
  CHECK(half_i.im() == doctest::Approx(0.5).epsilon(1e-15));
  // fixed point of z -> -1/(z + 1)
  const HPoint fp(-0.5, std::sqrt(0.75));
  const HPoint image = mobius_step(fp, 0.0, SpectralParam(1.0));
  CHECK(std::abs(image.value() - fp.value()) < 1e-15);
}

TEST_CASE("mobius_step image lies in H and inside the 1/Im(lambda) ball") {
  SubStream rng(7002);
  const SpectralParam lam(0.7, 0.3);
  for (int it = 0; it < 100000; ++it) {
    const HPoint z = random_hpoint(rng, 50.0, 1e-7, 1e3);
    const double q = rng.uniform(-5.0, 5.0);
    const HPoint w = mobius_step(z, q, lam);
    CHECK(w.im() > 0.0);
    CHECK(std::abs(w.value()) < 1.0 / lam.im());
  }
}

TEST_CASE("contraction_factor values and guards") {
  CHECK(contraction_factor(2.0, 0.5) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(contraction_factor(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(contraction_factor(1e-3, 1.0) == doctest::Approx(1e-3 / 1.001).epsilon(1e-12));
  CHECK_THROWS_AS(contraction_factor(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(contraction_factor(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("contraction_ratio examples") {
  const HPoint i(0.0, 1.0);
  const HPoint two_i(0.0, 2.0);
  // strict bound with C = 2 on {|z| < 2}, Im lambda = 1
  const double r = contraction_ratio(0.0, SpectralParam(0.0, 1.0), i, two_i);
  CHECK(r <= contraction_factor(2.0, 1.0) + 1e-12);
  // real shifts and the rotation are isometries
  CHECK(contraction_ratio(0.0, SpectralParam(0.0), i, HPoint(1.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(contraction_ratio(5.0, SpectralParam(0.0), i, two_i) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(contraction_ratio(0.0, SpectralParam(0.0), i, i), std::invalid_argument);
}

TEST_CASE("contraction holds on random pairs") {
  SubStream rng(7003);
  for (int it = 0; it < 100000; ++it) {
    const HPoint z1 = random_hpoint(rng), z2 = random_hpoint(rng);
    if (z1 == z2) continue;
    const double q = rng.uniform(-3.0, 3.0);
    const double im_l = rng.uniform01() < 0.5 ? 0.0 : rng.uniform(0.0, 2.0);
    const SpectralParam lam(rng.uniform(-3.0, 3.0), im_l);
    CHECK(contraction_ratio(q, lam, z1, z2) <= 1.0 + 1e-10);
  }
}

TEST_CASE("strict contraction on a bounded set") {
  SubStream rng(7004);
  const double c = 3.0;
  for (int it = 0; it < 20000; ++it) {
    const HPoint z1 = random_hpoint(rng, 2.0, 1e-3, 2.5);
    const HPoint z2 = random_hpoint(rng, 2.0, 1e-3, 2.5);
    if (std::abs(z1.value()) >= c || std::abs(z2.value()) >= c || z1 == z2) continue;
    const SpectralParam lam(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 1.0));
    const double q = rng.uniform(-2.0, 2.0);
    CHECK(contraction_ratio(q, lam, z1, z2) <=
          contraction_factor(c, lam.im()) + 1e-10);
  }
}

TEST_CASE("cd_weight values") {
  const HPoint i(0.0, 1.0);
  CHECK(cd_weight(i, i) == 0.0);
  CHECK(cd_weight(HPoint(0.0, 2.0), i) == doctest::Approx(0.5).epsilon(1e-15));
  const HPoint ref(0.0, 1.0 / std::sqrt(2.0));
  const double expected = (1.0 - 1.0 / std::sqrt(2.0)) * (1.0 - 1.0 / std::sqrt(2.0));
  CHECK(cd_weight(i, ref) == doctest::Approx(expected).epsilon(1e-12));

  SubStream rng(7005);
  for (int it = 0; it < 1000; ++it) {
    const HPoint z = random_hpoint(rng), ref2 = random_hpoint(rng);
    if (z == ref2)
      CHECK(cd_weight(z, ref2) == 0.0);
    else
      CHECK(cd_weight(z, ref2) > 0.0);
  }
}

TEST_CASE("two_step_disk_radius encloses sampled two-step images") {
  const auto disk = two_step_disk_radius(0.0, SpectralParam(0.0, 1.0), 10000);
  CHECK(std::isfinite(disk.radius));
  // every two-step image must stay strictly inside the 1/Im(lambda) ball
  SubStream rng(7006);
  const SpectralParam lam(0.0, 1.0);
  for (int it = 0; it < 1000; ++it) {
    const HPoint z = random_hpoint(rng, 100.0, 1e-8, 1e4);
    const HPoint w = mobius_step(mobius_step(z, 0.0, lam), 0.0, lam);
    CHECK(std::abs(w.value()) < 1.0);
    // sampled enclosure: off-grid points may exceed by the sampling resolution
    CHECK(poincare_dist(disk.center, w) <= disk.radius * 1.01 + 1e-6);
  }

  const auto disk2 = two_step_disk_radius(1.0, SpectralParam(0.5, 0.1), 10000);
  CHECK(std::isfinite(disk2.radius));

  const auto disk3 = two_step_disk_radius(0.0, SpectralParam(0.0, 10.0), 10000);
  CHECK(std::isfinite(disk3.radius));
  CHECK(disk3.radius < 1.0);  // strong damping squeezes the image hard

  CHECK_THROWS_AS(two_step_disk_radius(0.0, SpectralParam(1.0, 0.0), 10),
                  std::invalid_argument);
}
