#include <doctest.h>

#include <cmath>

#include "sepnet/solvers.hpp"

using namespace sepnet;

namespace {
double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }
}

TEST_CASE("capacity of the binary symmetric channel") {
  auto r = channel_capacity(Dmc::bsc(0.11));
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1 - h2(0.11)).epsilon(1e-6));
  CHECK(r.lower_bound <= r.value + 1e-12);
  CHECK(r.value <= r.upper_bound + 1e-12);
  // symmetric channel: uniform input is optimal
  CHECK(r.argument[0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("capacity of the binary erasure channel") {
  double e = 0.3;
  Dmc bec(2, 3, {1 - e, e, 0.0, 0.0, e, 1 - e});
  auto r = channel_capacity(bec);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1 - e).epsilon(1e-6));
}

TEST_CASE("capacity of a noiseless channel is log2 of the alphabet") {
  auto r = channel_capacity(Dmc::identity(4));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("binary rate-distortion golden curve") {
  Pmf u = Pmf::uniform(2);
  auto d = DistortionMeasure::hamming(2);
  for (double D : {0.05, 0.11, 0.25, 0.4}) {
    auto r = rate_distortion(u, d, D);
    CHECK(r.value == doctest::Approx(1 - h2(D)).epsilon(1e-4));
    CHECK(r.converged);
  }
  // at or above d_max the rate is zero
  CHECK(rate_distortion(u, d, 0.5).value == doctest::Approx(0.0));
  CHECK(rate_distortion(u, d, 0.9).value == doctest::Approx(0.0));
}

TEST_CASE("rate-distortion test channel achieves the budget") {
  Pmf src({0.3, 0.7});
  auto d = DistortionMeasure::hamming(2);
  auto r = rate_distortion(src, d, 0.1);
  REQUIRE(r.test_channel.has_value());
  auto j = JointPmf::from_2d(src, *r.test_channel);
  CHECK(d.expected(j) <= 0.1 + 1e-6);
  CHECK(mutual_information(j) == doctest::Approx(r.value).epsilon(1e-3));
}

TEST_CASE("distortion-rate inverts rate-distortion") {
  Pmf u = Pmf::uniform(2);
  auto d = DistortionMeasure::hamming(2);
  for (double D : {0.1, 0.2, 0.3}) {
    double R = 1 - h2(D);
    auto r = distortion_rate(u, d, R);
    CHECK(r.value == doctest::Approx(D).epsilon(2e-3));
  }
  // zero rate: d_max
  CHECK(distortion_rate(u, d, 0.0).value == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rate-distortion is monotone in the budget") {
  Pmf src({0.2, 0.3, 0.5});
  auto d = DistortionMeasure::hamming(3);
  double prev = 1e9;
  for (double D : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    double v = rate_distortion(src, d, D).value;
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
}

TEST_CASE("constrained additive capacity on Z2") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  Pmf noise({0.8, 0.2});
  // unconstrained (D >= 1/2 allows uniform input): 1 - h(0.2)
  auto r = constrained_additive_capacity(noise, s, 0.5);
  CHECK(r.value == doctest::Approx(1 - h2(0.2)).epsilon(1e-5));
  // constrained: input Bern(d), output Bern(d * 0.8 + (1-d) * 0.2)
  double d = 0.12;
  auto rc = constrained_additive_capacity(noise, s, d);
  double expect = h2(d * 0.8 + (1 - d) * 0.2) - h2(0.2);
  CHECK(rc.value == doctest::Approx(expect).epsilon(1e-4));
  CHECK(rc.lower_bound <= rc.value + 1e-12);
  CHECK(rc.value <= rc.upper_bound + 1e-12);
}

TEST_CASE("worst noise on Z2 equals the Bernoulli(D) noise value") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  double D = 0.2;
  auto r = worst_noise_capacity(s, D);
  double expect = h2(D + D - 2 * D * D) - h2(D);  // both laws Bern(D)
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-4));
  CHECK(r.converged);
  CHECK(r.lower_bound <= r.value + 1e-9);
}

TEST_CASE("quadratic grid structures") {
  auto s = AdditiveStructure::quadratic_line_grid(65, 4.0);
  CHECK(s.q == 65);
  CHECK(s.out_size() == 129);
  CHECK(s.cost[32] == doctest::Approx(0.0));  // center of the grid
  auto g = s.discrete_gaussian(1.0);
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < 65; ++i) {
    double x = -4.0 + 8.0 * double(i) / 64.0;
    mean += g[i] * x;
    var += g[i] * x * x;
  }
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));  // 4-sigma truncation bias
  auto gt = s.gaussian_with_cost(0.7);
  double c = 0;
  for (std::size_t i = 0; i < 65; ++i) c += gt[i] * s.cost[i];
  CHECK(c == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("worst-noise quadratic half-bit, coarse grid") {
  auto s = AdditiveStructure::quadratic_line_grid(65, 4.0);
  SolverConfig cfg;
  cfg.tolerance = 5e-4;
  auto r = worst_noise_capacity(s, 1.0, cfg);
  CHECK(std::abs(r.value - 0.5) < 0.05);
}

TEST_CASE("solver bounds are always ordered") {
  auto r1 = channel_capacity(Dmc::bsc(0.25));
  CHECK(r1.lower_bound <= r1.upper_bound);
  auto r2 = rate_distortion(Pmf({0.4, 0.6}), DistortionMeasure::hamming(2), 0.15);
  CHECK(r2.lower_bound <= r2.upper_bound);
  CHECK(r2.upper_bound - r2.lower_bound <= 2 * SolverConfig{}.tolerance + 1e-9);
}
