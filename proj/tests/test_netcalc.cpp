#include "doctest.h"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "uam/errors.hpp"
#include "uam/netcalc.hpp"
#include "uam/rng.hpp"

using namespace uam;
using namespace uam::nc;

namespace {

// P{N >= k} for N ~ Poisson(m) via the regularized lower incomplete gamma
double poisson_tail_oracle(double m, long long k) {
  if (k <= 0) return 1.0;
  if (m == 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(k), m);
}

Ccdf random_ccdf(Rng& rng, double delta, std::size_t n) {
  Ccdf c{delta, std::vector<double>(n)};
  double v = 1.0;
  for (auto& x : c.values) {
    v *= rng.uniform(0.7, 1.0);
    x = v;
  }
  return c;
}

}  // namespace

TEST_CASE("latency-rate convolution") {
  const auto c = min_plus_convolve(LatencyRateCurve{5, 1}, LatencyRateCurve{3, 2});
  CHECK(c.rate == 3.0);
  CHECK(c.latency == 3.0);

  const auto id = min_plus_convolve(LatencyRateCurve{5, 1}, LatencyRateCurve{INFINITY, 0});
  CHECK(id.rate == 5.0);
  CHECK(id.latency == 1.0);
}

TEST_CASE("tabulated convolution tracks the analytic one") {
  const double delta = 0.01;
  const std::size_t n = 1001;
  const LatencyRateCurve a{5, 1}, b{3, 2};
  const Ccdf ga = tabulate(a, delta, n), gb = tabulate(b, delta, n);
  const Ccdf g = min_plus_convolve(ga, gb);
  const auto exact = min_plus_convolve(a, b);
  // brute-force infimum over the grid
  for (std::size_t i = 0; i < n; i += 37) {
    double inf = INFINITY;
    for (std::size_t j = 0; j <= i; ++j) inf = std::min(inf, ga.values[j] + gb.values[i - j]);
    CHECK(g.values[i] == doctest::Approx(inf).epsilon(1e-12));
    CHECK(std::abs(g.values[i] - exact(delta * static_cast<double>(i))) <= 5 * delta + 1e-12);
  }
}

TEST_CASE("tabulated convolution is commutative") {
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_ccdf(rng, 0.01, 64), b = random_ccdf(rng, 0.01, 64);
    CHECK(min_plus_convolve(a, b).values == min_plus_convolve(b, a).values);
  }
  CHECK_THROWS(min_plus_convolve(Ccdf{0.01, {1, 0.5}}, Ccdf{0.02, {1, 0.5}}));
}

TEST_CASE("stack service curves") {
  ProtocolParams p;
  p.zeta = 1.0;
  p.r_ris1 = p.r_ris2 = 80;
  p.l_data = 10;
  const auto d = service_curve_stack(StackKind::Direct, p);
  CHECK(d.latency == doctest::Approx(3.0 / 20 + 3.0 / 20 + 10.0 / 40));
  CHECK(d.rate == doctest::Approx(20));

  p.l_data = 0;
  p.zeta = 1.2;
  CHECK(service_curve_stack(StackKind::Ris, p).latency == doctest::Approx(1.2 * 9.0 / 20));

  p.r_omni = p.r_direct = p.r_ris1 = p.r_ris2 = 50;
  for (auto k : {StackKind::Control, StackKind::Direct, StackKind::Ris}) {
    CHECK(service_curve_stack(k, p).rate == doctest::Approx(50));
  }
}

TEST_CASE("Poisson tail against the incomplete gamma") {
  CHECK(poisson_upper_tail(1.0, 2) == doctest::Approx(1 - 2 / M_E).epsilon(1e-12));
  CHECK(poisson_upper_tail(3.0, 0) == 1.0);
  CHECK(poisson_upper_tail(0.0, 1) == 0.0);
  CHECK_THROWS_AS(poisson_upper_tail(-1.0, 1), DomainError);
  Rng rng(8);
  for (int n = 0; n < 2000; ++n) {
    const double m = rng.uniform(0, 400);
    const long long k = rng.uniform_int(0, 600);
    CHECK(std::abs(poisson_upper_tail(m, k) - poisson_tail_oracle(m, k)) < 1e-12);
  }
}

TEST_CASE("retransmission tail") {
  auto c = retransmission_ccdf(0.5, 1.0, 1.0, 3);
  CHECK(c.values[0] == doctest::Approx(0.5));
  CHECK(c.values[2] == doctest::Approx(0.125));
  for (double v : retransmission_ccdf(0.0, 0.03, 0.005, 50).values) CHECK(v == 0.0);
}

TEST_CASE("success tail follows the Poisson bound past the stack latency") {
  ProtocolParams base;
  const double load = 12.0;
  const ProtocolParams p = at_load(base, load);
  const auto tail = success_tail(StackKind::Direct, p, 0.005, 301);
  const auto stack = service_curve_stack(StackKind::Direct, p);
  double running = 1.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double t = 0.005 * static_cast<double>(i);
    double v = 1.0;
    if (t > stack.latency + 1e-9) {
      const double mean = p.lambda * t;
      const long long k = static_cast<long long>(std::ceil(p.r_direct * (t - stack.latency) + mean - 1e-9));
      v = poisson_tail_oracle(mean, k);
    }
    running = std::min(running, v);
    CHECK(tail.values[i] == doctest::Approx(running).epsilon(1e-9));
  }
}

TEST_CASE("failure bound edge cases") {
  ProtocolParams p;
  for (auto k : {StackKind::Control, StackKind::Direct, StackKind::Ris}) {
    CHECK(failure_probability(k, 0.0, 1.5, p) < 1e-9);
  }
  ProtocolParams lossless = p;
  lossless.p_loss = 0.0;
  for (auto k : {StackKind::Direct, StackKind::Ris}) {
    const auto q = at_load(lossless, 20.0);
    const auto tail = success_tail(k, q, 0.005, 301);
    CHECK(failure_probability(k, 20.0, 1.5, lossless) == doctest::Approx(tail.values.back()).epsilon(1e-12));
  }
  ProtocolParams coarse = p;
  coarse.grid_step = 0.2;
  CHECK_THROWS_AS(failure_probability(StackKind::Ris, 10.0, 1.5, coarse), ConfigError);
}

TEST_CASE("failure bound is non-increasing in time and non-decreasing in load") {
  ProtocolParams p;
  for (auto k : {StackKind::Control, StackKind::Direct, StackKind::Ris}) {
    const auto c = failure_ccdf(k, 20.0, 1.5, p);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.values[i] <= c.values[i - 1] + 1e-12);
    double prev = 0.0;
    for (double load = 0; load <= 60; load += 5) {
      const double f = failure_probability(k, load, 1.5, p);
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("stack names round-trip") {
  for (auto k : {StackKind::Control, StackKind::Direct, StackKind::Ris}) {
    CHECK(stack_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS(stack_kind_from_string("smoke-signal"));
}
