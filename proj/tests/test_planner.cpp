#include "doctest.h"

#include <cmath>
#include <limits>

#include "uam/comm_planner.hpp"
#include "uam/ris_channel.hpp"
#include "uam/rng.hpp"

using namespace uam;
using namespace uam::plan;

namespace {

// every element, nearest multiple by scanning integers
double fitness_oracle(double j, int L, double xi) {
  const int side = static_cast<int>(std::lround(std::sqrt(L)));
  double sum = 0.0;
  for (int l = 0; l < L; ++l) {
    const double v = (l % side) * j;
    double best = INFINITY;
    for (int m = -200; m <= 200; ++m) best = std::min(best, std::abs(v - m * xi));
    sum += best * best;
  }
  return sum / L;
}

PlanningQuery base_query() {
  PlanningQuery q;
  q.bs_pos = {0, 0};
  q.low_pos = {90, 100};
  q.high_pos = {190, 200};
  q.xi = 0.25;
  q.elements = 16;
  return q;
}

}  // namespace

TEST_CASE("fitness at a symmetric geometry is zero") {
  auto q = base_query();
  CHECK(p4_fitness(100, 200, q) == doctest::Approx(0.0).epsilon(1e-20));
  q.elements = 1;
  CHECK(p4_fitness(110, 205, q) == 0.0);
  q.elements = 16;
  q.xi.reset();
  CHECK(p4_fitness(110, 205, q) == 0.0);
}

TEST_CASE("fitness worked point, L = 4") {
  CHECK(fitness_oracle(0.1, 4, 0.25) == doctest::Approx(0.005));
  // find a geometry with mismatch 0.1 by bisection on the high aircraft
  auto q = base_query();
  q.elements = 4;
  q.high_pos = {100, 200};
  q.horizon = 10.0;
  double lo = 100.5, hi = 800;
  auto j_at = [&](double xh) { return ris::incidence_mismatch(q.bs_pos, {100, 100}, {xh, 200}); };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (j_at(mid) > 0.1 ? lo : hi) = mid;
  }
  REQUIRE(j_at(lo) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(p4_fitness(100, lo, q) == doctest::Approx(0.005).epsilon(1e-6));
}

TEST_CASE("fitness matches the full-array oracle") {
  Rng rng(4);
  auto q = base_query();
  q.horizon = 10.0;
  for (int n = 0; n < 300; ++n) {
    q.elements = std::vector<int>{4, 9, 16, 64}[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    q.xi = std::vector<double>{1.0, 1.0 / 3, 0.25, 1.0 / 6}[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    const double xl = rng.uniform(91, 600), xh = rng.uniform(191, 700);
    const double j = ris::incidence_mismatch(q.bs_pos, {xl, q.h_low}, {xh, q.h_high});
    CHECK(p4_fitness(xl, xh, q) == doctest::Approx(fitness_oracle(j, q.elements, *q.xi)).epsilon(1e-9));
  }
}

TEST_CASE("infeasible candidates cost infinity") {
  const auto q = base_query();
  const double reach = q.v_max * q.horizon;
  CHECK(std::isinf(p4_fitness(q.low_pos.x, 200, q)));
  CHECK(std::isinf(p4_fitness(100, q.high_pos.x + reach + 1, q)));
  const auto box = feasible_box(q);
  CHECK(box.lower[0] > q.low_pos.x);
  CHECK(box.upper[1] == doctest::Approx(q.high_pos.x + reach));
  auto bad = q;
  bad.horizon = 0.0;
  CHECK_THROWS(feasible_box(bad));
}

TEST_CASE("swarm finds a convex minimum") {
  PsoParams p;
  p.swarm_size = 20;
  p.max_iter = 100;
  const auto r = pso_minimize([](const std::vector<double>& x) { return (x[0] - 3) * (x[0] - 3); }, {{0}, {10}}, p);
  CHECK(std::abs(r.x[0] - 3) < 1e-3);
  for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
}

TEST_CASE("swarm reaches a zero-fitness point inside the box") {
  PsoParams p;
  p.swarm_size = 30;
  p.max_iter = 200;
  const auto r = pso_optimize(base_query(), p);
  CHECK(r.fitness < 1e-4);
  const auto box = feasible_box(base_query());
  CHECK(r.x_low >= box.lower[0]);
  CHECK(r.x_high <= box.upper[1]);
}

TEST_CASE("swarm output is reproducible per seed") {
  PsoParams p;
  p.seed = 77;
  auto q = base_query();
  q.low_pos = {340, 100};
  q.high_pos = {515, 200};
  const auto a = pso_optimize(q, p), b = pso_optimize(q, p);
  CHECK(a.x_low == b.x_low);
  CHECK(a.x_high == b.x_high);
  CHECK(a.fitness == b.fitness);
}
