#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "uam/core_types.hpp"

namespace uam::plan {

struct PsoParams {
  int swarm_size = 30;
  int max_iter = 100;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  double v_clamp = 0.2;  // fraction of box width
  std::uint64_t seed = 1;

  void validate() const;
};

struct PlanningQuery {
  Vec2 bs_pos;
  Vec2 low_pos;    // aircraft carrying the RIS
  Vec2 high_pos;   // served aircraft
  double h_low = 100.0;    // layer altitudes the candidates are pinned to
  double h_high = 200.0;
  std::optional<double> xi;  // nullopt = continuous phases
  int elements = 16;
  double horizon = 0.5;    // q * dt
  double v_max = 70.0;
};

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct PsoResult {
  std::vector<double> x;
  double fitness = 0.0;
  std::vector<double> best_history;  // global best after each iteration
};

// Reachable, strictly-forward box for (x_low, x_high).
Box feasible_box(const PlanningQuery& q);

// Mean squared distance of U_l * J to the nearest multiple of xi; +inf outside
// the feasible box.
double p4_fitness(double x_low, double x_high, const PlanningQuery& q);

PsoResult pso_minimize(const std::function<double(const std::vector<double>&)>& f, const Box& box,
                       const PsoParams& params);

struct PlanResult {
  double x_low = 0.0;
  double x_high = 0.0;
  double fitness = 0.0;
};

PlanResult pso_optimize(const PlanningQuery& q, const PsoParams& params);

}  // namespace uam::plan
