#include "uam/comm_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uam/errors.hpp"
#include "uam/ris_channel.hpp"
#include "uam/rng.hpp"

namespace uam::plan {

void PsoParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("pso: ") + what);
  };
  require(swarm_size >= 2, "swarm_size must be >= 2");
  require(max_iter >= 1, "max_iter must be >= 1");
  require(inertia >= 0.0 && inertia <= 1.0, "inertia must be in [0, 1]");
  require(cognitive >= 0.0 && social >= 0.0, "c1, c2 must be >= 0");
  require(v_clamp > 0.0, "v_clamp must be > 0");
}

Box feasible_box(const PlanningQuery& q) {
  const double reach = q.v_max * q.horizon;
  if (!(reach > 0.0)) throw DomainError("planner: empty feasible box");
  // strictly ahead of the current position
  const double nudge = 1e-9 * std::max(1.0, reach);
  return {{q.low_pos.x + nudge, q.high_pos.x + nudge}, {q.low_pos.x + reach, q.high_pos.x + reach}};
}

double p4_fitness(double x_low, double x_high, const PlanningQuery& q) {
  const double reach = q.v_max * q.horizon;
  const bool feasible = x_low > q.low_pos.x && x_low <= q.low_pos.x + reach * (1 + 1e-12) &&
                        x_high > q.high_pos.x && x_high <= q.high_pos.x + reach * (1 + 1e-12);
  if (!feasible) return std::numeric_limits<double>::infinity();
  if (!q.xi) return 0.0;
  const Vec2 ris{x_low, q.h_low};
  const Vec2 k{x_high, q.h_high};
  double j = 0.0;
  try {
    j = ris::incidence_mismatch(q.bs_pos, ris, k);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q.elements))));
  // U_l = (l - 1) mod sqrt(L) repeats every row, so average over one row.
  double sum = 0.0;
  for (int u = 0; u < side; ++u) {
    const double v = u * j;
    const double r = v - std::round(v / *q.xi) * *q.xi;
    sum += r * r;
  }
  return sum / side;
}

PsoResult pso_minimize(const std::function<double(const std::vector<double>&)>& f, const Box& box,
                       const PsoParams& params) {
  params.validate();
  const std::size_t dim = box.lower.size();
  if (dim == 0 || box.upper.size() != dim) throw DomainError("pso: bad box");
  std::vector<double> vmax(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double w = box.upper[d] - box.lower[d];
    if (!(w >= 0.0)) throw DomainError("pso: empty feasible box");
    vmax[d] = params.v_clamp * w;
  }

  Rng rng(params.seed);
  const auto n = static_cast<std::size_t>(params.swarm_size);
  std::vector<std::vector<double>> x(n, std::vector<double>(dim)), v = x, pbest;
  std::vector<double> pbest_f(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      x[i][d] = rng.uniform(box.lower[d], box.upper[d]);
      v[i][d] = rng.uniform(-vmax[d], vmax[d]);
    }
  }
  pbest = x;
  PsoResult res;
  res.fitness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    pbest_f[i] = f(x[i]);
    if (pbest_f[i] < res.fitness) {
      res.fitness = pbest_f[i];
      res.x = x[i];
    }
  }
  if (res.x.empty()) res.x = x[0];

  for (int it = 0; it < params.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double vel = params.inertia * v[i][d] + params.cognitive * r1 * (pbest[i][d] - x[i][d]) +
                     params.social * r2 * (res.x[d] - x[i][d]);
        vel = std::clamp(vel, -vmax[d], vmax[d]);
        v[i][d] = vel;
        x[i][d] = std::clamp(x[i][d] + vel, box.lower[d], box.upper[d]);
      }
    }
    // evaluate, then reduce in particle order
    for (std::size_t i = 0; i < n; ++i) {
      const double fi = f(x[i]);
      if (fi < pbest_f[i]) {
        pbest_f[i] = fi;
        pbest[i] = x[i];
      }
      if (fi < res.fitness) {
        res.fitness = fi;
        res.x = x[i];
      }
    }
    res.best_history.push_back(res.fitness);
  }
  return res;
}

PlanResult pso_optimize(const PlanningQuery& q, const PsoParams& params) {
  const Box box = feasible_box(q);
  const PsoResult r = pso_minimize(
      [&](const std::vector<double>& c) { return p4_fitness(c[0], c[1], q); }, box, params);
  return {r.x[0], r.x[1], r.fitness};
}

}  // namespace uam::plan
