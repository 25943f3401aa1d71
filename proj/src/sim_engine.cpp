#include "uam/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uam/comm_planner.hpp"
#include "uam/errors.hpp"
#include "uam/flight_control.hpp"
#include "uam/rng.hpp"

namespace uam::sim {

namespace {

constexpr std::uint64_t kRosterStream = 0x526f73746572ULL;
constexpr std::uint64_t kPlannerStream = 0x504c414eULL;

struct Ring {
  double length;

  double wrap(double dx) const { return dx - length * std::floor(dx / length + 0.5); }
  // Position of b as seen from a on the periodic course.
  Vec2 image(Vec2 a, Vec2 b) const { return {a.x + wrap(b.x - a.x), b.y}; }
  double ahead(double from, double to) const {
    double d = std::fmod(to - from, length);
    if (d < 0) d += length;
    return d;
  }
};

// Same-layer, non-switching aircraft sorted by x.
struct LayerGroups {
  std::array<std::vector<int>, kLayerCount> members;
  std::vector<int> pred;    // aircraft ahead, -1 if alone
  std::vector<int> follow;  // aircraft behind
};

LayerGroups group_layers(const std::vector<Agent>& agents) {
  LayerGroups g;
  g.pred.assign(agents.size(), -1);
  g.follow.assign(agents.size(), -1);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& s = agents[i].s;
    if (s.mode == FlightMode::Switching) continue;
    g.members[s.layer].push_back(static_cast<int>(i));
  }
  for (auto& m : g.members) {
    std::sort(m.begin(), m.end(), [&](int a, int b) {
      const auto& sa = agents[a].s;
      const auto& sb = agents[b].s;
      return sa.pos.x != sb.pos.x ? sa.pos.x < sb.pos.x : sa.id < sb.id;
    });
    const std::size_t n = m.size();
    if (n < 2) continue;
    for (std::size_t k = 0; k < n; ++k) {
      g.pred[m[k]] = m[(k + 1) % n];
      g.follow[m[k]] = m[(k + n - 1) % n];
    }
  }
  return g;
}

int nearest_layer(double h, const Scenario& sc) {
  const int l = static_cast<int>(std::lround(h / sc.airspace.layer_spacing));
  return std::clamp(l, sc.switching.min_layer, sc.switching.max_layer);
}

struct Neighborhood {
  fc::FieldContext ctx;
  std::vector<AircraftState> consensus;
};

Neighborhood neighborhood(int i, const std::vector<Agent>& agents, const LayerGroups& g, const Scenario& sc,
                          const Ring& ring) {
  const auto& s = agents[i].s;
  Neighborhood n;
  n.ctx.d_safe = sc.cpf_d_safe(s.layer);
  n.ctx.v_ref = sc.airspace.v_expected[s.layer];
  n.ctx.H = sc.airspace.layer_spacing;
  n.ctx.goal = agents[i].goal;
  const double radius = sc.weights.neighbor_radius;
  if (g.pred[i] >= 0) {
    const Vec2 p = ring.image(s.pos, agents[g.pred[i]].s.pos);
    if (ring.ahead(s.pos.x, agents[g.pred[i]].s.pos.x) <= radius) n.ctx.preceding = p;
  }
  for (int j : g.members[s.layer]) {
    if (j == i) continue;
    AircraftState other = agents[j].s;
    other.pos = ring.image(s.pos, other.pos);
    if (distance(s.pos, other.pos) <= radius) {
      n.ctx.repulsors.push_back(other.pos);
      n.consensus.push_back(other);
    }
  }
  return n;
}

// Gap to the aircraft ahead over the follower's braking separation; +inf
// when there is none.
double front_ratio(int i, const std::vector<Agent>& agents, const LayerGroups& g, const Scenario& sc,
                   const Ring& ring) {
  if (g.pred[i] < 0) return std::numeric_limits<double>::infinity();
  const auto& s = agents[i].s;
  const double gap = ring.ahead(s.pos.x, agents[g.pred[i]].s.pos.x);
  const double sep = horizontal_safe_separation(norm(s.vel), sc.airspace);
  return sep > 0.0 ? gap / sep : std::numeric_limits<double>::infinity();
}

double rear_ratio(int i, const std::vector<Agent>& agents, const LayerGroups& g, const Scenario& sc,
                  const Ring& ring) {
  if (g.follow[i] < 0) return std::numeric_limits<double>::infinity();
  return front_ratio(g.follow[i], agents, g, sc, ring);
}

}  // namespace

std::vector<AircraftState> build_roster(const Scenario& sc) {
  std::vector<AircraftState> out;
  auto make = [&](int layer, double x, std::optional<double> v) {
    AircraftState s;
    s.id = static_cast<int>(out.size()) + 1;
    s.layer = layer;
    s.pos = {x, sc.airspace.layer_altitude(layer)};
    s.vel = {v.value_or(sc.airspace.v_expected[layer]), 0.0};
    out.push_back(s);
  };
  if (!sc.aircraft.empty()) {
    for (const auto& a : sc.aircraft) make(a.layer, a.x, a.v);
    return out;
  }
  Rng rng(sc.seed, kRosterStream);
  const int n = sc.roster.per_layer;
  for (int layer = sc.switching.min_layer; layer <= sc.switching.max_layer; ++layer) {
    const double spacing = sc.course_length / std::max(n, 1);
    const double offset = (layer - sc.switching.min_layer) * 0.5 * spacing;
    std::vector<double> xs;
    for (int k = 0; k < n; ++k) {
      xs.push_back(sc.roster.random_placement ? rng.uniform(0.0, sc.course_length)
                                              : std::fmod(k * spacing + offset, sc.course_length));
    }
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      std::optional<double> v;
      if (sc.roster.speed_jitter > 0.0) {
        v = std::clamp(sc.airspace.v_expected[layer] + rng.uniform(-sc.roster.speed_jitter, sc.roster.speed_jitter),
                       0.0, sc.airspace.v_max);
      }
      make(layer, x, v);
    }
  }
  return out;
}

World make_world(const Scenario& sc) {
  World w;
  for (const auto& s : build_roster(sc)) {
    Agent a;
    a.s = s;
    a.sw.tr_max_initial = sc.switching.backoff_initial;
    a.sw.tr_max = a.sw.tr = sc.switching.backoff_initial;
    a.sw.rng = Rng(sc.seed, static_cast<std::uint64_t>(s.id));
    w.agents.push_back(a);
  }
  return w;
}

namespace {

Scenario validated(Scenario sc) {
  sc.validate();
  return sc;
}

}  // namespace

Simulation::Simulation(Scenario sc, SimOptions opt)
    : sc_(validated(std::move(sc))),
      opt_(opt),
      channel_(sc_.effective_channel()),
      world_(make_world(sc_)),
      tracker_(std::lround(sc_.episode_merge / sc_.dt)) {
  trace_.dt = sc_.dt;
  trigger_ticks_ = std::max(1L, std::lround(sc_.switching.trigger_period / sc_.dt));
}

void Simulation::plan() {
  auto& agents = world_.agents;
  const int high_layer = sc_.switching.max_layer;
  const int low_layer = high_layer - 1;
  world_.served_id = -1;
  world_.ris_id = kNoRis;
  world_.phases.reset();
  if (sc_.ris_mode != RisMode::Stationary) {
    for (auto& a : agents) a.goal.reset();
  }

  int served = -1;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& s = agents[i].s;
    if (s.layer != high_layer || s.mode == FlightMode::Switching) continue;
    if (served < 0 || distance(sc_.bs_pos, s.pos) < distance(sc_.bs_pos, agents[served].s.pos)) {
      served = static_cast<int>(i);
    }
  }
  if (served < 0) return;
  const Vec2 k = agents[served].s.pos;

  Vec2 ris_pos;
  int ris_index = -1;
  if (sc_.ris_mode == RisMode::Stationary) {
    ris_pos = sc_.stationary_ris_pos;
  } else {
    double best = -1.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto& s = agents[i].s;
      if (s.layer != low_layer || s.mode == FlightMode::Switching) continue;
      if (s.pos == sc_.bs_pos || s.pos == k) continue;
      const double b = ris::cascade_bound(sc_.bs_pos, s.pos, k, sc_.ris_elements, channel_);
      if (b > best) {
        best = b;
        ris_index = static_cast<int>(i);
      }
    }
    if (ris_index < 0) return;
    ris_pos = agents[ris_index].s.pos;

    plan::PlanningQuery q;
    q.bs_pos = sc_.bs_pos;
    q.low_pos = ris_pos;
    q.high_pos = k;
    q.h_low = sc_.airspace.layer_altitude(low_layer);
    q.h_high = sc_.airspace.layer_altitude(high_layer);
    if (sc_.resolution.kind == ris::PhaseResolution::Kind::Discrete) q.xi = sc_.resolution.xi;
    q.elements = sc_.ris_elements;
    q.horizon = sc_.q * sc_.dt;
    q.v_max = sc_.airspace.v_max;
    plan::PsoParams pso = sc_.pso;
    pso.seed = splitmix64(sc_.seed ^ splitmix64(kPlannerStream + static_cast<std::uint64_t>(world_.tick)));
    const auto best_plan = plan::pso_optimize(q, pso);
    agents[ris_index].goal = Vec2{best_plan.x_low, q.h_low};
    agents[served].goal = Vec2{best_plan.x_high, q.h_high};
  }

  try {
    const auto ideal = ris::optimal_phase_shift(sc_.bs_pos, ris_pos, k, sc_.ris_elements, channel_);
    world_.phases = ris::realize(ideal, sc_.resolution);
  } catch (const DomainError&) {
    return;
  }
  world_.served_id = agents[served].s.id;
  world_.ris_id = ris_index >= 0 ? agents[ris_index].s.id : kBuildingRis;
  trace_.links.push_back({world_.t, sc_.bs_pos, ris_pos, k});
}

void Simulation::step() {
  auto& agents = world_.agents;
  const Ring ring{sc_.course_length};
  const double H = sc_.airspace.layer_spacing;

  if (world_.tick % sc_.q == 0) plan();

  const std::vector<Agent> snap = agents;
  const LayerGroups g = group_layers(snap);
  const bool sample_trigger = sc_.switching.p_ls > 0.0 && world_.tick % trigger_ticks_ == 0;
  const double t_next = static_cast<double>(world_.tick + 1) * sc_.dt;

  std::vector<Vec2> acc(agents.size());
  std::vector<int> expired;
  for (std::size_t idx = 0; idx < agents.size(); ++idx) {
    const int i = static_cast<int>(idx);
    auto& a = agents[idx];
    if (a.s.mode == FlightMode::Switching) {
      const auto p = ls::switch_acceleration_profile(a.sw, a.s.pos.y, H);
      acc[idx] = {p.ax, p.ay};
      continue;
    }
    const Neighborhood n = neighborhood(i, snap, g, sc_, ring);
    acc[idx] = fc::acceleration(snap[idx].s, n.consensus, sc_.weights, n.ctx, sc_.airspace.a_max);

    const double fr = front_ratio(i, snap, g, sc_, ring);
    const double rr = rear_ratio(i, snap, g, sc_, ring);
    if (a.s.mode == FlightMode::Cruise && sample_trigger) {
      const double p = ls::switch_probability(fr, rr, 1.0, sc_.switching.p_ls);
      if (p > 0.0 && a.sw.rng.bernoulli(p)) {
        int below = 0, above = 0;
        for (const auto& o : snap) {
          if (o.s.id == a.s.id || std::abs(ring.wrap(o.s.pos.x - a.s.pos.x)) > 500.0) continue;
          if (o.s.layer == a.s.layer - 1) ++below;
          if (o.s.layer == a.s.layer + 1) ++above;
        }
        const int target =
            ls::choose_target_layer(a.s.layer, below, above, sc_.switching.min_layer, sc_.switching.max_layer);
        ls::begin_pending(a.sw, a.s.layer, target);
        a.s.mode = FlightMode::BackingOff;
        trace_.events.push_back({t_next, "LS_PENDING", a.s.id, target});
      }
    } else if (a.s.mode == FlightMode::BackingOff) {
      ls::BackoffEvents ev;
      ev.separation_restored = fr >= 1.0 && rr >= 1.0;
      ev.foreign_request_heard =
          std::any_of(world_.last_broadcasts.begin(), world_.last_broadcasts.end(), [&](const Broadcast& b) {
            return b.id != a.s.id && std::abs(ring.wrap(b.pos.x - a.s.pos.x)) <= sc_.switching.hearing_range;
          });
      if (ls::backoff_step(a.sw, ev)) {
        expired.push_back(i);
      } else if (a.sw.phase == ls::SwitchPhase::Idle) {
        a.s.mode = FlightMode::Cruise;
        trace_.events.push_back({t_next, "LS_CANCEL", a.s.id, 0});
      }
    }
  }

  // Expired countdowns broadcast their request. Requests within hearing range
  // of each other collide.
  std::vector<Broadcast> broadcasts;
  std::vector<int> senders;
  for (int i : expired) {
    auto& a = agents[i];
    if (sc_.switching.clearance_gate) {
      // carrier sense: defer without widening the window while a nearby
      // aircraft is still switching
      const double clearance = horizontal_safe_separation(sc_.airspace.v_expected[a.sw.target_layer], sc_.airspace);
      const bool busy = std::any_of(snap.begin(), snap.end(), [&](const Agent& o) {
        return o.s.id != a.s.id && o.s.mode == FlightMode::Switching &&
               std::abs(ring.wrap(o.s.pos.x - a.s.pos.x)) < clearance;
      });
      if (busy) {
        a.sw.phase = ls::SwitchPhase::Pending;
        a.sw.tr = a.sw.rng.uniform_int(1, a.sw.tr_max);
        trace_.events.push_back({t_next, "LS_HOLD", a.s.id, a.sw.target_layer});
        continue;
      }
    }
    senders.push_back(i);
    broadcasts.push_back({a.s.id, a.s.pos});
  }
  auto back_off = [&](ls::SwitchAutomaton& sw) {
    sw.phase = ls::SwitchPhase::Pending;
    ls::backoff_step(sw, {false, true});
  };
  for (int i : senders) {
    auto& a = agents[i];
    const bool collided = std::any_of(broadcasts.begin(), broadcasts.end(), [&](const Broadcast& b) {
      return b.id != a.s.id && std::abs(ring.wrap(b.pos.x - a.s.pos.x)) <= sc_.switching.hearing_range;
    });
    if (collided) {
      back_off(a.sw);
      trace_.events.push_back({t_next, "LS_COLLIDE", a.s.id, 0});
      ++trace_.switch_collisions;
      continue;
    }
    a.sw.kin = ls::optimal_switch_acceleration(a.s.vel.x, sc_.airspace.v_expected[a.sw.target_layer], H,
                                               sc_.airspace.a_max);
    a.s.mode = FlightMode::Switching;
    if (a.goal) a.goal.reset();
    trace_.events.push_back({t_next, "LS_REQ", a.s.id, a.sw.target_layer});
    ++trace_.switch_requests;
  }
  world_.last_broadcasts = broadcasts;

  for (std::size_t idx = 0; idx < agents.size(); ++idx) {
    auto& a = agents[idx];
    fc::integrate(a.s, acc[idx], sc_.dt, sc_.airspace.v_max);
    if (!is_finite(a.s.pos) || !is_finite(a.s.vel)) {
      throw SimulationAbort(world_.tick, a.s.id,
                            "non-finite state for aircraft " + std::to_string(a.s.id) + " at tick " +
                                std::to_string(world_.tick));
    }
    if (a.s.pos.x >= sc_.course_length || a.s.pos.x < 0.0) {
      const double shift = sc_.course_length * std::floor(a.s.pos.x / sc_.course_length);
      a.s.pos.x -= shift;
      if (a.goal) a.goal->x -= shift;
    }
    if (a.s.mode == FlightMode::Switching) {
      if (ls::captured(a.sw, a.s.pos.y, a.s.vel.y, H)) {
        a.sw.phase = ls::SwitchPhase::Capture;
        a.s.layer = a.sw.target_layer;
        a.s.mode = FlightMode::Cruise;
        ls::finish_switch(a.sw);
        trace_.events.push_back({t_next, "LS_DONE", a.s.id, a.s.layer});
        ++trace_.switch_completions;
      } else {
        a.s.layer = nearest_layer(a.s.pos.y, sc_);
      }
    }
  }

  ++world_.tick;
  world_.t = static_cast<double>(world_.tick) * sc_.dt;
  record();
}

void Simulation::record() {
  auto& agents = world_.agents;
  const Ring ring{sc_.course_length};
  const LayerGroups g = group_layers(agents);

  // capacity
  int ris_index = -1;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].s.id == world_.ris_id) ris_index = static_cast<int>(i);
  }
  double served_cap = std::numeric_limits<double>::quiet_NaN();
  for (auto& a : agents) {
    a.ris_id = kNoRis;
    double snr = 0.0;
    bool linked = false;
    if (a.s.id == world_.served_id && world_.phases) {
      const bool building = world_.ris_id == kBuildingRis;
      if (building || ris_index >= 0) {
        const Vec2 ris_pos = building ? sc_.stationary_ris_pos : agents[ris_index].s.pos;
        try {
          snr = ris::snr(sc_.bs_pos, ris_pos, a.s.pos, *world_.phases, channel_);
          linked = true;
          a.ris_id = world_.ris_id;
        } catch (const DomainError&) {
        }
      }
    }
    if (!linked) snr = distance(sc_.bs_pos, a.s.pos) > 0.0 ? ris::direct_snr(sc_.bs_pos, a.s.pos, channel_) : 0.0;
    a.capacity = ris::capacity(snr, channel_);
    if (linked) served_cap = a.capacity;
  }
  trace_.served_capacity.push_back(served_cap);

  // potential fields
  std::array<double, 5> fields{};
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].s.mode == FlightMode::Switching) continue;
    const Neighborhood n = neighborhood(static_cast<int>(i), agents, g, sc_, ring);
    for (int k = 0; k < 5; ++k) {
      const auto kind = fc::kAllFields[k];
      fields[k] += sc_.weights.weight(kind) * fc::field_value(kind, agents[i].s, n.ctx);
    }
  }
  trace_.fields.push_back(fields);
  trace_.times.push_back(world_.t);

  // conflicts
  auto note_conflict = [&](const AircraftState& a, const AircraftState& b) {
    tracker_.observe(world_.tick, a.id, b.id);
  };
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (g.pred[i] >= 0 && front_ratio(static_cast<int>(i), agents, g, sc_, ring) < 1.0) {
      note_conflict(agents[i].s, agents[g.pred[i]].s);
    }
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const auto& si = agents[i].s;
      const auto& sj = agents[j].s;
      const bool same_layer_cruise =
          si.layer == sj.layer && si.mode != FlightMode::Switching && sj.mode != FlightMode::Switching;
      if (same_layer_cruise) continue;
      if (std::abs(si.pos.y - sj.pos.y) > 2.0 * sc_.airspace.layer_spacing) continue;
      AircraftState img = sj;
      img.pos = ring.image(si.pos, sj.pos);
      if (distance(si.pos, img.pos) == 0.0) {
        note_conflict(si, sj);
        continue;
      }
      const double sep = std::max(vertical_safe_separation(si, img, sc_.airspace),
                                  vertical_safe_separation(img, si, sc_.airspace));
      if (distance(si.pos, img.pos) < sep) note_conflict(si, sj);
    }
  }

  if (opt_.record_rows) {
    for (const auto& a : agents) {
      trace_.rows.push_back({world_.t, a.s.id, a.s.pos.x, a.s.pos.y, a.s.vel.x, a.s.vel.y, a.s.layer, a.s.mode,
                             a.capacity, a.ris_id});
    }
  }
}

SimTrace Simulation::finish() {
  trace_.episodes = tracker_.finish();
  for (const auto& e : trace_.episodes) {
    trace_.events.push_back({static_cast<double>(e.first_tick) * sc_.dt, "CONFLICT", e.a, e.b});
  }
  std::stable_sort(trace_.events.begin(), trace_.events.end(),
                   [](const TraceEvent& x, const TraceEvent& y) { return x.t < y.t; });
  return std::move(trace_);
}

SimTrace run(const Scenario& sc, SimOptions opt) {
  Simulation sim(sc, opt);
  const long ticks = std::lround(sc.duration / sc.dt);
  for (long k = 0; k < ticks; ++k) sim.step();
  return sim.finish();
}

}  // namespace uam::sim
