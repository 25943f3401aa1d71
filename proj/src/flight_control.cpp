#include "uam/flight_control.hpp"

#include <cmath>
#include <string>

#include "uam/errors.hpp"

namespace uam::fc {

const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Attr: return "attr";
    case FieldKind::Stab: return "stab";
    case FieldKind::Repu: return "repu";
    case FieldKind::Layer: return "layer";
    case FieldKind::Goal: return "goal";
  }
  return "?";
}

double PotentialWeights::weight(FieldKind k) const {
  switch (k) {
    case FieldKind::Attr: return w_attr;
    case FieldKind::Stab: return w_stab;
    case FieldKind::Repu: return w_repu;
    case FieldKind::Layer: return w_layer;
    case FieldKind::Goal: return w_goal;
  }
  return 0.0;
}

void PotentialWeights::validate() const {
  if (!(w_attr >= 0 && w_stab >= 0 && w_repu >= 0 && w_layer >= 0 && w_goal >= 0 && consensus_gain >= 0 &&
        neighbor_radius >= 0)) {
    throw ConfigError("weights: all potential weights must be >= 0");
  }
}

namespace {

// Center of the active Layer branch.
double layer_center(double h, double H) {
  if (h > 1.5 * H) return 2.0 * H;
  if (h > 0.5 * H) return H;
  return 0.0;
}

double repulsor_distance(Vec2 a, Vec2 b) {
  const double d = distance(a, b);
  if (!(d > 0.0)) throw DomainError("repulsion: coincident aircraft");
  return d;
}

}  // namespace

double field_value(FieldKind kind, const AircraftState& s, const FieldContext& ctx) {
  switch (kind) {
    case FieldKind::Attr: {
      if (!ctx.preceding) return 0.0;
      const double d = distance(s.pos, *ctx.preceding);
      return d >= ctx.d_safe ? (d - ctx.d_safe) * (d - ctx.d_safe) : 0.0;
    }
    case FieldKind::Stab: {
      const double dv = s.vel.x - ctx.v_ref;
      return dv * dv + s.vel.y * s.vel.y;
    }
    case FieldKind::Repu: {
      double sum = 0.0;
      for (const Vec2& p : ctx.repulsors) {
        const double d = repulsor_distance(s.pos, p);
        if (d < ctx.d_safe) {
          const double r = 1.0 / d - 1.0 / ctx.d_safe;
          sum += r * r;
        }
      }
      return sum;
    }
    case FieldKind::Layer: {
      const double dh = s.pos.y - layer_center(s.pos.y, ctx.H);
      return dh * dh;
    }
    case FieldKind::Goal: {
      if (!ctx.goal) return 0.0;
      const Vec2 e = s.pos - *ctx.goal;
      return dot(e, e);
    }
  }
  return 0.0;
}

Vec2 field_gradient(FieldKind kind, const AircraftState& s, const FieldContext& ctx) {
  switch (kind) {
    case FieldKind::Attr: {
      if (!ctx.preceding) return {};
      const Vec2 e = s.pos - *ctx.preceding;
      const double d = norm(e);
      if (d < ctx.d_safe) return {};
      return e * (2.0 * (d - ctx.d_safe) / d);
    }
    case FieldKind::Stab:
      return {2.0 * (s.vel.x - ctx.v_ref), 2.0 * s.vel.y};
    case FieldKind::Repu: {
      Vec2 g{};
      for (const Vec2& p : ctx.repulsors) {
        const double d = repulsor_distance(s.pos, p);
        if (d < ctx.d_safe) {
          const double r = 1.0 / d - 1.0 / ctx.d_safe;
          g = g + (s.pos - p) * (-2.0 * r / (d * d * d));
        }
      }
      return g;
    }
    case FieldKind::Layer:
      return {0.0, 2.0 * (s.pos.y - layer_center(s.pos.y, ctx.H))};
    case FieldKind::Goal:
      if (!ctx.goal) return {};
      return (s.pos - *ctx.goal) * 2.0;
  }
  return {};
}

double total_field(const AircraftState& s, const FieldContext& ctx, const PotentialWeights& w) {
  double sum = 0.0;
  for (FieldKind k : kAllFields) sum += w.weight(k) * field_value(k, s, ctx);
  return sum;
}

Vec2 consensus_term(const AircraftState& s, const std::vector<AircraftState>& neighbors, double gain) {
  Vec2 c{};
  for (const auto& n : neighbors) c = c - (s.vel - n.vel) * gain;
  return c;
}

Vec2 acceleration(const AircraftState& s, const std::vector<AircraftState>& neighbors,
                  const PotentialWeights& w, const FieldContext& ctx, double a_max) {
  Vec2 a{};
  for (FieldKind k : kAllFields) a = a - field_gradient(k, s, ctx) * w.weight(k);
  a = a + consensus_term(s, neighbors, w.consensus_gain);
  const double m = norm(a);
  if (m > a_max) a = a * (a_max / m);
  return a;
}

void integrate(AircraftState& s, Vec2 acc, double dt, double v_max) {
  s.acc = acc;
  s.vel = s.vel + acc * dt;
  const double sp = norm(s.vel);
  if (sp > v_max) s.vel = s.vel * (v_max / sp);
  s.pos = s.pos + s.vel * dt;
}

}  // namespace uam::fc
