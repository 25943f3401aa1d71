#include "uam/core_types.hpp"

#include <algorithm>
#include <string>

#include "uam/errors.hpp"

namespace uam {

std::string_view to_string(FlightMode mode) {
  switch (mode) {
    case FlightMode::Cruise: return "Cruise";
    case FlightMode::Switching: return "Switching";
    case FlightMode::BackingOff: return "BackingOff";
  }
  return "?";
}

void AirspaceConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("airspace: ") + what);
  };
  require(std::isfinite(layer_spacing) && layer_spacing > 0.0, "layer spacing H must be > 0");
  require(v_expected[0] < v_expected[1] && v_expected[1] < v_expected[2],
          "expected velocities must satisfy v0 < v1 < v2");
  require(v_expected[0] >= 0.0, "expected velocities must be non-negative");
  require(std::isfinite(v_max) && v_max >= v_expected[2], "v_max must be >= v2");
  require(std::isfinite(a_max) && a_max > 0.0, "a_max must be > 0");
  require(brake_follower > 0.0, "follower deceleration b must be > 0");
  require(brake_leader >= brake_follower, "leader deceleration B must be >= b");
  require(t_perceive >= 0.0 && t_react >= 0.0, "reaction times must be >= 0");
  require(std::isfinite(c_vert) && c_vert >= 0.0, "c_vert must be >= 0");
}

double horizontal_safe_separation(double v, const AirspaceConfig& cfg) {
  if (!std::isfinite(v) || v < 0.0) throw DomainError("horizontal_safe_separation: v must be finite and >= 0");
  const double big = cfg.brake_leader;
  const double small = cfg.brake_follower;
  if (!(big > 0.0) || !(small > 0.0)) throw DomainError("horizontal_safe_separation: brake rates must be > 0");
  return (big - small) / (2.0 * big * small) * v * v + v * cfg.reaction_time();
}

double vertical_safe_separation(const AircraftState& i, const AircraftState& j,
                                const AirspaceConfig& cfg) {
  const Vec2 rel_pos = i.pos - j.pos;
  const Vec2 rel_vel = i.vel - j.vel;
  const double dist = norm(rel_pos);
  if (dist == 0.0) throw DomainError("vertical_safe_separation: coincident positions");
  const double rel_speed = norm(rel_vel);
  if (rel_speed == 0.0) return 0.0;
  const double cos_gamma = -dot(rel_pos, rel_vel) / (dist * rel_speed);
  return cfg.c_vert * norm(i.vel) * std::max(0.0, cos_gamma);
}

bool conflict(const AircraftState& i, const AircraftState& j, const AirspaceConfig& cfg) {
  if (i.layer == j.layer) {
    const AircraftState& follower = i.pos.x <= j.pos.x ? i : j;
    const double gap = std::abs(i.pos.x - j.pos.x);
    return gap < horizontal_safe_separation(norm(follower.vel), cfg);
  }
  const double dist = distance(i.pos, j.pos);
  if (dist == 0.0) return true;
  const double sep = std::max(vertical_safe_separation(i, j, cfg), vertical_safe_separation(j, i, cfg));
  return dist < sep;
}

bool satisfies_invariants(const AircraftState& s, const AirspaceConfig& cfg) {
  if (s.layer < 0 || s.layer >= kLayerCount) return false;
  if (norm(s.vel) > cfg.v_max * (1.0 + 1e-12)) return false;
  if (s.mode == FlightMode::Cruise &&
      std::abs(s.pos.y - cfg.layer_altitude(s.layer)) > 0.5 * cfg.layer_spacing) {
    return false;
  }
  return true;
}

}  // namespace uam
