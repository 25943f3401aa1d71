#pragma once

#include <array>
#include <cmath>
#include <string_view>

namespace uam {

// Planar (x, h) vector. `y` is altitude for positions and vertical rate for
// velocities.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

enum class FlightMode { Cruise, Switching, BackingOff };

std::string_view to_string(FlightMode mode);

inline constexpr int kLayerCount = 3;

struct AircraftState {
  int id = 0;
  Vec2 pos;
  Vec2 vel;
  Vec2 acc;
  int layer = 1;
  FlightMode mode = FlightMode::Cruise;
};

// Layered-airspace constants. Braking and reaction parameters feed the
// horizontal separation; c_vert scales the vertical one.
struct AirspaceConfig {
  double layer_spacing = 100.0;                 // H
  std::array<double, kLayerCount> v_expected{30.0, 45.0, 60.0};
  double v_max = 70.0;
  double a_max = 5.0;
  double brake_leader = 8.0;                    // B
  double brake_follower = 4.0;                  // b
  double t_perceive = 0.25;                     // t1
  double t_react = 0.25;                        // t2
  double c_vert = 1.0;

  double layer_altitude(int layer) const { return layer * layer_spacing; }
  double reaction_time() const { return t_perceive + t_react; }

  // Throws ConfigError on the first broken invariant.
  void validate() const;
};

// Braking-distance separation for an aircraft flying at speed v behind a
// leader that brakes at B while the follower brakes at b after t1 + t2.
double horizontal_safe_separation(double v, const AirspaceConfig& cfg);

// Approach-geometry separation between aircraft on different layers,
// c_vert * |v_i| * cos(gamma_ij), clamped at zero for receding pairs.
double vertical_safe_separation(const AircraftState& i, const AircraftState& j,
                                const AirspaceConfig& cfg);

// Same layer: horizontal gap below the follower's braking separation.
// Different layers: euclidean distance below the larger vertical separation
// of the two directed pairs.
bool conflict(const AircraftState& i, const AircraftState& j, const AirspaceConfig& cfg);

// Cruise-mode layer band and speed bound.
bool satisfies_invariants(const AircraftState& s, const AirspaceConfig& cfg);

}  // namespace uam
