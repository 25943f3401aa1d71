#pragma once

#include <optional>
#include <vector>

#include "uam/core_types.hpp"

namespace uam::fc {

enum class FieldKind { Attr, Stab, Repu, Layer, Goal };
inline constexpr FieldKind kAllFields[] = {FieldKind::Attr, FieldKind::Stab, FieldKind::Repu,
                                           FieldKind::Layer, FieldKind::Goal};
const char* to_string(FieldKind k);

struct PotentialWeights {
  double w_attr = 1e-4;
  double w_stab = 0.5;
  double w_repu = 2e8;
  double w_layer = 0.05;
  double w_goal = 1e-4;
  double consensus_gain = 0.5;
  double neighbor_radius = 300.0;

  double weight(FieldKind k) const;
  void validate() const;
};

struct FieldContext {
  std::optional<Vec2> preceding;   // nearest same-layer aircraft ahead
  std::vector<Vec2> repulsors;     // same-layer aircraft within the neighbor radius
  double d_safe = 150.0;
  double v_ref = 45.0;
  double H = 100.0;
  std::optional<Vec2> goal;
};

double field_value(FieldKind kind, const AircraftState& s, const FieldContext& ctx);

// Position gradient for every field except Stab, whose gradient is taken
// with respect to velocity.
Vec2 field_gradient(FieldKind kind, const AircraftState& s, const FieldContext& ctx);

double total_field(const AircraftState& s, const FieldContext& ctx, const PotentialWeights& w);

// -sum_j gain * (v_i - v_j)
Vec2 consensus_term(const AircraftState& s, const std::vector<AircraftState>& neighbors, double gain);

Vec2 acceleration(const AircraftState& s, const std::vector<AircraftState>& neighbors,
                  const PotentialWeights& w, const FieldContext& ctx, double a_max);

// Semi-implicit Euler with a speed clamp.
void integrate(AircraftState& s, Vec2 acc, double dt, double v_max);

}  // namespace uam::fc
