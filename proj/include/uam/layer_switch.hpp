#pragma once

#include <cstdint>

#include "uam/rng.hpp"

namespace uam::ls {

inline constexpr int kBackoffCeiling = 32;

enum class SwitchPhase { Idle, Pending, Accel, Decel, Capture };
const char* to_string(SwitchPhase p);

struct SwitchKinematics {
  double ax = 0.0;
  double ay = 0.0;
  double t_ls = 0.0;
};

struct SwitchAutomaton {
  int tr_max_initial = 2;
  int tr_max = 2;
  int tr = 2;
  SwitchPhase phase = SwitchPhase::Idle;
  int from_layer = 1;
  int target_layer = 1;
  SwitchKinematics kin;
  Rng rng;

  int direction() const { return target_layer > from_layer ? 1 : -1; }
};

struct BackoffEvents {
  bool separation_restored = false;
  bool foreign_request_heard = false;
};

double switch_probability(double d_front, double d_rear, double d_safe, double p_ls);

// Idle -> Pending with a fresh countdown drawn from [1, tr_max].
void begin_pending(SwitchAutomaton& a, int from_layer, int target_layer);

// One back-off tick. Returns true when the countdown expires and the
// aircraft broadcasts its switch request (phase is then Accel).
bool backoff_step(SwitchAutomaton& a, const BackoffEvents& events);

SwitchKinematics optimal_switch_acceleration(double v_from, double v_to, double H, double a_max);

struct Accel2 {
  double ax = 0.0;
  double ay = 0.0;
};

// Bang-bang vertical profile: accelerate toward the target until the midpoint
// between layers, then decelerate. Updates the phase at the midpoint.
Accel2 switch_acceleration_profile(SwitchAutomaton& a, double h, double H);

// True once the aircraft may hand control back to the potential field.
bool captured(const SwitchAutomaton& a, double h, double vy, double H);

// Completes a switch: Idle again with the back-off window reset.
void finish_switch(SwitchAutomaton& a);

// Adjacent layer with fewer nearby aircraft; ties go up. Layers outside
// [min_layer, max_layer] are never chosen.
int choose_target_layer(int current, int count_below, int count_above, int min_layer, int max_layer);

}  // namespace uam::ls
