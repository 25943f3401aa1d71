#include "uam/layer_switch.hpp"

#include <algorithm>
#include <cmath>

#include "uam/errors.hpp"

namespace uam::ls {

const char* to_string(SwitchPhase p) {
  switch (p) {
    case SwitchPhase::Idle: return "idle";
    case SwitchPhase::Pending: return "pending";
    case SwitchPhase::Accel: return "accel";
    case SwitchPhase::Decel: return "decel";
    case SwitchPhase::Capture: return "capture";
  }
  return "?";
}

double switch_probability(double d_front, double d_rear, double d_safe, double p_ls) {
  if (!(p_ls >= 0.0 && p_ls <= 0.5)) throw DomainError("switch_probability: p_ls must be in [0, 0.5]");
  const int violated = (d_front < d_safe ? 1 : 0) + (d_rear < d_safe ? 1 : 0);
  if (violated == 0) return 0.0;
  if (violated == 1) return p_ls;
  return std::min(2.0 * p_ls, 1.0);
}

void begin_pending(SwitchAutomaton& a, int from_layer, int target_layer) {
  if (a.phase != SwitchPhase::Idle) throw ContractViolation("begin_pending: automaton not idle");
  a.phase = SwitchPhase::Pending;
  a.from_layer = from_layer;
  a.target_layer = target_layer;
  a.tr = a.rng.uniform_int(1, a.tr_max);
}

bool backoff_step(SwitchAutomaton& a, const BackoffEvents& events) {
  if (a.phase != SwitchPhase::Pending) throw ContractViolation("backoff_step: automaton not pending");
  if (events.separation_restored) {
    a.phase = SwitchPhase::Idle;
    a.tr = a.tr_max;
    return false;
  }
  if (events.foreign_request_heard) {
    a.tr_max = std::min(2 * a.tr_max, kBackoffCeiling);
    a.tr = a.rng.uniform_int(1, a.tr_max);
    return false;
  }
  a.tr -= 1;
  if (a.tr <= 0) {
    a.tr = 0;
    a.phase = SwitchPhase::Accel;
    return true;
  }
  return false;
}

SwitchKinematics optimal_switch_acceleration(double v_from, double v_to, double H, double a_max) {
  if (!(H > 0.0) || !(a_max > 0.0)) throw DomainError("switch kinematics: H and a_max must be > 0");
  const double dv = v_to - v_from;
  const double dv2 = dv * dv;
  const double ay = (std::sqrt(dv2 * dv2 + 64.0 * H * H * a_max * a_max) - dv2) / (8.0 * H);
  const double ax = dv * std::sqrt(ay * H) / (2.0 * H);
  return {ax, ay, std::sqrt(4.0 * H / ay)};
}

Accel2 switch_acceleration_profile(SwitchAutomaton& a, double h, double H) {
  const int dir = a.direction();
  const double mid = 0.5 * (a.from_layer + a.target_layer) * H;
  if (a.phase == SwitchPhase::Accel && (h - mid) * dir >= 0.0) a.phase = SwitchPhase::Decel;
  if (a.phase == SwitchPhase::Accel) return {a.kin.ax, dir * a.kin.ay};
  if (a.phase == SwitchPhase::Decel) return {a.kin.ax, -dir * a.kin.ay};
  return {};
}

bool captured(const SwitchAutomaton& a, double h, double vy, double H) {
  if (a.phase != SwitchPhase::Decel) return false;
  const double target_h = a.target_layer * H;
  if (std::abs(h - target_h) <= 2.0 && std::abs(vy) <= 1.0) return true;
  return vy * a.direction() <= 0.0;
}

void finish_switch(SwitchAutomaton& a) {
  a.phase = SwitchPhase::Idle;
  a.tr_max = a.tr_max_initial;
  a.tr = a.tr_max;
}

int choose_target_layer(int current, int count_below, int count_above, int min_layer, int max_layer) {
  const bool can_down = current - 1 >= min_layer;
  const bool can_up = current + 1 <= max_layer;
  if (can_up && can_down) return count_below < count_above ? current - 1 : current + 1;
  if (can_up) return current + 1;
  if (can_down) return current - 1;
  throw DomainError("choose_target_layer: no adjacent layer available");
}

}  // namespace uam::ls
