#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uam/comm_planner.hpp"
#include "uam/core_types.hpp"
#include "uam/flight_control.hpp"
#include "uam/netcalc.hpp"
#include "uam/ris_channel.hpp"

namespace uam {

enum class RisMode { Airborne, AirborneWithInterference, Stationary };
const char* to_string(RisMode m);

struct AircraftInit {
  int layer = 1;
  double x = 0.0;
  std::optional<double> v;
};

// Generated roster, used when no explicit aircraft lines are given.
struct RosterSpec {
  int per_layer = 0;
  bool random_placement = false;
  double speed_jitter = 0.0;   // uniform +- around the layer reference speed
};

struct SwitchParams {
  double p_ls = 0.4;
  double trigger_period = 1.0;  // s between trigger samples per aircraft
  int backoff_initial = 2;      // initial back-off window, in ticks
  double hearing_range = 500.0; // m; control-plane reach for switch requests
  bool clearance_gate = true;   // hold requests while a nearby aircraft is mid-switch
  int min_layer = 1;            // ground layer is not a switch target
  int max_layer = 2;
};

struct SweepParams {
  double load_min = 0.0;
  double load_max = 60.0;
  double load_step = 0.5;
  double t_eval = 1.5;
  double epsilon = 0.2;                   // delay-bound violation level
  std::vector<int> rosters{5, 20, 30, 50};
  int seeds = 10;
  double t_dur_max = 5.0;
  double t_dur_step = 0.1;
  int threads = 1;
};

struct Scenario {
  std::string name = "unnamed";
  AirspaceConfig airspace;
  ris::ChannelParams channel;
  int ris_elements = 1024;
  ris::PhaseResolution resolution = ris::PhaseResolution::continuous();
  std::string resolution_text = "continuous";
  Vec2 interference_pos{800.0, 100.0};
  double interference_power = 1.2589254117941673e-3;  // 1 dBm
  std::optional<double> interference_alpha;
  nc::ProtocolParams protocol;
  fc::PotentialWeights weights;
  double d_safe_margin = 1.5;
  plan::PsoParams pso;
  std::vector<AircraftInit> aircraft;
  RosterSpec roster;
  Vec2 bs_pos{0.0, 0.0};
  RisMode ris_mode = RisMode::Airborne;
  Vec2 stationary_ris_pos{400.0, 100.0};
  double dt = 0.1;
  int q = 5;
  double duration = 40.0;
  std::uint64_t seed = 1;
  double course_length = 2000.0;
  SwitchParams switching;
  double episode_merge = 1.0;   // s above separation before a new episode starts
  SweepParams sweep;

  // Throws ConfigError naming the first broken invariant.
  void validate() const;

  // Channel parameters with the interference source wired in per ris_mode.
  ris::ChannelParams effective_channel() const;

  // CPF separation target on a layer.
  double cpf_d_safe(int layer) const;
};

// Parses `key = value` lines; '#' starts a comment. Unknown keys throw
// ConfigError with the line number.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path_or_builtin);

void apply_override(Scenario& s, const std::string& key, const std::string& value);
// "key=value"
void apply_override(Scenario& s, const std::string& assignment);

std::vector<std::string> scenario_keys();
std::vector<std::string> builtin_scenarios();
std::string builtin_scenario_path(const std::string& name);

// Reads the default-valued fields back out, for the validate ledger.
std::string describe(const Scenario& s);

}  // namespace uam
