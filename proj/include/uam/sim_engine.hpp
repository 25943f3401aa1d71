#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uam/core_types.hpp"
#include "uam/layer_switch.hpp"
#include "uam/metrics.hpp"
#include "uam/ris_channel.hpp"
#include "uam/scenario.hpp"

namespace uam::sim {

inline constexpr int kNoRis = -1;
inline constexpr int kBuildingRis = 0;

struct TraceRow {
  double t = 0.0;
  int id = 0;
  double x = 0.0, h = 0.0, vx = 0.0, vy = 0.0;
  int layer = 0;
  FlightMode mode = FlightMode::Cruise;
  double capacity = 0.0;
  int ris_id = kNoRis;
};

struct TraceEvent {
  double t = 0.0;
  std::string kind;   // LS_PENDING, LS_REQ, LS_COLLIDE, LS_CANCEL, LS_DONE, CONFLICT
  int id = 0;
  int other = 0;      // target layer, peer id, or 0
};

// Served link geometry at one planning tick.
struct LinkSample {
  double t = 0.0;
  Vec2 bs, ris, k;
};

struct Agent {
  AircraftState s;
  ls::SwitchAutomaton sw;
  std::optional<Vec2> goal;
  double capacity = 0.0;
  int ris_id = kNoRis;
};

struct Broadcast {
  int id = 0;
  Vec2 pos;
};

struct World {
  long tick = 0;
  double t = 0.0;
  std::vector<Agent> agents;
  std::vector<Broadcast> last_broadcasts;
  int served_id = -1;            // high-layer aircraft on the RIS link
  int ris_id = kNoRis;           // aircraft carrying the RIS, or kBuildingRis
  std::optional<ris::PhaseShiftConfig> phases;
};

struct SimOptions {
  bool record_rows = true;
};

struct SimTrace {
  std::vector<TraceRow> rows;
  std::vector<TraceEvent> events;
  std::vector<Episode> episodes;
  std::vector<LinkSample> links;
  // per tick, after the step
  std::vector<double> times;
  std::vector<std::array<double, 5>> fields;   // weighted, summed over aircraft, by field kind
  std::vector<double> served_capacity;         // NaN when no link was served
  int switch_requests = 0;
  int switch_completions = 0;
  int switch_collisions = 0;
  double dt = 0.1;
};

// Initial states from explicit aircraft lines or the roster generator.
std::vector<AircraftState> build_roster(const Scenario& sc);

World make_world(const Scenario& sc);

class Simulation {
 public:
  explicit Simulation(Scenario sc, SimOptions opt = {});

  const World& world() const { return world_; }
  const Scenario& scenario() const { return sc_; }

  // One tick of the dual-time-scale loop.
  void step();
  SimTrace finish();

 private:
  void plan();
  void record();

  Scenario sc_;
  SimOptions opt_;
  ris::ChannelParams channel_;
  World world_;
  SimTrace trace_;
  EpisodeTracker tracker_;
  long trigger_ticks_ = 10;
};

SimTrace run(const Scenario& sc, SimOptions opt = {});

}  // namespace uam::sim
