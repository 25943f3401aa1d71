#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uam/netcalc.hpp"
#include "uam/ris_channel.hpp"
#include "uam/scenario.hpp"
#include "uam/sim_engine.hpp"

namespace uam::cli {

struct CliInvocation {
  std::string subcommand;
  std::string scenario;              // path or builtin name
  std::string out_dir = "out";
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
};

using Series = std::vector<std::pair<double, double>>;

// Scenario with overrides and the seed applied, validated.
Scenario resolve_scenario(const CliInvocation& inv);

struct DelayRow {
  nc::StackKind kind;
  double load = 0.0;
  double failure = 0.0;      // P{D > t_eval}
  double delay_bound = 0.0;  // smallest t with P{D > t} <= epsilon
};
std::vector<DelayRow> delay_sweep(const Scenario& sc);

// First sweep load where `kind`'s failure bound reaches `level`, or NaN.
double first_load_at(const std::vector<DelayRow>& rows, nc::StackKind kind, double level);

struct ResolutionSeries {
  std::string label;
  ris::PhaseResolution resolution;
  Series capacity;   // (t, capacity) at planning ticks
  double mean = 0.0;
};
std::vector<ris::PhaseResolution> sweep_resolutions();
std::string resolution_label(const ris::PhaseResolution& r);
std::vector<ResolutionSeries> phase_sweep_series(const Scenario& sc);

struct IprCurve {
  int per_layer = 0;
  bool switching = true;
  Series curve;                         // seed-averaged IPR(t_dur)
  std::vector<double> thresholds;       // per seed
  double mean_threshold = 0.0;
};
std::vector<IprCurve> ipr_sweep_curves(const Scenario& sc);
IprCurve ipr_point(const Scenario& sc, int per_layer, bool switching);

// Summary document written next to a trace.
std::map<std::string, std::string> summarize(const sim::SimTrace& trace, const Scenario& sc);

void write_trace(const std::string& path, const sim::SimTrace& trace);
void write_events(const std::string& path, const sim::SimTrace& trace);
void write_kv(const std::string& path, const std::map<std::string, std::string>& kv);
void write_series(const std::string& path, const Series& s);
std::map<std::string, std::string> read_kv(const std::string& path);

int simulate(const CliInvocation& inv, std::ostream& log);
int delay_bounds(const CliInvocation& inv, std::ostream& log);
int phase_sweep(const CliInvocation& inv, std::ostream& log);
int ipr_sweep(const CliInvocation& inv, std::ostream& log);
int validate(const CliInvocation& inv, std::ostream& log);

int dispatch(const CliInvocation& inv, std::ostream& log, std::ostream& err);

}  // namespace uam::cli
