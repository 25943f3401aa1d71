#include "uam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "uam/errors.hpp"

namespace uam {

const char* to_string(RisMode m) {
  switch (m) {
    case RisMode::Airborne: return "airborne";
    case RisMode::AirborneWithInterference: return "airborne-interference";
    case RisMode::Stationary: return "stationary";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return i;
}

Vec2 to_vec2(const std::string& v) {
  std::string body = v;
  if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  const auto parts = split(body, ',');
  if (parts.size() != 2) throw ConfigError("expected 'x, y', got '" + v + "'");
  return {to_double(parts[0]), to_double(parts[1])};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(Vec2 v) { return fmt(v.x) + "," + fmt(v.y); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// "pi/4", "1/4", "0.25" -> 0.25
double parse_xi(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "pi") return 1.0;
  if (s.rfind("pi/", 0) == 0) return 1.0 / to_double(s.substr(3));
  const auto slash = s.find('/');
  if (slash != std::string::npos) return to_double(s.substr(0, slash)) / to_double(s.substr(slash + 1));
  return to_double(s);
}

void set_resolution(Scenario& s, const std::string& v) {
  if (v == "continuous") {
    s.resolution = ris::PhaseResolution::continuous();
  } else if (v == "fixed-zero" || v == "zero") {
    s.resolution = ris::PhaseResolution::fixed_zero();
  } else {
    const double xi = parse_xi(v);
    if (!(xi > 0.0)) throw ConfigError("phase resolution must be > 0");
    s.resolution = ris::PhaseResolution::discrete(xi);
  }
  s.resolution_text = v;
}

void set_ris_mode(Scenario& s, const std::string& raw) {
  std::string v = raw;
  std::string args;
  const auto paren = v.find('(');
  if (paren != std::string::npos) {
    args = v.substr(paren);
    v = trim(v.substr(0, paren));
  }
  if (v == "airborne" || v == "AirborneRis") {
    s.ris_mode = RisMode::Airborne;
  } else if (v == "airborne-interference" || v == "AirborneRisWithInterference") {
    s.ris_mode = RisMode::AirborneWithInterference;
  } else if (v == "stationary" || v == "StationaryRis") {
    s.ris_mode = RisMode::Stationary;
    if (!args.empty()) s.stationary_ris_pos = to_vec2(args);
  } else {
    throw ConfigError("unknown RIS mode '" + raw + "'");
  }
  if (!args.empty() && s.ris_mode != RisMode::Stationary) throw ConfigError("only the stationary RIS takes a position");
}

struct Key {
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

template <class F>
Key num(F field) {
  return {[field](Scenario& s, const std::string& v) { field(s) = to_double(v); },
          [field](const Scenario& s) { return fmt(field(const_cast<Scenario&>(s))); }};
}

template <class T, class F>
Key integer(F field) {
  return {[field](Scenario& s, const std::string& v) { field(s) = static_cast<T>(to_int(v)); },
          [field](const Scenario& s) { return std::to_string(field(const_cast<Scenario&>(s))); }};
}

template <class F>
Key vec(F field) {
  return {[field](Scenario& s, const std::string& v) { field(s) = to_vec2(v); },
          [field](const Scenario& s) { return fmt(field(const_cast<Scenario&>(s))); }};
}

#define FIELD(expr) [](Scenario& s) -> auto& { return expr; }

const std::map<std::string, Key>& registry() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> k;
    k["name"] = {[](Scenario& s, const std::string& v) { s.name = v; }, [](const Scenario& s) { return s.name; }};

    k["airspace.layer_spacing"] = num(FIELD(s.airspace.layer_spacing));
    k["airspace.v_expected"] = {
        [](Scenario& s, const std::string& v) {
          const auto parts = split(v, ',');
          if (parts.size() != 3) throw ConfigError("airspace.v_expected needs three speeds");
          for (int i = 0; i < 3; ++i) s.airspace.v_expected[i] = to_double(parts[i]);
        },
        [](const Scenario& s) {
          return fmt(s.airspace.v_expected[0]) + "," + fmt(s.airspace.v_expected[1]) + "," +
                 fmt(s.airspace.v_expected[2]);
        }};
    k["airspace.v_max"] = num(FIELD(s.airspace.v_max));
    k["airspace.a_max"] = num(FIELD(s.airspace.a_max));
    k["airspace.brake_leader"] = num(FIELD(s.airspace.brake_leader));
    k["airspace.brake_follower"] = num(FIELD(s.airspace.brake_follower));
    k["airspace.t_perceive"] = num(FIELD(s.airspace.t_perceive));
    k["airspace.t_react"] = num(FIELD(s.airspace.t_react));
    k["airspace.c_vert"] = num(FIELD(s.airspace.c_vert));

    k["channel.beta_db"] = {[](Scenario& s, const std::string& v) { s.channel.beta_ref = ris::db_to_linear(to_double(v)); },
                            [](const Scenario& s) { return fmt(linear_to_db(s.channel.beta_ref)); }};
    k["channel.alpha_bs_k"] = num(FIELD(s.channel.alpha_bs_k));
    k["channel.alpha_bs_i"] = num(FIELD(s.channel.alpha_bs_i));
    k["channel.alpha_i_k"] = num(FIELD(s.channel.alpha_i_k));
    k["channel.p_bs_dbm"] = {[](Scenario& s, const std::string& v) { s.channel.p_bs = ris::dbm_to_watts(to_double(v)); },
                             [](const Scenario& s) { return fmt(watts_to_dbm(s.channel.p_bs)); }};
    k["channel.noise_dbm"] = {[](Scenario& s, const std::string& v) { s.channel.sigma2 = ris::dbm_to_watts(to_double(v)); },
                              [](const Scenario& s) { return fmt(watts_to_dbm(s.channel.sigma2)); }};
    k["channel.bandwidth"] = num(FIELD(s.channel.bandwidth));
    k["ris.elements"] = integer<int>(FIELD(s.ris_elements));
    k["ris.resolution"] = {set_resolution, [](const Scenario& s) { return s.resolution_text; }};
    k["ris.mode"] = {set_ris_mode, [](const Scenario& s) { return std::string(to_string(s.ris_mode)); }};
    k["ris_mode"] = k["ris.mode"];
    k["ris.stationary_pos"] = vec(FIELD(s.stationary_ris_pos));
    k["interference.pos"] = vec(FIELD(s.interference_pos));
    k["interference.power_dbm"] = {
        [](Scenario& s, const std::string& v) { s.interference_power = ris::dbm_to_watts(to_double(v)); },
        [](const Scenario& s) { return fmt(watts_to_dbm(s.interference_power)); }};
    k["interference.alpha"] = {[](Scenario& s, const std::string& v) { s.interference_alpha = to_double(v); },
                               [](const Scenario& s) {
                                 return s.interference_alpha ? fmt(*s.interference_alpha) : std::string("channel.alpha_i_k");
                               }};

    k["protocol.r_omni"] = num(FIELD(s.protocol.r_omni));
    k["protocol.r_direct"] = num(FIELD(s.protocol.r_direct));
    k["protocol.r_ris1"] = num(FIELD(s.protocol.r_ris1));
    k["protocol.r_ris2"] = num(FIELD(s.protocol.r_ris2));
    k["protocol.l_rts"] = num(FIELD(s.protocol.l_rts));
    k["protocol.l_cts"] = num(FIELD(s.protocol.l_cts));
    k["protocol.l_rtr"] = num(FIELD(s.protocol.l_rtr));
    k["protocol.l_data"] = num(FIELD(s.protocol.l_data));
    k["protocol.zeta"] = num(FIELD(s.protocol.zeta));
    k["protocol.p_loss"] = num(FIELD(s.protocol.p_loss));
    k["protocol.ttl_rts"] = num(FIELD(s.protocol.ttl_rts));
    k["protocol.ttl_cts"] = num(FIELD(s.protocol.ttl_cts));
    k["protocol.ttl_rtr"] = num(FIELD(s.protocol.ttl_rtr));
    k["protocol.arrival_window"] = num(FIELD(s.protocol.arrival_window));
    k["protocol.grid_step"] = num(FIELD(s.protocol.grid_step));

    k["weights.attr"] = num(FIELD(s.weights.w_attr));
    k["weights.stab"] = num(FIELD(s.weights.w_stab));
    k["weights.repu"] = num(FIELD(s.weights.w_repu));
    k["weights.layer"] = num(FIELD(s.weights.w_layer));
    k["weights.goal"] = num(FIELD(s.weights.w_goal));
    k["weights.consensus"] = num(FIELD(s.weights.consensus_gain));
    k["weights.neighbor_radius"] = num(FIELD(s.weights.neighbor_radius));
    k["weights.d_safe_margin"] = num(FIELD(s.d_safe_margin));

    k["pso.swarm"] = integer<int>(FIELD(s.pso.swarm_size));
    k["pso.iter"] = integer<int>(FIELD(s.pso.max_iter));
    k["pso.inertia"] = num(FIELD(s.pso.inertia));
    k["pso.c1"] = num(FIELD(s.pso.cognitive));
    k["pso.c2"] = num(FIELD(s.pso.social));
    k["pso.v_clamp"] = num(FIELD(s.pso.v_clamp));

    k["sim.dt"] = num(FIELD(s.dt));
    k["sim.q"] = integer<int>(FIELD(s.q));
    k["sim.duration"] = num(FIELD(s.duration));
    k["sim.seed"] = integer<std::uint64_t>(FIELD(s.seed));
    k["seed"] = k["sim.seed"];
    k["sim.course_length"] = num(FIELD(s.course_length));
    k["sim.bs"] = vec(FIELD(s.bs_pos));
    k["sim.episode_merge"] = num(FIELD(s.episode_merge));

    k["switch.p_ls"] = num(FIELD(s.switching.p_ls));
    k["switch.trigger_period"] = num(FIELD(s.switching.trigger_period));
    k["switch.backoff_initial"] = integer<int>(FIELD(s.switching.backoff_initial));
    k["switch.hearing_range"] = num(FIELD(s.switching.hearing_range));
    k["switch.clearance_gate"] = {
        [](Scenario& s, const std::string& v) {
          if (v == "true" || v == "1") s.switching.clearance_gate = true;
          else if (v == "false" || v == "0") s.switching.clearance_gate = false;
          else throw ConfigError("expected true or false");
        },
        [](const Scenario& s) { return std::string(s.switching.clearance_gate ? "true" : "false"); }};
    k["switch.min_layer"] = integer<int>(FIELD(s.switching.min_layer));
    k["switch.max_layer"] = integer<int>(FIELD(s.switching.max_layer));

    k["roster.per_layer"] = integer<int>(FIELD(s.roster.per_layer));
    k["roster.placement"] = {
        [](Scenario& s, const std::string& v) {
          if (v == "even") s.roster.random_placement = false;
          else if (v == "random") s.roster.random_placement = true;
          else throw ConfigError("roster.placement must be 'even' or 'random'");
        },
        [](const Scenario& s) { return std::string(s.roster.random_placement ? "random" : "even"); }};
    k["roster.speed_jitter"] = num(FIELD(s.roster.speed_jitter));

    k["sweep.load_min"] = num(FIELD(s.sweep.load_min));
    k["sweep.load_max"] = num(FIELD(s.sweep.load_max));
    k["sweep.load_step"] = num(FIELD(s.sweep.load_step));
    k["sweep.t_eval"] = num(FIELD(s.sweep.t_eval));
    k["sweep.epsilon"] = num(FIELD(s.sweep.epsilon));
    k["sweep.rosters"] = {
        [](Scenario& s, const std::string& v) {
          s.sweep.rosters.clear();
          for (const auto& p : split(v, ',')) s.sweep.rosters.push_back(static_cast<int>(to_int(p)));
        },
        [](const Scenario& s) {
          std::string out;
          for (int r : s.sweep.rosters) out += (out.empty() ? "" : ",") + std::to_string(r);
          return out;
        }};
    k["sweep.seeds"] = integer<int>(FIELD(s.sweep.seeds));
    k["sweep.t_dur_max"] = num(FIELD(s.sweep.t_dur_max));
    k["sweep.t_dur_step"] = num(FIELD(s.sweep.t_dur_step));
    k["sweep.threads"] = integer<int>(FIELD(s.sweep.threads));
    return k;
  }();
  return keys;
}

#undef FIELD

void add_aircraft(Scenario& s, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 2 && parts.size() != 3) throw ConfigError("aircraft needs 'layer, x[, v]'");
  AircraftInit a;
  a.layer = static_cast<int>(to_int(parts[0]));
  a.x = to_double(parts[1]);
  if (parts.size() == 3) a.v = to_double(parts[2]);
  s.aircraft.push_back(a);
}

}  // namespace

void Scenario::validate() const {
  airspace.validate();
  channel.validate();
  protocol.validate();
  weights.validate();
  pso.validate();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("scenario: " + what);
  };
  require(dt > 0.0, "sim.dt must be > 0");
  require(q >= 1, "sim.q must be >= 1");
  require(duration >= dt, "sim.duration must be >= sim.dt");
  require(course_length > 0.0, "sim.course_length must be > 0");
  require(ris_elements >= 1, "ris.elements must be >= 1");
  {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ris_elements))));
    require(side * side == ris_elements, "ris.elements must be a perfect square");
  }
  require(switching.p_ls >= 0.0 && switching.p_ls <= 0.5, "switch.p_ls must be in [0, 0.5]");
  require(switching.hearing_range >= 0.0, "switch.hearing_range must be >= 0");
  require(switching.trigger_period > 0.0, "switch.trigger_period must be > 0");
  require(switching.backoff_initial >= 1 && switching.backoff_initial <= 32, "switch.backoff_initial must be in [1, 32]");
  require(switching.min_layer >= 0 && switching.max_layer <= 2 && switching.min_layer < switching.max_layer,
          "switch layers must satisfy 0 <= min < max <= 2");
  require(interference_power > 0.0, "interference.power_dbm must be finite");
  require(d_safe_margin > 0.0, "weights.d_safe_margin must be > 0");
  require(episode_merge >= 0.0, "sim.episode_merge must be >= 0");
  require(roster.per_layer >= 0 && roster.speed_jitter >= 0.0, "roster values must be >= 0");
  for (const auto& a : aircraft) {
    require(a.layer >= switching.min_layer && a.layer <= switching.max_layer, "aircraft layer outside the flight layers");
    require(a.x >= 0.0 && a.x < course_length, "aircraft x outside [0, course_length)");
    require(!a.v || (*a.v >= 0.0 && *a.v <= airspace.v_max), "aircraft speed outside [0, v_max]");
  }
  require(sweep.load_step > 0.0 && sweep.load_max >= sweep.load_min && sweep.load_min >= 0.0, "bad load sweep");
  require(sweep.t_eval > 0.0, "sweep.t_eval must be > 0");
  require(sweep.seeds >= 1 && sweep.threads >= 1, "sweep.seeds and sweep.threads must be >= 1");
  require(sweep.t_dur_step > 0.0 && sweep.t_dur_max > 0.0, "bad t_dur sweep");
}

ris::ChannelParams Scenario::effective_channel() const {
  ris::ChannelParams c = channel;
  c.interference.reset();
  if (ris_mode == RisMode::AirborneWithInterference) {
    c.interference = ris::Interference{interference_pos, interference_power, interference_alpha};
  }
  return c;
}

double Scenario::cpf_d_safe(int layer) const {
  return d_safe_margin * horizontal_safe_separation(airspace.v_expected[layer], airspace);
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Scenario s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "aircraft") {
        add_aircraft(s, value);
      } else {
        apply_override(s, key, value);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return s;
}

std::string builtin_scenario_path(const std::string& name) {
  return std::string(UAM_SCENARIO_DIR) + "/" + name + ".cfg";
}

std::vector<std::string> builtin_scenarios() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(UAM_SCENARIO_DIR, ec)) {
    if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

Scenario load_scenario(const std::string& path_or_builtin) {
  std::string path = path_or_builtin;
  if (!std::filesystem::exists(path)) {
    const std::string builtin = builtin_scenario_path(path_or_builtin);
    if (!std::filesystem::exists(builtin)) throw ConfigError("scenario not found: " + path_or_builtin);
    path = builtin;
  }
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read scenario: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str(), path);
}

void apply_override(Scenario& s, const std::string& key, const std::string& value) {
  if (key == "aircraft") {
    add_aircraft(s, value);
    return;
  }
  const auto& keys = registry();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("unknown key '" + key + "'");
  try {
    it->second.set(s, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + assignment + "'");
  apply_override(s, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::vector<std::string> scenario_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

std::string describe(const Scenario& s) {
  std::string out;
  for (const auto& [k, key] : registry()) {
    if (k == "ris_mode" || k == "seed") continue;
    out += k + " = " + key.get(s) + "\n";
  }
  for (const auto& a : s.aircraft) {
    out += "aircraft = " + std::to_string(a.layer) + "," + fmt(a.x) + (a.v ? "," + fmt(*a.v) : std::string()) + "\n";
  }
  return out;
}

}  // namespace uam
