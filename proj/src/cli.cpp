#include "uam/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "uam/errors.hpp"

namespace uam::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

// Runs job(i) for i in [0, n) on up to `threads` workers; results are
// written by index so ordering never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
}

double mean_of(const Series& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& [_, y] : s) sum += y;
  return sum / static_cast<double>(s.size());
}

}  // namespace

Scenario resolve_scenario(const CliInvocation& inv) {
  if (inv.scenario.empty()) throw ConfigError("--scenario is required");
  Scenario sc = load_scenario(inv.scenario);
  for (const auto& o : inv.overrides) apply_override(sc, o);
  if (inv.seed) sc.seed = *inv.seed;
  sc.validate();
  return sc;
}

// ---- delay bounds ----

std::vector<DelayRow> delay_sweep(const Scenario& sc) {
  std::vector<double> loads;
  const long n = std::lround((sc.sweep.load_max - sc.sweep.load_min) / sc.sweep.load_step);
  for (long i = 0; i <= n; ++i) loads.push_back(sc.sweep.load_min + static_cast<double>(i) * sc.sweep.load_step);
  const nc::StackKind kinds[] = {nc::StackKind::Control, nc::StackKind::Direct, nc::StackKind::Ris};
  const double t_max = std::max(5.0, sc.sweep.t_eval);
  std::vector<DelayRow> rows(loads.size() * 3);
  parallel_for(static_cast<int>(rows.size()), sc.sweep.threads, [&](int idx) {
    const auto kind = kinds[idx % 3];
    const double load = loads[static_cast<std::size_t>(idx / 3)];
    DelayRow r{kind, load, 0.0, 0.0};
    r.failure = nc::failure_probability(kind, load, sc.sweep.t_eval, sc.protocol);
    r.delay_bound = nc::delay_bound(kind, load, sc.sweep.epsilon, t_max, sc.protocol);
    rows[static_cast<std::size_t>(idx)] = r;
  });
  return rows;
}

double first_load_at(const std::vector<DelayRow>& rows, nc::StackKind kind, double level) {
  for (const auto& r : rows) {
    if (r.kind == kind && r.failure >= level) return r.load;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---- phase sweep ----

std::vector<ris::PhaseResolution> sweep_resolutions() {
  using R = ris::PhaseResolution;
  return {R::continuous(), R::discrete(1.0),        R::discrete(1.0 / 3.0), R::discrete(0.25),
          R::discrete(1.0 / 6.0), R::discrete(1.0 / 12.0), R::fixed_zero()};
}

std::string resolution_label(const ris::PhaseResolution& r) {
  switch (r.kind) {
    case ris::PhaseResolution::Kind::Continuous: return "continuous";
    case ris::PhaseResolution::Kind::FixedZero: return "fixed-zero";
    case ris::PhaseResolution::Kind::Discrete: {
      const double inv = 1.0 / r.xi;
      if (std::abs(inv - std::round(inv)) < 1e-9) {
        const long k = std::lround(inv);
        return k == 1 ? "pi" : "pi-" + std::to_string(k);
      }
      return "xi-" + num(r.xi);
    }
  }
  return "?";
}

std::vector<ResolutionSeries> phase_sweep_series(const Scenario& sc) {
  sim::SimOptions opt;
  opt.record_rows = false;
  const sim::SimTrace trace = sim::run(sc, opt);
  const ris::ChannelParams ch = sc.effective_channel();
  std::vector<ResolutionSeries> out;
  for (const auto& res : sweep_resolutions()) {
    ResolutionSeries s{resolution_label(res), res, {}, 0.0};
    for (const auto& link : trace.links) {
      const auto ideal = ris::optimal_phase_shift(link.bs, link.ris, link.k, sc.ris_elements, ch);
      const auto phases = ris::realize(ideal, res);
      s.capacity.emplace_back(link.t, ris::capacity(ris::snr(link.bs, link.ris, link.k, phases, ch), ch));
    }
    s.mean = mean_of(s.capacity);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- IPR sweep ----

namespace {

Scenario ipr_variant(const Scenario& base, int per_layer, bool switching, int seed_index) {
  Scenario sc = base;
  sc.aircraft.clear();
  sc.roster.per_layer = per_layer;
  sc.seed = base.seed + static_cast<std::uint64_t>(seed_index);
  if (!switching) sc.switching.p_ls = 0.0;
  return sc;
}

}  // namespace

IprCurve ipr_point(const Scenario& base, int per_layer, bool switching) {
  IprCurve c;
  c.per_layer = per_layer;
  c.switching = switching;
  const int seeds = base.sweep.seeds;
  std::vector<std::vector<Episode>> eps(static_cast<std::size_t>(seeds));
  parallel_for(seeds, base.sweep.threads, [&](int k) {
    sim::SimOptions opt;
    opt.record_rows = false;
    eps[static_cast<std::size_t>(k)] = sim::run(ipr_variant(base, per_layer, switching, k), opt).episodes;
  });
  for (int k = 0; k < seeds; ++k) {
    const auto& e = eps[static_cast<std::size_t>(k)];
    c.thresholds.push_back(ipr_threshold(e, base.dt));
    const auto curve = ipr_curve(e, base.dt, base.sweep.t_dur_max, base.sweep.t_dur_step);
    if (c.curve.empty()) {
      c.curve = curve;
    } else {
      for (std::size_t i = 0; i < curve.size(); ++i) c.curve[i].second += curve[i].second;
    }
  }
  for (auto& p : c.curve) p.second /= seeds;
  double sum = 0.0;
  for (double t : c.thresholds) sum += t;
  c.mean_threshold = sum / seeds;
  return c;
}

std::vector<IprCurve> ipr_sweep_curves(const Scenario& sc) {
  std::vector<IprCurve> out;
  for (int n : sc.sweep.rosters) {
    out.push_back(ipr_point(sc, n, true));
    out.push_back(ipr_point(sc, n, false));
  }
  return out;
}

// ---- files ----

std::map<std::string, std::string> summarize(const sim::SimTrace& trace, const Scenario& sc) {
  std::map<std::string, std::string> kv;
  kv["scenario"] = sc.name;
  kv["seed"] = std::to_string(sc.seed);
  kv["ticks"] = std::to_string(trace.times.size());
  kv["dt"] = num(sc.dt);
  kv["ris_mode"] = to_string(sc.ris_mode);
  kv["resolution"] = sc.resolution_text;
  kv["switch.requests"] = std::to_string(trace.switch_requests);
  kv["switch.completions"] = std::to_string(trace.switch_completions);
  kv["switch.collisions"] = std::to_string(trace.switch_collisions);
  kv["conflicts"] = std::to_string(trace.episodes.size());
  kv["ipr.threshold"] = num(ipr_threshold(trace.episodes, sc.dt));
  for (const auto& [t, v] : ipr_curve(trace.episodes, sc.dt, sc.sweep.t_dur_max, sc.sweep.t_dur_step)) {
    kv["ipr.t_" + fixed(t, 2)] = num(v);
  }
  double cap_sum = 0.0;
  int cap_n = 0;
  for (double c : trace.served_capacity) {
    if (!std::isnan(c)) {
      cap_sum += c;
      ++cap_n;
    }
  }
  kv["capacity.served_mean"] = cap_n > 0 ? num(cap_sum / cap_n) : "nan";
  if (!trace.fields.empty()) {
    double total = 0.0;
    for (double f : trace.fields.back()) total += f;
    kv["field.final_total"] = num(total);
  }
  return kv;
}

void write_trace(const std::string& path, const sim::SimTrace& trace) {
  auto f = open_out(path);
  f << "t,id,x,h,vx,vy,layer,mode,capacity_bps,active_ris_id\n";
  for (const auto& r : trace.rows) {
    f << fixed(r.t, 2) << ',' << r.id << ',' << fixed(r.x, 6) << ',' << fixed(r.h, 6) << ',' << fixed(r.vx, 6)
      << ',' << fixed(r.vy, 6) << ',' << r.layer << ',' << to_string(r.mode) << ',' << fixed(r.capacity, 6) << ','
      << r.ris_id << '\n';
  }
}

void write_events(const std::string& path, const sim::SimTrace& trace) {
  auto f = open_out(path);
  f << "t,event,id,value\n";
  for (const auto& e : trace.events) f << fixed(e.t, 2) << ',' << e.kind << ',' << e.id << ',' << e.other << '\n';
}

void write_kv(const std::string& path, const std::map<std::string, std::string>& kv) {
  auto f = open_out(path);
  for (const auto& [k, v] : kv) f << k << " = " << v << '\n';
}

void write_series(const std::string& path, const Series& s) {
  auto f = open_out(path);
  f << "x,y\n";
  for (const auto& [x, y] : s) f << num(x) << ',' << num(y) << '\n';
}

std::map<std::string, std::string> read_kv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ConfigError("malformed metrics line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

// ---- subcommands ----

int simulate(const CliInvocation& inv, std::ostream& log) {
  const Scenario sc = resolve_scenario(inv);
  ensure_dir(inv.out_dir);
  sim::SimTrace trace;
  try {
    trace = sim::run(sc);
  } catch (const SimulationAbort& e) {
    auto f = open_out(inv.out_dir + "/abort.csv");
    f << "tick,id,message\n" << e.tick() << ',' << e.aircraft_id() << ',' << e.what() << '\n';
    throw;
  }
  write_trace(inv.out_dir + "/trace.csv", trace);
  write_events(inv.out_dir + "/events.csv", trace);
  write_kv(inv.out_dir + "/metrics.txt", summarize(trace, sc));
  {
    auto f = open_out(inv.out_dir + "/episodes.csv");
    f << "a,b,start,duration\n";
    for (const auto& e : trace.episodes) {
      f << e.a << ',' << e.b << ',' << fixed(static_cast<double>(e.first_tick) * sc.dt, 2) << ','
        << fixed(static_cast<double>(e.ticks()) * sc.dt, 2) << '\n';
    }
  }

  // per-aircraft trajectory and horizontal/vertical speed series
  std::map<int, Series> traj, vx, vy;
  for (const auto& r : trace.rows) {
    traj[r.id].emplace_back(r.x, r.h);
    vx[r.id].emplace_back(r.t, r.vx);
    vy[r.id].emplace_back(r.t, r.vy);
  }
  for (const auto& [id, s] : traj) {
    write_series(inv.out_dir + "/trajectory_" + std::to_string(id) + ".csv", s);
    write_series(inv.out_dir + "/vx_" + std::to_string(id) + ".csv", vx[id]);
    write_series(inv.out_dir + "/vy_" + std::to_string(id) + ".csv", vy[id]);
  }
  for (int k = 0; k < 5; ++k) {
    Series s;
    for (std::size_t i = 0; i < trace.times.size(); ++i) s.emplace_back(trace.times[i], trace.fields[i][k]);
    write_series(inv.out_dir + "/field_" + fc::to_string(fc::kAllFields[k]) + ".csv", s);
  }
  log << "simulated " << trace.times.size() << " ticks, " << trace.switch_completions << " layer switches, "
      << trace.episodes.size() << " conflicts -> " << inv.out_dir << '\n';
  return 0;
}

int delay_bounds(const CliInvocation& inv, std::ostream& log) {
  const Scenario sc = resolve_scenario(inv);
  ensure_dir(inv.out_dir);
  const auto rows = delay_sweep(sc);
  {
    auto f = open_out(inv.out_dir + "/delay_bounds.csv");
    f << "kind,load,failure_probability,delay_bound\n";
    for (const auto& r : rows) {
      f << nc::to_string(r.kind) << ',' << num(r.load) << ',' << num(r.failure) << ',' << num(r.delay_bound) << '\n';
    }
  }
  std::map<std::string, std::string> kv;
  for (auto kind : {nc::StackKind::Control, nc::StackKind::Direct, nc::StackKind::Ris}) {
    Series fail, delay;
    for (const auto& r : rows) {
      if (r.kind != kind) continue;
      fail.emplace_back(r.load, r.failure);
      delay.emplace_back(r.load, r.delay_bound);
    }
    const std::string name = nc::to_string(kind);
    write_series(inv.out_dir + "/failure_" + name + ".csv", fail);
    write_series(inv.out_dir + "/delay_" + name + ".csv", delay);
    kv["saturation_load." + name] = num(first_load_at(rows, kind, 1.0 - 1e-9));
    kv["load_at_0.2." + name] = num(first_load_at(rows, kind, 0.2));
  }
  write_kv(inv.out_dir + "/metrics.txt", kv);
  log << "delay bounds for " << rows.size() / 3 << " loads -> " << inv.out_dir << '\n';
  return 0;
}

int phase_sweep(const CliInvocation& inv, std::ostream& log) {
  const Scenario sc = resolve_scenario(inv);
  ensure_dir(inv.out_dir);
  const auto series = phase_sweep_series(sc);
  std::map<std::string, std::string> kv;
  for (const auto& s : series) {
    write_series(inv.out_dir + "/capacity_" + s.label + ".csv", s.capacity);
    kv["capacity_mean." + s.label] = num(s.mean);
  }
  write_kv(inv.out_dir + "/metrics.txt", kv);
  log << "phase sweep over " << series.size() << " resolutions -> " << inv.out_dir << '\n';
  return 0;
}

int ipr_sweep(const CliInvocation& inv, std::ostream& log) {
  const Scenario sc = resolve_scenario(inv);
  ensure_dir(inv.out_dir);
  const auto curves = ipr_sweep_curves(sc);
  std::map<std::string, std::string> kv;
  for (const auto& c : curves) {
    const std::string name = std::to_string(c.per_layer) + (c.switching ? "_switching" : "_no_switching");
    write_series(inv.out_dir + "/ipr_" + name + ".csv", c.curve);
    kv["threshold." + name] = num(c.mean_threshold);
    log << name << ": t_dur(IPR=1) = " << fixed(c.mean_threshold, 3) << " s\n";
  }
  write_kv(inv.out_dir + "/metrics.txt", kv);
  return 0;
}

namespace {

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

std::vector<Check> table_defaults(const Scenario& s) {
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  auto db = [](double lin) { return 10.0 * std::log10(lin); };
  return {
      {"dt = 0.1 s", near(s.dt, 0.1), num(s.dt)},
      {"q = 5", s.q == 5, std::to_string(s.q)},
      {"p_ls = 0.4", near(s.switching.p_ls, 0.4), num(s.switching.p_ls)},
      {"v0/v1/v2 = 30/45/60 m/s",
       near(s.airspace.v_expected[0], 30) && near(s.airspace.v_expected[1], 45) && near(s.airspace.v_expected[2], 60),
       num(s.airspace.v_expected[0]) + "/" + num(s.airspace.v_expected[1]) + "/" + num(s.airspace.v_expected[2])},
      {"H = 100 m", near(s.airspace.layer_spacing, 100), num(s.airspace.layer_spacing)},
      {"beta = -30 dB", near(db(s.channel.beta_ref), -30), num(db(s.channel.beta_ref))},
      {"alpha_bs_k = 2.5", near(s.channel.alpha_bs_k, 2.5), num(s.channel.alpha_bs_k)},
      {"alpha_bs_i = 2", near(s.channel.alpha_bs_i, 2.0), num(s.channel.alpha_bs_i)},
      {"alpha_i_k = 2.2", near(s.channel.alpha_i_k, 2.2), num(s.channel.alpha_i_k)},
      {"noise = -169 dBm", near(db(s.channel.sigma2) + 30, -169), num(db(s.channel.sigma2) + 30)},
      {"r_omni = 20", near(s.protocol.r_omni, 20), num(s.protocol.r_omni)},
      {"r_direct = 40", near(s.protocol.r_direct, 40), num(s.protocol.r_direct)},
      {"r_ris in [80, 100]",
       s.protocol.r_ris1 >= 80 && s.protocol.r_ris1 <= 100 && s.protocol.r_ris2 >= 80 && s.protocol.r_ris2 <= 100,
       num(s.protocol.r_ris1) + "," + num(s.protocol.r_ris2)},
      {"l_rts/l_cts/l_rtr = 3", near(s.protocol.l_rts, 3) && near(s.protocol.l_cts, 3) && near(s.protocol.l_rtr, 3),
       num(s.protocol.l_rts)},
      {"interference power = 1 dBm", near(db(s.interference_power) + 30, 1), num(db(s.interference_power) + 30)},
      {"interference at (800, 100)", s.interference_pos == Vec2{800, 100},
       num(s.interference_pos.x) + "," + num(s.interference_pos.y)},
      {"stationary RIS at (400, 100)", s.stationary_ris_pos == Vec2{400, 100},
       num(s.stationary_ris_pos.x) + "," + num(s.stationary_ris_pos.y)},
  };
}

bool report(const std::string& title, const Scenario* s, const std::string& error, std::ostream& log) {
  bool ok = error.empty();
  log << "[" << title << "]\n";
  log << (ok ? "PASS" : "FAIL") << "  invariants" << (ok ? "" : "  (" + error + ")") << '\n';
  if (s) {
    for (const auto& c : table_defaults(*s)) {
      log << (c.ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
      ok = ok && c.ok;
    }
  }
  return ok;
}

}  // namespace

int validate(const CliInvocation& inv, std::ostream& log) {
  std::vector<std::pair<std::string, std::string>> targets;
  if (inv.scenario.empty()) {
    targets.emplace_back("defaults", "");
    for (const auto& n : builtin_scenarios()) targets.emplace_back(n, n);
  } else {
    targets.emplace_back(inv.scenario, inv.scenario);
  }
  bool all = true;
  for (const auto& [title, src] : targets) {
    Scenario s;
    std::string error;
    try {
      if (!src.empty()) s = load_scenario(src);
      for (const auto& o : inv.overrides) apply_override(s, o);
      if (inv.seed) s.seed = *inv.seed;
      s.validate();
    } catch (const std::exception& e) {
      error = e.what();
    }
    // Reference defaults are reported but only invariants decide the exit status.
    std::ostringstream detail;
    report(title, error.empty() ? &s : nullptr, error, detail);
    log << detail.str();
    all = all && error.empty();
  }
  log << (all ? "all scenarios valid" : "invalid scenario found") << '\n';
  return all ? 0 : 1;
}

int dispatch(const CliInvocation& inv, std::ostream& log, std::ostream& err) {
  try {
    if (inv.subcommand == "simulate") return simulate(inv, log);
    if (inv.subcommand == "delay-bounds") return delay_bounds(inv, log);
    if (inv.subcommand == "phase-sweep") return phase_sweep(inv, log);
    if (inv.subcommand == "ipr-sweep") return ipr_sweep(inv, log);
    if (inv.subcommand == "validate") return validate(inv, log);
    err << "error: unknown subcommand '" << inv.subcommand << "'\n";
    return 2;
  } catch (const SimulationAbort& e) {
    err << "simulation aborted at tick " << e.tick() << ", aircraft " << e.aircraft_id() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace uam::cli
