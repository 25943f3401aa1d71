// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uam/cli.hpp"
#include "uam/flight_control.hpp"
#include "uam/layer_switch.hpp"
#include "uam/metrics.hpp"
#include "uam/netcalc.hpp"
#include "uam/ris_channel.hpp"
#include "uam/rng.hpp"
#include "uam/scenario.hpp"
#include "uam/sim_engine.hpp"

using namespace uam;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1
Outcome phase_optimality() {
  ris::ChannelParams p;
  Rng rng(101);
  double worst_rel = 0.0;
  long dominated = 0, draws = 0;
  for (int g = 0; g < 10000; ++g) {
    const int L = std::vector<int>{4, 9, 16}[static_cast<std::size_t>(g % 3)];
    const Vec2 bs{rng.uniform(-300, 300), 0.0};
    const Vec2 r{rng.uniform(0, 2000), 100.0};
    const Vec2 k{rng.uniform(0, 2000), 200.0};
    const auto opt = ris::optimal_phase_shift(bs, r, k, L, p);
    const double got = std::abs(ris::cascaded_gain(bs, r, k, opt, p));
    const double d1 = std::hypot(r.x - bs.x, r.y - bs.y), d2 = std::hypot(k.x - r.x, k.y - r.y);
    const double bound = L * p.beta_ref / std::sqrt(std::pow(d1, p.alpha_bs_i) * std::pow(d2, p.alpha_i_k));
    worst_rel = std::max(worst_rel, std::abs(got - bound) / bound);
    ris::PhaseShiftConfig rnd;
    rnd.elements = L;
    rnd.phases.resize(static_cast<std::size_t>(L));
    for (int d = 0; d < 100; ++d) {
      for (double& th : rnd.phases) th = rng.uniform(0, 2 * M_PI);
      ++draws;
      if (got >= std::abs(ris::cascaded_gain(bs, r, k, rnd, p)) * (1 - 1e-12)) ++dominated;
    }
  }
  return {worst_rel < 1e-9 && dominated == draws,
          "max rel err " + fmt("%.2e", worst_rel) + ", dominates " + std::to_string(dominated) + "/" +
              std::to_string(draws) + " random draws"};
}

// 2
Outcome switch_kinematics() {
  Rng rng(202);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double dv = rng.uniform(-30, 30), H = rng.uniform(50, 200), a = rng.uniform(1, 10);
    const auto k = ls::optimal_switch_acceleration(45.0, 45.0 + dv, H, a);
    worst = std::max({worst, std::abs(k.ax * k.t_ls - dv), std::abs(0.25 * k.ay * k.t_ls * k.t_ls - H),
                      std::abs(k.ax * k.ax + k.ay * k.ay - a * a)});
  }
  const auto w = ls::optimal_switch_acceleration(45, 60, 100, 5);
  const bool point = std::abs(w.ay - 4.7267) < 5e-4 && std::abs(w.ax - 1.6306) < 5e-4 && std::abs(w.t_ls - 9.20) < 5e-3;
  return {worst < 1e-9 && point, "max residual " + fmt("%.2e", worst) + ", worked point ay " + fmt("%.4f", w.ay) +
                                     " ax " + fmt("%.4f", w.ax) + " t " + fmt("%.3f", w.t_ls)};
}

// 3
Outcome delay_orderings() {
  const Scenario sc = load_scenario("fig5");
  const auto rows = cli::delay_sweep(sc);
  using K = nc::StackKind;
  std::map<double, std::map<K, double>> by_load;
  for (const auto& r : rows) by_load[r.load][r.kind] = r.failure;

  // light-load side: Control lowest from the first positive load up to the first load where it is not
  double light = NAN;
  bool control_first = false, first = true;
  for (const auto& [load, f] : by_load) {
    if (load <= 0) continue;
    const bool lowest = f.at(K::Control) < std::min(f.at(K::Direct), f.at(K::Ris));
    if (first) control_first = lowest;
    first = false;
    if (!lowest) {
      light = load;
      break;
    }
  }
  // heavy-load side: smallest load from which Ris never loses, with a strict win somewhere
  double heavy = NAN;
  bool strict = false;
  for (auto it = by_load.rbegin(); it != by_load.rend(); ++it) {
    const auto& f = it->second;
    if (f.at(K::Ris) > std::min(f.at(K::Control), f.at(K::Direct)) + 1e-12) break;
    heavy = it->first;
    strict = strict || f.at(K::Ris) < std::min(f.at(K::Control), f.at(K::Direct)) - 1e-12;
  }
  const bool a_ok = control_first && !std::isnan(light) && !std::isnan(heavy) && strict;

  const double sat_c = cli::first_load_at(rows, K::Control, 1.0 - 1e-9);
  const double sat_d = cli::first_load_at(rows, K::Direct, 1.0 - 1e-9);
  const double sat_r = cli::first_load_at(rows, K::Ris, 1.0 - 1e-9);
  auto within = [](double v, double ref) { return std::abs(v - ref) <= 0.2 * ref; };
  const bool b_ok = sat_c < sat_d && sat_d < sat_r && within(sat_c, 30) && within(sat_d, 32) && within(sat_r, 45);

  const double x_d = cli::first_load_at(rows, K::Direct, sc.sweep.epsilon);
  const double x_r = cli::first_load_at(rows, K::Ris, sc.sweep.epsilon);
  const double gain = x_r / x_d - 1.0;
  const bool c_ok = std::abs(gain - 0.40) <= 0.15;

  return {a_ok && b_ok && c_ok,
          "(a) Control lowest up to " + fmt("%.1f", light) + " Mb, Ris lowest from " + fmt("%.1f", heavy) +
              " Mb; (b) saturation " + fmt("%.1f", sat_c) + "/" + fmt("%.1f", sat_d) + "/" + fmt("%.1f", sat_r) +
              " Mb; (c) Ris/Direct at 0.2: " + fmt("%.1f", x_r) + "/" + fmt("%.1f", x_d) + " = +" +
              fmt("%.0f", 100 * gain) + "%"};
}

// 4
Outcome gradients() {
  using fc::FieldKind;
  Rng rng(404);
  int states = 0;
  double worst = 0.0;
  while (states < 1000) {
    fc::FieldContext c;
    c.d_safe = rng.uniform(80, 250);
    c.v_ref = rng.uniform(30, 60);
    AircraftState s;
    s.pos = {rng.uniform(0, 2000), rng.uniform(20, 280)};
    s.vel = {rng.uniform(0, 70), rng.uniform(-10, 10)};
    c.preceding = s.pos + Vec2{rng.uniform(10, 400), rng.uniform(-5, 5)};
    for (int k = 0; k < 3; ++k) c.repulsors.push_back(s.pos + Vec2{rng.uniform(-300, 300), rng.uniform(-30, 30)});
    c.goal = s.pos + Vec2{rng.uniform(-200, 200), rng.uniform(-50, 50)};
    bool boundary = std::abs(distance(s.pos, *c.preceding) - c.d_safe) < 1e-2 ||
                    std::abs(s.pos.y / c.H - 0.5) < 1e-3 || std::abs(s.pos.y / c.H - 1.5) < 1e-3;
    for (Vec2 p : c.repulsors) {
      const double d = distance(s.pos, p);
      boundary = boundary || d < 5.0 || std::abs(d - c.d_safe) < 1e-2;
    }
    if (boundary) continue;
    ++states;
    for (FieldKind k : fc::kAllFields) {
      const Vec2 g = fc::field_gradient(k, s, c);
      AircraftState t = s;
      Vec2& v = k == FieldKind::Stab ? t.vel : t.pos;
      const double h = 1e-5;
      for (int axis = 0; axis < 2; ++axis) {
        double& x = axis == 0 ? v.x : v.y;
        const double x0 = x;
        x = x0 + h;
        const double fp = fc::field_value(k, t, c);
        x = x0 - h;
        const double fm = fc::field_value(k, t, c);
        x = x0;
        const double fd = (fp - fm) / (2 * h);
        const double an = axis == 0 ? g.x : g.y;
        worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
      }
    }
  }
  return {worst < 1e-5, "max rel err " + fmt("%.2e", worst) + " over 1000 states"};
}

// 5
Outcome velocity_stabilization() {
  const Scenario sc = load_scenario("fig10");
  const auto tr = sim::run(sc);
  double dev_low = 0, dev_high = 0, vy = 0;
  for (const auto& r : tr.rows) {
    if (r.mode != FlightMode::Cruise) continue;
    vy = std::max(vy, std::abs(r.vy));
    if (r.t <= 10.0) continue;
    const double d = std::abs(r.vx - sc.airspace.v_expected[r.layer]);
    (r.layer == 1 ? dev_low : dev_high) = std::max(r.layer == 1 ? dev_low : dev_high, d);
  }
  return {dev_low <= 1.0 && dev_high <= 1.0 && vy < 1.0,
          "max |vx - ref| after 10 s: low " + fmt("%.3f", dev_low) + ", high " + fmt("%.3f", dev_high) +
              "; max |vy| " + fmt("%.3f", vy) + " (" + std::to_string(tr.switch_completions) + " switches)"};
}

double field_at(const sim::SimTrace& tr, double t) {
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (std::abs(tr.times[i] - t) < 1e-6) {
      double s = 0;
      for (double f : tr.fields[i]) s += f;
      return s;
    }
  }
  return NAN;
}

// 6
Outcome field_convergence() {
  const Scenario sc = load_scenario("fig11b");
  const auto tr = sim::run(sc);
  const double f2 = field_at(tr, 2.0), f20 = field_at(tr, 20.0);
  return {f20 < 0.05 * f2, "summed field " + fmt("%.4g", f2) + " at 2 s, " + fmt("%.4g", f20) + " at 20 s (" +
                               fmt("%.2f", 100 * f20 / f2) + "%)"};
}

// 7
Outcome ipr_reproduction() {
  const Scenario sc = load_scenario("fig12");
  const auto on5 = cli::ipr_point(sc, 5, true), off5 = cli::ipr_point(sc, 5, false);
  const auto on30 = cli::ipr_point(sc, 30, true), off30 = cli::ipr_point(sc, 30, false);
  const double t5 = on5.mean_threshold, o5 = off5.mean_threshold;
  const double t30 = on30.mean_threshold, o30 = off30.mean_threshold;
  const bool abs5 = t5 >= 0.1 && t5 <= 0.5;
  const bool ratio = t5 <= 0.5 * o5;
  const bool dense = t30 >= 0.8 * o30 && t30 >= 0.6;
  return {abs5 && ratio && dense,
          "5/layer on " + fmt("%.2f", t5) + " s [" + (abs5 ? "ok" : "outside 0.1-0.5") + "], off " + fmt("%.2f", o5) +
              " s, ratio " + fmt("%.2f", t5 / o5) + " [" + (ratio ? "ok" : "> 0.5") + "]; 30/layer on " +
              fmt("%.2f", t30) + " s, off " + fmt("%.2f", o30) + " s [" + (dense ? "ok" : "fail") + "]"};
}

// 8
Outcome stationary_no_switching() {
  int stationary_done = 0;
  double plain = 0, interf = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    sim::SimOptions opt;
    opt.record_rows = false;
    Scenario st = load_scenario("stationary"), pl = load_scenario("table1-5perlayer"), in = load_scenario("interference");
    st.seed = pl.seed = in.seed = seed;
    stationary_done += sim::run(st, opt).switch_completions;
    const auto a = sim::run(pl, opt), b = sim::run(in, opt);
    plain += a.switch_requests + a.switch_completions;
    interf += b.switch_requests + b.switch_completions;
  }
  plain /= 10;
  interf /= 10;
  return {stationary_done == 0 && interf >= plain,
          "stationary completions " + std::to_string(stationary_done) + "; mean switch events interference " +
              fmt("%.1f", interf) + " vs airborne " + fmt("%.1f", plain)};
}

// 9
Outcome resolution_ordering() {
  const Scenario sc = load_scenario("fig9");
  const auto series = cli::phase_sweep_series(sc);
  std::map<std::string, double> m;
  for (const auto& s : series) m[s.label] = s.mean;
  const std::vector<std::string> order{"fixed-zero", "pi", "pi-3", "pi-6", "pi-12", "continuous"};
  bool mono = true;
  std::string chain;
  for (std::size_t i = 0; i < order.size(); ++i) {
    chain += (i ? " <= " : "") + order[i] + " " + fmt("%.3f", m.at(order[i]));
    if (i > 0 && m.at(order[i]) < 0.98 * m.at(order[i - 1])) mono = false;
  }
  const double c = m.at("continuous");
  const bool close = std::abs(m.at("pi-6") - c) <= 0.05 * c && std::abs(m.at("pi-12") - c) <= 0.05 * c;
  return {mono && close, chain};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "uam_acceptance_determinism";
  fs::remove_all(root);
  int scenarios = 0, mismatches = 0;
  for (const auto& name : builtin_scenarios()) {
    std::vector<std::string> outs;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path dir = root / (name + "_" + std::to_string(outs.size()));
      cli::CliInvocation inv{"simulate", name, dir.string(), {std::string("sweep.threads=") + threads}, 7};
      std::ostringstream log, err;
      if (cli::dispatch(inv, log, err) != 0) return {false, name + ": " + err.str()};
      outs.push_back(slurp(dir / "trace.csv") + slurp(dir / "metrics.txt") + slurp(dir / "events.csv"));
    }
    ++scenarios;
    if (outs[0] != outs[1] || outs[0] != outs[2]) ++mismatches;
  }
  // a threaded sweep must reduce to the same numbers as a serial one
  Scenario sc = load_scenario("fig12");
  sc.sweep.seeds = 4;
  sc.sweep.threads = 1;
  const auto serial = cli::ipr_point(sc, 5, true);
  sc.sweep.threads = 4;
  const auto threaded = cli::ipr_point(sc, 5, true);
  const bool sweep_same = serial.thresholds == threaded.thresholds && serial.curve == threaded.curve;
  fs::remove_all(root);
  return {mismatches == 0 && sweep_same, std::to_string(scenarios) + " builtin scenarios, " +
                                             std::to_string(mismatches) + " mismatches; threaded sweep " +
                                             (sweep_same ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"phase-shift optimality", phase_optimality},
      {"switch kinematics", switch_kinematics},
      {"delay-bound orderings", delay_orderings},
      {"gradient correctness", gradients},
      {"velocity stabilization", velocity_stabilization},
      {"potential field convergence", field_convergence},
      {"IPR reproduction", ipr_reproduction},
      {"stationary surface, no switching", stationary_no_switching},
      {"resolution ordering", resolution_ordering},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
