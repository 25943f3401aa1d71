#include "uam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace uam {

void EpisodeTracker::observe(long tick, int a, int b) {
  const auto key = std::minmax(a, b);
  const std::pair<int, int> k{key.first, key.second};
  auto it = open_.find(k);
  if (it != open_.end()) {
    if (tick - it->second.last_tick <= merge_ticks_) {
      it->second.last_tick = tick;
      return;
    }
    closed_.push_back(it->second);
    open_.erase(it);
  }
  open_.emplace(k, Episode{k.first, k.second, tick, tick});
}

std::vector<Episode> EpisodeTracker::finish() {
  for (const auto& [_, e] : open_) closed_.push_back(e);
  open_.clear();
  std::sort(closed_.begin(), closed_.end(), [](const Episode& x, const Episode& y) {
    return std::tie(x.first_tick, x.a, x.b) < std::tie(y.first_tick, y.a, y.b);
  });
  return closed_;
}

double ipr(const std::vector<Episode>& episodes, double t_dur, double dt) {
  if (episodes.empty()) return 1.0;
  std::size_t intrusions = 0;
  for (const auto& e : episodes) {
    if (static_cast<double>(e.ticks()) * dt > t_dur + 1e-9) ++intrusions;
  }
  return static_cast<double>(episodes.size() - intrusions) / static_cast<double>(episodes.size());
}

double ipr_threshold(const std::vector<Episode>& episodes, double dt) {
  long longest = 0;
  for (const auto& e : episodes) longest = std::max(longest, e.ticks());
  return static_cast<double>(longest) * dt;
}

std::vector<std::pair<double, double>> ipr_curve(const std::vector<Episode>& episodes, double dt,
                                                 double t_dur_max, double t_dur_step) {
  std::vector<std::pair<double, double>> out;
  const long n = std::lround(t_dur_max / t_dur_step);
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * t_dur_step;
    out.emplace_back(t, ipr(episodes, t, dt));
  }
  return out;
}

}  // namespace uam
