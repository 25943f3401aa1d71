#pragma once

#include <map>
#include <utility>
#include <vector>

namespace uam {

// A maximal run of sub-separation ticks for one unordered aircraft pair.
struct Episode {
  int a = 0;
  int b = 0;
  long first_tick = 0;
  long last_tick = 0;

  long ticks() const { return last_tick - first_tick + 1; }
};

// Folds per-tick conflict sets into episodes. A pair that re-enters conflict
// within `merge_ticks` ticks of its last conflict tick continues the same
// episode.
class EpisodeTracker {
 public:
  explicit EpisodeTracker(long merge_ticks = 10) : merge_ticks_(merge_ticks) {}

  void observe(long tick, int a, int b);
  // Closes every open episode; the tracker can keep observing afterwards.
  std::vector<Episode> finish();

 private:
  long merge_ticks_;
  std::map<std::pair<int, int>, Episode> open_;
  std::vector<Episode> closed_;
};

// (n_cfl - n_int) / n_cfl, where an intrusion is an episode lasting longer
// than t_dur; 1 when there are no conflicts.
double ipr(const std::vector<Episode>& episodes, double t_dur, double dt);

// Smallest t_dur with IPR = 1: the longest episode duration.
double ipr_threshold(const std::vector<Episode>& episodes, double dt);

std::vector<std::pair<double, double>> ipr_curve(const std::vector<Episode>& episodes, double dt,
                                                 double t_dur_max, double t_dur_step);

}  // namespace uam
