#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "uam/core_types.hpp"

namespace uam::ris {

using Complex = std::complex<double>;

double db_to_linear(double db);
double dbm_to_watts(double dbm);

struct Interference {
  Vec2 pos;
  double power = 0.0;               // W
  std::optional<double> alpha;      // defaults to the RIS->aircraft exponent
};

// Large-scale LoS channel parameters, all linear.
struct ChannelParams {
  double beta_ref = 1e-3;           // power gain at 1 m
  double alpha_bs_k = 2.5;          // BS -> served (high-layer) aircraft
  double alpha_bs_i = 2.0;          // BS -> RIS
  double alpha_i_k = 2.2;           // RIS -> served aircraft
  double p_bs = 1.0;                // W
  double sigma2 = 1.2589254117941673e-20;  // W (-169 dBm)
  double bandwidth = 1.0;           // Hz; 1 gives capacity in bit/s/Hz
  std::optional<Interference> interference;

  void validate() const;
};

// How the RIS is allowed to realize a phase.
struct PhaseResolution {
  enum class Kind { Continuous, Discrete, FixedZero };
  Kind kind = Kind::Continuous;
  double xi = 0.0;                  // step is xi * pi when Discrete

  static PhaseResolution continuous() { return {}; }
  static PhaseResolution discrete(double xi) { return {Kind::Discrete, xi}; }
  static PhaseResolution fixed_zero() { return {Kind::FixedZero, 0.0}; }
};

struct PhaseShiftConfig {
  int elements = 0;                 // L, a perfect square
  std::vector<double> phases;       // radians in [0, 2pi)
  PhaseResolution resolution;

  // sqrt(L) if L is a perfect square, otherwise throws DomainError.
  int side() const;
  void validate() const;
};

// Column index (l - 1) mod sqrt(L) of zero-based element l.
inline int steering_index(int element, int side) { return element % side; }

Complex direct_gain(double d, double alpha, const ChannelParams& p);

// cos(phi_BS,i) - cos(phi_i,k): difference of the incidence and departure
// cosines seen by the RIS.
double incidence_mismatch(Vec2 bs, Vec2 ris, Vec2 k);

// |h_BS,i^H Theta h_i,k| when every summand is aligned.
double cascade_bound(Vec2 bs, Vec2 ris, Vec2 k, int elements, const ChannelParams& p);

Complex cascaded_gain(Vec2 bs, Vec2 ris, Vec2 k, const PhaseShiftConfig& phases,
                      const ChannelParams& p);

// Received interference power at k (0 when none configured).
double interference_power(Vec2 k, const ChannelParams& p);

double snr(Vec2 bs, Vec2 ris, Vec2 k, const PhaseShiftConfig& phases, const ChannelParams& p);

// SNR of the BS -> k link without any reflecting surface.
double direct_snr(Vec2 bs, Vec2 k, const ChannelParams& p);

double capacity(double snr_value, const ChannelParams& p);

// Aligns every cascade summand, then rotates all phases by a common offset
// so the cascade adds in phase with the direct BS -> k term.
PhaseShiftConfig optimal_phase_shift(Vec2 bs, Vec2 ris, Vec2 k, int elements,
                                     const ChannelParams& p);

// Nearest multiple m * xi * pi to theta; ties resolve to the smaller m.
double quantize_phase(double theta, double xi);

double wrap_phase(double theta);

// Realizes `ideal` under `resolution`: quantized per element, all zeros for
// FixedZero, unchanged for Continuous.
PhaseShiftConfig realize(const PhaseShiftConfig& ideal, PhaseResolution resolution);

}  // namespace uam::ris
