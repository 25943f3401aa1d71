#include "uam/ris_channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uam/errors.hpp"

namespace uam::ris {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double checked_distance(Vec2 a, Vec2 b, const char* what) {
  const double d = distance(a, b);
  if (!(d > 0.0)) throw DomainError(std::string(what) + ": coincident positions");
  return d;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void ChannelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("channel: ") + what);
  };
  require(beta_ref > 0.0 && std::isfinite(beta_ref), "beta_ref must be > 0");
  require(p_bs > 0.0 && std::isfinite(p_bs), "P_BS must be > 0");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "noise power must be > 0");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), "bandwidth must be > 0");
  require(alpha_bs_k >= 1.0 && alpha_bs_i >= 1.0 && alpha_i_k >= 1.0, "path-loss exponents must be >= 1");
  if (interference) {
    require(interference->power > 0.0, "interference power must be > 0");
    require(!interference->alpha || *interference->alpha >= 1.0, "interference exponent must be >= 1");
  }
}

int PhaseShiftConfig::side() const {
  if (elements <= 0) throw DomainError("RIS element count must be positive");
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(elements))));
  if (s * s != elements) throw DomainError("RIS element count must be a perfect square");
  return s;
}

void PhaseShiftConfig::validate() const {
  side();
  if (static_cast<int>(phases.size()) != elements) throw DomainError("phase vector length != L");
  for (double th : phases) {
    if (!(th >= 0.0 && th < kTwoPi)) throw DomainError("phase outside [0, 2pi)");
    if (resolution.kind == PhaseResolution::Kind::Discrete) {
      const double m = th / (resolution.xi * kPi);
      if (std::abs(m - std::round(m)) > 1e-9) throw DomainError("phase off the discrete grid");
    }
  }
}

Complex direct_gain(double d, double alpha, const ChannelParams& p) {
  if (!(d > 0.0)) throw DomainError("direct_gain: distance must be > 0");
  return {std::sqrt(p.beta_ref / std::pow(d, alpha)), 0.0};
}

double incidence_mismatch(Vec2 bs, Vec2 ris, Vec2 k) {
  const double d1 = checked_distance(bs, ris, "incidence_mismatch");
  const double d2 = checked_distance(ris, k, "incidence_mismatch");
  return (ris.x - bs.x) / d1 - (k.x - ris.x) / d2;
}

double cascade_bound(Vec2 bs, Vec2 ris, Vec2 k, int elements, const ChannelParams& p) {
  const double d1 = checked_distance(bs, ris, "cascade_bound");
  const double d2 = checked_distance(ris, k, "cascade_bound");
  return elements * p.beta_ref / std::sqrt(std::pow(d1, p.alpha_bs_i) * std::pow(d2, p.alpha_i_k));
}

Complex cascaded_gain(Vec2 bs, Vec2 ris, Vec2 k, const PhaseShiftConfig& phases,
                      const ChannelParams& p) {
  const int side = phases.side();
  if (static_cast<int>(phases.phases.size()) != phases.elements) {
    throw DomainError("cascaded_gain: phase vector length != L");
  }
  checked_distance(bs, k, "cascaded_gain");
  const double amp = cascade_bound(bs, ris, k, 1, p);
  const double mismatch = incidence_mismatch(bs, ris, k);
  Complex sum{0.0, 0.0};
  for (int l = 0; l < phases.elements; ++l) {
    const double steer = kPi * steering_index(l, side) * mismatch;
    sum += std::polar(1.0, steer + phases.phases[l]);
  }
  return amp * sum;
}

double interference_power(Vec2 k, const ChannelParams& p) {
  if (!p.interference) return 0.0;
  const auto& src = *p.interference;
  const double d = checked_distance(src.pos, k, "interference_power");
  const double alpha = src.alpha.value_or(p.alpha_i_k);
  return src.power * p.beta_ref / std::pow(d, alpha);
}

double snr(Vec2 bs, Vec2 ris, Vec2 k, const PhaseShiftConfig& phases, const ChannelParams& p) {
  const Complex total = direct_gain(distance(bs, k), p.alpha_bs_k, p) + cascaded_gain(bs, ris, k, phases, p);
  return std::norm(total) * p.p_bs / (p.sigma2 + interference_power(k, p));
}

double direct_snr(Vec2 bs, Vec2 k, const ChannelParams& p) {
  return std::norm(direct_gain(distance(bs, k), p.alpha_bs_k, p)) * p.p_bs /
         (p.sigma2 + interference_power(k, p));
}

double capacity(double snr_value, const ChannelParams& p) {
  if (!(snr_value >= 0.0)) throw DomainError("capacity: snr must be >= 0");
  return p.bandwidth * std::log2(1.0 + snr_value);
}

double wrap_phase(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

PhaseShiftConfig optimal_phase_shift(Vec2 bs, Vec2 ris, Vec2 k, int elements,
                                     const ChannelParams& p) {
  PhaseShiftConfig cfg;
  cfg.elements = elements;
  const int side = cfg.side();
  const double mismatch = incidence_mismatch(bs, ris, k);
  // With every summand aligned the cascade phase equals the common offset;
  // the direct LoS term is real, so the offset that co-phases them is its
  // argument.
  const double offset = std::arg(direct_gain(checked_distance(bs, k, "optimal_phase_shift"), p.alpha_bs_k, p));
  cfg.phases.resize(elements);
  for (int l = 0; l < elements; ++l) {
    cfg.phases[l] = wrap_phase(-kPi * steering_index(l, side) * mismatch + offset);
  }
  return cfg;
}

double quantize_phase(double theta, double xi) {
  if (!(xi > 0.0)) throw DomainError("quantize_phase: xi must be > 0");
  const double step = xi * kPi;
  const double m = std::ceil(theta / step - 0.5);
  return m * step;
}

PhaseShiftConfig realize(const PhaseShiftConfig& ideal, PhaseResolution resolution) {
  PhaseShiftConfig out = ideal;
  out.resolution = resolution;
  switch (resolution.kind) {
    case PhaseResolution::Kind::Continuous:
      break;
    case PhaseResolution::Kind::FixedZero:
      std::fill(out.phases.begin(), out.phases.end(), 0.0);
      break;
    case PhaseResolution::Kind::Discrete:
      for (double& th : out.phases) {
        th = wrap_phase(quantize_phase(th, resolution.xi));
        // snap values that land a rounding error below 2pi back to 0
        if (kTwoPi - th < 1e-12) th = 0.0;
      }
      break;
  }
  return out;
}

}  // namespace uam::ris
