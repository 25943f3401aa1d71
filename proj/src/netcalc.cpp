#include "uam/netcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uam/errors.hpp"

namespace uam::nc {

namespace {

constexpr double kEps = 1e-9;

std::size_t steps_for(double t, double delta) {
  return static_cast<std::size_t>(std::ceil(t / delta - kEps));
}

}  // namespace

double LatencyRateCurve::operator()(double t) const {
  return t > latency ? rate * (t - latency) : 0.0;
}

void LatencyRateCurve::validate() const {
  if (!(rate > 0.0)) throw DomainError("latency-rate curve: rate must be > 0");
  if (!(latency >= 0.0)) throw DomainError("latency-rate curve: latency must be >= 0");
}

bool Ccdf::same_grid(const Ccdf& o) const {
  return values.size() == o.values.size() && std::abs(delta - o.delta) <= 1e-12 * std::max(1.0, delta);
}

const char* to_string(StackKind k) {
  switch (k) {
    case StackKind::Control: return "control";
    case StackKind::Direct: return "direct";
    case StackKind::Ris: return "ris";
  }
  return "?";
}

StackKind stack_kind_from_string(const std::string& s) {
  if (s == "control") return StackKind::Control;
  if (s == "direct") return StackKind::Direct;
  if (s == "ris") return StackKind::Ris;
  throw ConfigError("unknown channel stack '" + s + "'");
}

void ProtocolParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("protocol: ") + what);
  };
  require(r_omni > 0 && r_direct > 0 && r_ris1 > 0 && r_ris2 > 0, "rates must be > 0");
  require(l_rts >= 0 && l_cts >= 0 && l_rtr >= 0 && l_data >= 0, "volumes must be >= 0");
  require(zeta >= 0, "zeta must be >= 0");
  require(p_loss >= 0 && p_loss < 1, "p_loss must be in [0, 1)");
  require(ttl_rts > 0 && ttl_cts > 0 && ttl_rtr > 0, "TTLs must be > 0");
  require(lambda >= 0, "lambda must be >= 0");
  require(arrival_window > 0, "arrival window must be > 0");
  require(grid_step > 0, "grid step must be > 0");
}

LatencyRateCurve min_plus_convolve(const LatencyRateCurve& a, const LatencyRateCurve& b) {
  return {std::min(a.rate, b.rate), a.latency + b.latency};
}

Ccdf min_plus_convolve(const Ccdf& a, const Ccdf& b) {
  if (!a.same_grid(b)) throw DomainError("min_plus_convolve: grid mismatch");
  Ccdf out{a.delta, std::vector<double>(a.size())};
  const auto& av = a.values;
  const auto& bv = b.values;
  for (std::size_t x = 0; x < av.size(); ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y <= x; ++y) best = std::min(best, av[y] + bv[x - y]);
    out.values[x] = best;
  }
  return out;
}

Ccdf tabulate(const LatencyRateCurve& c, double delta, std::size_t n) {
  Ccdf out{delta, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.values[i] = c(delta * static_cast<double>(i));
  return out;
}

LatencyRateCurve service_curve_stack(StackKind kind, const ProtocolParams& p) {
  switch (kind) {
    case StackKind::Control:
      return {p.r_omni, p.zeta * p.l_data / p.r_omni};
    case StackKind::Direct:
      return {std::min(p.r_omni, p.r_direct),
              p.zeta * (p.l_rts / p.r_omni + p.l_cts / p.r_omni + p.l_data / p.r_direct)};
    case StackKind::Ris:
      return {std::min({p.r_omni, p.r_ris1, p.r_ris2}),
              p.zeta * (p.l_rts / p.r_omni + p.l_cts / p.r_omni + p.l_rtr / p.r_omni +
                        p.l_data / p.r_ris1 + p.l_data / p.r_ris2)};
  }
  throw DomainError("service_curve_stack: bad kind");
}

double data_hop_rate(StackKind kind, const ProtocolParams& p) {
  switch (kind) {
    case StackKind::Control: return p.r_omni;
    case StackKind::Direct: return p.r_direct;
    case StackKind::Ris: return std::min(p.r_ris1, p.r_ris2);
  }
  throw DomainError("data_hop_rate: bad kind");
}

double poisson_upper_tail(double mean, long long k0) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson tail: mean must be finite and >= 0");
  if (k0 <= 0) return 1.0;
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  auto log_pmf = [&](long long k) {
    return static_cast<double>(k) * log_mean - mean - std::lgamma(static_cast<double>(k) + 1.0);
  };
  if (static_cast<double>(k0) > mean) {
    // Terms decrease from k0 on; stop once the geometric bound on the rest is negligible.
    double term = std::exp(log_pmf(k0));
    double sum = 0.0;
    for (long long k = k0; term > 0.0; ++k) {
      sum += term;
      const double ratio = mean / static_cast<double>(k + 1);
      term *= ratio;
      if (term * ratio / (1.0 - ratio) < 1e-17) {
        sum += term;
        break;
      }
    }
    return std::clamp(sum, 0.0, 1.0);
  }
  double head = 0.0;
  for (long long k = 0; k < k0; ++k) head += std::exp(log_pmf(k));
  return std::clamp(1.0 - head, 0.0, 1.0);
}

double poisson_delay_tail(double lambda_t, double threshold) {
  if (!(lambda_t >= 0.0) || !(threshold >= 0.0)) throw DomainError("poisson_delay_tail: negative input");
  const double start = std::ceil(threshold + lambda_t - kEps);
  return poisson_upper_tail(lambda_t, static_cast<long long>(start));
}

Ccdf retransmission_ccdf(double p_loss, double ttl, double delta, std::size_t n) {
  if (!(p_loss >= 0.0 && p_loss < 1.0)) throw DomainError("retransmission_ccdf: p_loss must be in [0, 1)");
  if (!(ttl > 0.0)) throw DomainError("retransmission_ccdf: ttl must be > 0");
  Ccdf out{delta, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = delta * static_cast<double>(i);
    const double k = std::ceil(t / ttl + 1.0 - kEps);
    out.values[i] = p_loss == 0.0 ? 0.0 : std::pow(p_loss, k);
  }
  return out;
}

Ccdf success_tail(StackKind kind, const ProtocolParams& p, double delta, std::size_t n) {
  const LatencyRateCurve stack = service_curve_stack(kind, p);
  const LatencyRateCurve served{data_hop_rate(kind, p), stack.latency};
  Ccdf out{delta, std::vector<double>(n)};
  double running = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ts = delta * static_cast<double>(i);
    double v = 1.0;
    if (ts > stack.latency + kEps) {
      const double mean = p.lambda * ts;
      v = poisson_delay_tail(mean, served(ts));
    }
    running = std::min(running, v);
    out.values[i] = running;
  }
  return out;
}

ProtocolParams at_load(const ProtocolParams& p, double load) {
  if (!(load >= 0.0)) throw DomainError("load must be >= 0");
  ProtocolParams q = p;
  q.l_data = load;
  q.lambda = load / p.arrival_window;
  return q;
}

Ccdf failure_ccdf(StackKind kind, double load, double t_max, const ProtocolParams& base) {
  base.validate();
  if (!(t_max >= 0.0)) throw DomainError("failure_ccdf: t must be >= 0");
  if (t_max > 0.0 && base.grid_step > t_max / 10.0) throw ConfigError("grid step too coarse for the requested time");
  const ProtocolParams p = at_load(base, load);
  const std::size_t steps = t_max > 0.0 ? steps_for(t_max, p.grid_step) : 0;
  const double delta = steps > 0 ? t_max / static_cast<double>(steps) : p.grid_step;
  const std::size_t n = steps + 1;

  Ccdf acc = success_tail(kind, p, delta, n);
  auto add = [&](double ttl) { acc = min_plus_convolve(acc, retransmission_ccdf(p.p_loss, ttl, delta, n)); };
  if (kind == StackKind::Direct || kind == StackKind::Ris) {
    add(p.ttl_rts);
    add(p.ttl_cts);
  }
  if (kind == StackKind::Ris) add(p.ttl_rtr);
  for (double& v : acc.values) v = std::clamp(v, 0.0, 1.0);
  return acc;
}

double failure_probability(StackKind kind, double load, double t, const ProtocolParams& p) {
  return failure_ccdf(kind, load, t, p).values.back();
}

double delay_bound(StackKind kind, double load, double epsilon, double t_max, const ProtocolParams& p) {
  const Ccdf c = failure_ccdf(kind, load, t_max, p);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.values[i] <= epsilon) return c.delta * static_cast<double>(i);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace uam::nc
