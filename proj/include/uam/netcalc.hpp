#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace uam::nc {

// beta(t) = rate * (t - latency)^+
struct LatencyRateCurve {
  double rate = 0.0;
  double latency = 0.0;

  double operator()(double t) const;
  void validate() const;
};

// Tabulated complementary CDF on the uniform grid {0, delta, ..., (n-1) delta}.
struct Ccdf {
  double delta = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double t_max() const { return delta * static_cast<double>(values.size() - 1); }
  bool same_grid(const Ccdf& o) const;
};

enum class StackKind { Control, Direct, Ris };
const char* to_string(StackKind k);
StackKind stack_kind_from_string(const std::string& s);

struct ProtocolParams {
  double r_omni = 20.0;        // Mb/s
  double r_direct = 40.0;
  double r_ris1 = 100.0;
  double r_ris2 = 100.0;
  double l_rts = 3.0;          // Mb
  double l_cts = 3.0;
  double l_rtr = 3.0;
  double l_data = 10.0;
  double zeta = 1.2;
  double p_loss = 0.1;
  double ttl_rts = 0.03;       // s
  double ttl_cts = 0.03;
  double ttl_rtr = 0.03;
  double lambda = 0.0;         // mean arrivals per second
  double arrival_window = 0.06;  // s; load / window gives lambda in sweeps
  double grid_step = 0.005;    // s

  void validate() const;
};

LatencyRateCurve min_plus_convolve(const LatencyRateCurve& a, const LatencyRateCurve& b);
Ccdf min_plus_convolve(const Ccdf& a, const Ccdf& b);

Ccdf tabulate(const LatencyRateCurve& c, double delta, std::size_t n);

LatencyRateCurve service_curve_stack(StackKind kind, const ProtocolParams& p);

// Rate of the hop that carries the data itself.
double data_hop_rate(StackKind kind, const ProtocolParams& p);

// Upper Poisson tail P{N >= k0} for N ~ Poisson(mean).
double poisson_upper_tail(double mean, long long k0);

// P{N >= ceil(threshold + lambda_t)}, N ~ Poisson(lambda_t).
double poisson_delay_tail(double lambda_t, double threshold);

// F(t) = p_loss^ceil(t / ttl + 1) on n points of step delta.
Ccdf retransmission_ccdf(double p_loss, double ttl, double delta, std::size_t n);

// Success-path delay tail of one stack at the given load, running-minimum
// tightened so it is non-increasing.
Ccdf success_tail(StackKind kind, const ProtocolParams& p, double delta, std::size_t n);

// Full delay CCDF bound on [0, t_max].
Ccdf failure_ccdf(StackKind kind, double load, double t_max, const ProtocolParams& p);

// Bound on P{D > t}.
double failure_probability(StackKind kind, double load, double t, const ProtocolParams& p);

// Smallest grid time whose failure bound is <= epsilon, or +inf if none up to t_max.
double delay_bound(StackKind kind, double load, double epsilon, double t_max, const ProtocolParams& p);

// Protocol params with l_data and lambda set from an offered load.
ProtocolParams at_load(const ProtocolParams& p, double load);

}  // namespace uam::nc
