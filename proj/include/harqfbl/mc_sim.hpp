#pragma once

#include <cstdint>
#include <vector>

#include "harqfbl/channel_fbl.hpp"
#include "harqfbl/harq_core.hpp"

namespace harqfbl {

struct SimConfig {
  HarqScheme scheme;
  ChannelSpec spec;
  std::uint64_t packets = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct SimStats {
  /// decoded_at[m-1]: packets first decoded after round m.
  std::vector<std::uint64_t> decoded_at;
  std::uint64_t outages = 0;
  std::uint64_t packets = 0;
  std::uint64_t seed = 0;

  /// Empirical Omega_1..Omega_M and their standard errors.
  std::vector<double> omegas;
  std::vector<double> omega_std_errors;

  double total_uses = 0.0;
  double delivered_nats = 0.0;
  double throughput = 0.0;
  /// Delta-method standard error of the ratio estimator delivered / uses.
  double throughput_std_error = 0.0;
  double mean_uses = 0.0;
  double mean_uses_std_error = 0.0;

  /// 95% confidence half-width for a standard error.
  static double half_width(double std_error) { return 1.959963984540054 * std_error; }
};

/// Counter-based uniform in (0, 1) for stream `stream` of packet `packet`; independent of
/// evaluation order.
double packet_uniform(std::uint64_t seed, std::uint64_t packet, std::uint64_t stream);

/// Monte Carlo over quasi-static Rayleigh fading. Each packet draws one power gain
/// g ~ Exp(1) and one uniform u; it is first decoded in the smallest round m with
/// u >= eps_m(g) (the conditional error probability at l_(m)), otherwise it is an outage.
/// Since eps_m(g) is non-increasing in m, "not decoded by round m" has probability exactly
/// E[eps_m(g)] = Omega_m and the events are nested packet by packet.
/// Output depends only on (config, seed), never on the worker count.
SimStats simulate(const SimConfig& config);

}  // namespace harqfbl
