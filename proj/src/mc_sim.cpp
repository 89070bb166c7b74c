#include "harqfbl/mc_sim.hpp"

#include <cmath>
#include <thread>

#include "harqfbl/errors.hpp"

namespace harqfbl {

namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Counts {
  std::vector<std::uint64_t> decoded_at;
  std::uint64_t outages = 0;
};

Counts run_range(const SimConfig& config, const std::vector<CodeBlock>& blocks, std::uint64_t begin,
                 std::uint64_t end) {
  Counts counts{std::vector<std::uint64_t>(blocks.size(), 0), 0};
  for (std::uint64_t packet = begin; packet < end; ++packet) {
    const double gain = -std::log1p(-packet_uniform(config.seed, packet, 0));
    const double u = packet_uniform(config.seed, packet, 1);
    bool decoded = false;
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      if (u >= conditional_error_prob(blocks[m], config.spec, gain)) {
        ++counts.decoded_at[m];
        decoded = true;
        break;
      }
    }
    if (!decoded) ++counts.outages;
  }
  return counts;
}

}  // namespace

double packet_uniform(std::uint64_t seed, std::uint64_t packet, std::uint64_t stream) {
  const std::uint64_t key = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::uint64_t per_packet = mix64(key + mix64(packet + 0x632be59bd9b4e019ULL));
  const std::uint64_t bits = mix64(per_packet + (stream + 1) * 0xd1b54a32d192ed03ULL);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

SimStats simulate(const SimConfig& config) {
  if (config.packets < 1) throw InvalidArgument("simulate: packets must be >= 1");
  const auto& scheme = config.scheme;
  const int M = scheme.max_rounds();

  std::vector<CodeBlock> blocks;
  for (int m = 1; m <= M; ++m) blocks.emplace_back(scheme.cumulative_length(m), scheme.nats());

  const unsigned workers = std::max(1u, config.workers);
  std::vector<Counts> partial(workers);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = config.packets / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = w + 1 == workers ? config.packets : begin + chunk;
      pool.emplace_back([&, w, begin, end] { partial[w] = run_range(config, blocks, begin, end); });
    }
  }

  SimStats stats;
  stats.decoded_at.assign(static_cast<std::size_t>(M), 0);
  for (const auto& c : partial) {
    for (int m = 0; m < M; ++m) stats.decoded_at[m] += c.decoded_at[m];
    stats.outages += c.outages;
  }
  stats.packets = config.packets;
  stats.seed = config.seed;

  const double n = static_cast<double>(config.packets);
  std::uint64_t undecoded = config.packets;
  for (int m = 0; m < M; ++m) {
    undecoded -= stats.decoded_at[m];
    const double p = static_cast<double>(undecoded) / n;
    stats.omegas.push_back(p);
    stats.omega_std_errors.push_back(std::sqrt(p * (1.0 - p) / n));
  }

  // Per-packet reward X and cost Y take one value per outcome class; the ratio estimator's
  // variance follows from the class counts alone.
  std::vector<std::pair<double, double>> outcome;  // (count, uses)
  for (int m = 1; m <= M; ++m) {
    outcome.emplace_back(static_cast<double>(stats.decoded_at[m - 1]), stop_time(scheme, m));
  }
  const double outage_uses = stop_time(scheme, M);

  double total_uses = static_cast<double>(stats.outages) * outage_uses;
  double decoded = 0.0;
  for (const auto& [count, uses] : outcome) {
    total_uses += count * uses;
    decoded += count;
  }
  stats.total_uses = total_uses;
  stats.delivered_nats = decoded * scheme.nats();
  stats.throughput = stats.delivered_nats / total_uses;
  stats.mean_uses = total_uses / n;

  const double eta = stats.throughput;
  double residual_sq = static_cast<double>(stats.outages) * std::pow(0.0 - eta * outage_uses, 2);
  double uses_sq = static_cast<double>(stats.outages) * std::pow(outage_uses - stats.mean_uses, 2);
  for (const auto& [count, uses] : outcome) {
    residual_sq += count * std::pow(scheme.nats() - eta * uses, 2);
    uses_sq += count * std::pow(uses - stats.mean_uses, 2);
  }
  const double denom = n > 1.0 ? n - 1.0 : 1.0;
  stats.throughput_std_error = std::sqrt(residual_sq / denom / n) / stats.mean_uses;
  stats.mean_uses_std_error = std::sqrt(uses_sq / denom / n);
  return stats;
}

}  // namespace harqfbl
