#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "harqfbl/channel_fbl.hpp"
#include "harqfbl/harq_core.hpp"
#include "harqfbl/outage.hpp"

namespace harqfbl {

enum class SearchMode { VariableLength, FixedLength, OpenLoop };

std::string_view to_string(SearchMode mode);
/// Accepts "variable", "fixed", "openloop".
SearchMode parse_search_mode(std::string_view name);

struct SearchBounds {
  /// Nats range; k_min == k_max pins K.
  double k_min = 50.0;
  double k_max = 4000.0;
  /// Parent length range; defaults to [100 M, 10^4].
  std::optional<std::int64_t> length_min;
  std::int64_t length_max = 10000;
  std::int64_t min_subcodeword_length = kDefaultMinSubcodewordLength;
  /// FixedLength / OpenLoop only: parent length is restricted to multiples of this.
  std::int64_t length_step = 1;
  /// Cap on coarse-grid evaluations; per-axis resolution is derived from it.
  int grid_budget = 20000;
};

struct OptimizationProblem {
  ChannelSpec spec;
  int max_rounds = 2;
  SearchMode mode = SearchMode::VariableLength;
  double relative_delay = 0.0;
  SearchBounds bounds;
  /// Estimator for the grid and first descent. The incumbent is always refined and
  /// reported with the oracle.
  OutageMethod search_estimator = OutageMethod::Linearized;
  OracleOptions oracle{1e-9};
  unsigned workers = 1;

  explicit OptimizationProblem(ChannelSpec s) : spec(s) {}
};

struct OptimizationResult {
  HarqScheme scheme;
  ThroughputReport report;
  int evaluations;
};

/// Throughput maximization over K and the sub-codeword lengths: a log-spaced coarse grid,
/// then integer pattern search (steps halve down to 1) with the search estimator, then the
/// same descent with the oracle. VariableLength additionally starts a descent from the
/// FixedLength optimum, so it never reports less than FixedLength on identical bounds.
/// Ties (within 1e-12 relative) go to the smaller l_(M), then the smaller K.
/// Throws EmptyFeasibleSet when the bounds admit no scheme.
OptimizationResult optimize_throughput(const OptimizationProblem& problem);

struct GainReport {
  /// 100 (eta - eta_open_loop) / eta_open_loop.
  double delta_percent;
  OptimizationResult harq;
  OptimizationResult open_loop;
};

struct GainOptions {
  SearchBounds bounds;
  OracleOptions oracle{1e-9};
  unsigned workers = 1;
};

/// Throughput gain of optimized variable-length HARQ over the open-loop scheme with its own
/// optimized parent length, both at fixed K.
GainReport throughput_gain(const ChannelSpec& spec, int max_rounds, double relative_delay, double nats,
                           const GainOptions& options = {});

/// r = (1 - (1/M) sum_{m=1..M} Omega_{m-1}) / sum_{m=1..M-1} Omega_{m-1}. Requires M >= 2.
double relative_delay_threshold(const OutageVector& omegas);

/// Same expression with Omega_1..Omega_{M-1} replaced by `omegas` (M = omegas.size() + 1).
double relative_delay_threshold_from(const std::vector<double>& leading_omegas);

struct DelayThresholdReport {
  double r;
  double r_lower;
  double r_upper;
  OutageVector omegas;
  /// Upper and lower bounds u_m, v_m for m = 1..M-1.
  std::vector<double> upper_omegas;
  std::vector<double> lower_omegas;
  HarqScheme scheme;
  OptimizationResult open_loop;
};

struct DelayThresholdOptions {
  OutageMethod estimator = OutageMethod::Oracle;
  SearchBounds bounds;
  OracleOptions oracle{1e-10};
  unsigned workers = 1;
};

/// Largest relative feedback delay for which fixed-length HARQ at the open-loop-optimal
/// parent length provably does not lose to open loop, with its bracket from the outage
/// bounds. The open-loop search is restricted to parent lengths divisible by M.
DelayThresholdReport delay_threshold(const ChannelSpec& spec, int max_rounds, double nats,
                                     const DelayThresholdOptions& options = {});

}  // namespace harqfbl
