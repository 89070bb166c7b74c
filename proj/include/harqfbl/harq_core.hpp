#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "harqfbl/channel_fbl.hpp"
#include "harqfbl/outage.hpp"

namespace harqfbl {

inline constexpr std::int64_t kDefaultMinSubcodewordLength = 100;

/// Incremental-redundancy HARQ configuration: K nats spread over a parent codeword whose
/// sub-codewords l_1..l_M are sent in successive rounds, with D channel uses of feedback
/// delay after every round but the last.
class HarqScheme {
 public:
  HarqScheme(double nats, std::vector<std::int64_t> lengths, double feedback_delay = 0.0,
             std::int64_t min_subcodeword_length = kDefaultMinSubcodewordLength);

  /// Scheme whose delay is given relative to the parent length, D = df * l_(M).
  static HarqScheme with_relative_delay(double nats, std::vector<std::int64_t> lengths, double df,
                                        std::int64_t min_subcodeword_length = kDefaultMinSubcodewordLength);

  int max_rounds() const { return static_cast<int>(lengths_.size()); }
  double nats() const { return nats_; }
  std::span<const std::int64_t> lengths() const { return lengths_; }
  double feedback_delay() const { return feedback_delay_; }

  /// l_m for m in 1..M.
  std::int64_t length(int m) const;
  /// l_(m) = l_1 + ... + l_m; l_(0) = 0.
  std::int64_t cumulative_length(int m) const;
  std::int64_t parent_length() const { return cumulative_length(max_rounds()); }
  /// R_(m) = K / l_(m); R_(0) = +inf.
  double rate(int m) const;
  /// D^f = D / l_(M).
  double relative_delay() const;

  RoundGeometry geometry(int m, const ChannelSpec& spec) const;

 private:
  double nats_;
  std::vector<std::int64_t> lengths_;
  std::vector<std::int64_t> cumulative_;
  double feedback_delay_;
};

/// Omega_0..Omega_M, with Omega_0 = 1 stored explicitly.
class OutageVector {
 public:
  /// `omegas` holds Omega_1..Omega_M.
  OutageVector(std::vector<double> omegas, OutageMethod method);

  int max_rounds() const { return static_cast<int>(values_.size()) - 1; }
  OutageMethod method() const { return method_; }
  /// Omega_m for m in 0..M.
  double operator[](int m) const { return values_.at(static_cast<std::size_t>(m)); }
  double outage() const { return values_.back(); }
  std::span<const double> with_round_zero() const { return values_; }

 private:
  std::vector<double> values_;
  OutageMethod method_;
};

/// Omega_1..Omega_M of the scheme with one estimator. For the oracle, an inversion between
/// consecutive rounds that is smaller than their combined error estimates is flattened;
/// anything larger propagates as an InvalidArgument from the consumer.
OutageVector compute_outages(const HarqScheme& scheme, const ChannelSpec& spec, OutageMethod method,
                             const OracleOptions& oracle = {});

struct ThroughputReport {
  double eta;
  double outage;
  double expected_uses;
  double expected_nats;
  OutageVector omegas;
  /// tau_(1)..tau_(M).
  std::vector<double> per_round_uses;
};

/// tau_(m): channel uses consumed when the packet stops after round m (1-based).
double stop_time(const HarqScheme& scheme, int m);

/// T = sum_m l_m Omega_{m-1} + D sum_{m<M} Omega_{m-1}.
double expected_uses(const HarqScheme& scheme, const OutageVector& omegas);

/// Renewal-reward throughput K (1 - Omega_M) / T.
ThroughputReport throughput(const HarqScheme& scheme, const OutageVector& omegas);

/// Same quantity written through the equivalent rates:
/// (1 - Omega_M) / (sum_m (1/R_(m) - 1/R_(m-1)) Omega_{m-1} + D^f/R_(M) sum_{m<M} Omega_{m-1}).
double throughput_rate_form(const HarqScheme& scheme, const OutageVector& omegas);

/// Single-shot transmission of the whole parent codeword: (K / l_(M)) (1 - Omega_M).
double open_loop_throughput(std::int64_t parent_length, double nats, double omega_m);

}  // namespace harqfbl
