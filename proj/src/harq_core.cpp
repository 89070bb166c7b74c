#include "harqfbl/harq_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "harqfbl/errors.hpp"

namespace harqfbl {

namespace {

constexpr double kMonotoneSlack = 1e-12;

void check_compatible(const HarqScheme& scheme, const OutageVector& omegas) {
  if (omegas.max_rounds() != scheme.max_rounds()) {
    throw InvalidArgument("outage vector has " + std::to_string(omegas.max_rounds()) +
                          " rounds, scheme has " + std::to_string(scheme.max_rounds()));
  }
}

}  // namespace

HarqScheme::HarqScheme(double nats, std::vector<std::int64_t> lengths, double feedback_delay,
                       std::int64_t min_subcodeword_length)
    : nats_(nats), lengths_(std::move(lengths)), feedback_delay_(feedback_delay) {
  if (lengths_.empty()) throw InvalidArgument("HarqScheme: at least one round is required");
  if (!(nats_ > 0.0) || !std::isfinite(nats_)) throw InvalidArgument("HarqScheme: nats must be positive");
  if (!(feedback_delay_ >= 0.0) || !std::isfinite(feedback_delay_)) {
    throw InvalidArgument("HarqScheme: feedback delay must be finite and >= 0");
  }
  cumulative_.reserve(lengths_.size() + 1);
  cumulative_.push_back(0);
  for (auto l : lengths_) {
    if (l < min_subcodeword_length || l < 1) {
      throw InvalidArgument("HarqScheme: sub-codeword length " + std::to_string(l) + " below minimum " +
                            std::to_string(min_subcodeword_length));
    }
    cumulative_.push_back(cumulative_.back() + l);
  }
}

HarqScheme HarqScheme::with_relative_delay(double nats, std::vector<std::int64_t> lengths, double df,
                                           std::int64_t min_subcodeword_length) {
  std::int64_t total = 0;
  for (auto l : lengths) total += l;
  return HarqScheme(nats, std::move(lengths), df * static_cast<double>(total), min_subcodeword_length);
}

std::int64_t HarqScheme::length(int m) const {
  if (m < 1 || m > max_rounds()) throw InvalidArgument("HarqScheme: round index out of range");
  return lengths_[static_cast<std::size_t>(m - 1)];
}

std::int64_t HarqScheme::cumulative_length(int m) const {
  if (m < 0 || m > max_rounds()) throw InvalidArgument("HarqScheme: round index out of range");
  return cumulative_[static_cast<std::size_t>(m)];
}

double HarqScheme::rate(int m) const {
  if (m == 0) return std::numeric_limits<double>::infinity();
  return nats_ / static_cast<double>(cumulative_length(m));
}

double HarqScheme::relative_delay() const {
  return feedback_delay_ / static_cast<double>(parent_length());
}

RoundGeometry HarqScheme::geometry(int m, const ChannelSpec& spec) const {
  return RoundGeometry(cumulative_length(m), nats_, spec);
}

OutageVector::OutageVector(std::vector<double> omegas, OutageMethod method) : method_(method) {
  if (omegas.empty()) throw InvalidArgument("OutageVector: at least one round is required");
  values_.reserve(omegas.size() + 1);
  values_.push_back(1.0);
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw InvalidArgument("OutageVector: probability " + std::to_string(w) + " outside [0, 1]");
    }
    values_.push_back(w);
  }
}

OutageVector compute_outages(const HarqScheme& scheme, const ChannelSpec& spec, OutageMethod method,
                             const OracleOptions& oracle) {
  std::vector<double> omegas;
  double previous_error = 0.0;
  for (int m = 1; m <= scheme.max_rounds(); ++m) {
    const OutageEstimate est = estimate_omega(scheme.geometry(m, spec), spec, method, oracle);
    double value = est.value;
    const double error = est.diagnostics.error_estimate.value_or(0.0);
    if (!omegas.empty() && value > omegas.back() && value - omegas.back() <= error + previous_error) {
      value = omegas.back();
    }
    omegas.push_back(value);
    previous_error = error;
  }
  return OutageVector(std::move(omegas), method);
}

double stop_time(const HarqScheme& scheme, int m) {
  const int M = scheme.max_rounds();
  if (m < 1 || m > M) throw InvalidArgument("stop_time: round index out of range");
  const double feedback_rounds = m == M ? M - 1 : m;
  return static_cast<double>(scheme.cumulative_length(m)) + feedback_rounds * scheme.feedback_delay();
}

double expected_uses(const HarqScheme& scheme, const OutageVector& omegas) {
  check_compatible(scheme, omegas);
  const int M = scheme.max_rounds();
  for (int m = 1; m <= M; ++m) {
    if (omegas[m] > omegas[m - 1] + kMonotoneSlack) {
      throw InvalidArgument("expected_uses: outage probabilities must be non-increasing (round " +
                            std::to_string(m) + ")");
    }
  }
  double transmitted = 0.0;
  for (int m = 1; m <= M; ++m) transmitted += static_cast<double>(scheme.length(m)) * omegas[m - 1];
  double feedback = 0.0;
  for (int m = 1; m <= M - 1; ++m) feedback += omegas[m - 1];
  return transmitted + scheme.feedback_delay() * feedback;
}

ThroughputReport throughput(const HarqScheme& scheme, const OutageVector& omegas) {
  const double uses = expected_uses(scheme, omegas);
  const double nats = scheme.nats() * (1.0 - omegas.outage());
  std::vector<double> taus;
  for (int m = 1; m <= scheme.max_rounds(); ++m) taus.push_back(stop_time(scheme, m));
  return ThroughputReport{nats / uses, omegas.outage(), uses, nats, omegas, std::move(taus)};
}

double throughput_rate_form(const HarqScheme& scheme, const OutageVector& omegas) {
  check_compatible(scheme, omegas);
  const int M = scheme.max_rounds();
  double denominator = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double inv_prev = m == 1 ? 0.0 : 1.0 / scheme.rate(m - 1);
    denominator += (1.0 / scheme.rate(m) - inv_prev) * omegas[m - 1];
  }
  double feedback = 0.0;
  for (int m = 1; m <= M - 1; ++m) feedback += omegas[m - 1];
  denominator += scheme.relative_delay() / scheme.rate(M) * feedback;
  return (1.0 - omegas.outage()) / denominator;
}

double open_loop_throughput(std::int64_t parent_length, double nats, double omega_m) {
  if (parent_length < 1) throw InvalidArgument("open_loop_throughput: length must be >= 1");
  if (!(omega_m >= 0.0 && omega_m <= 1.0)) {
    throw InvalidArgument("open_loop_throughput: omega must lie in [0, 1]");
  }
  return nats * (1.0 - omega_m) / static_cast<double>(parent_length);
}

}  // namespace harqfbl
