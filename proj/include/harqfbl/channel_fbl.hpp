#pragma once

#include <cstdint>

namespace harqfbl {

enum class Fading { RayleighUnitMean };

/// Transmit SNR and fading law. With unit-mean Rayleigh fading the power gain g = |h|^2 has
/// pdf exp(-x) on x >= 0.
class ChannelSpec {
 public:
  explicit ChannelSpec(double snr, Fading fading = Fading::RayleighUnitMean);

  static ChannelSpec from_db(double snr_db);

  double snr() const { return snr_; }
  Fading fading() const { return fading_; }

  /// Power-gain pdf f_g(x).
  double gain_pdf(double x) const;

 private:
  double snr_;
  Fading fading_;
};

/// Linear SNR from decibels, P = 10^(dB/10).
double db_to_linear(double snr_db);

/// A length-L code carrying K nats, i.e. rate R = K / L nats per channel use.
class CodeBlock {
 public:
  CodeBlock(std::int64_t length, double nats);

  static CodeBlock from_rate(std::int64_t length, double rate);

  std::int64_t length() const { return length_; }
  double nats() const { return nats_; }
  double rate() const { return nats_ / static_cast<double>(length_); }

 private:
  std::int64_t length_;
  double nats_;
};

/// Normal-approximation argument W = sqrt(L) (ln(1+gP) - R) / sqrt(1 - (1+gP)^-2).
///
/// At gain 0 the value is -inf for R > 0 and +inf for R = 0 (a zero-rate code never fails).
/// Throws InvalidArgument for negative or non-finite gain.
double dispersion_argument(const CodeBlock& block, const ChannelSpec& spec, double gain);

/// Finite-blocklength error probability Q(W) of the block at a fixed fading gain.
double conditional_error_prob(const CodeBlock& block, const ChannelSpec& spec, double gain);

}  // namespace harqfbl
