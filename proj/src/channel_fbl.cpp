#include "harqfbl/channel_fbl.hpp"

#include <cmath>
#include <limits>

#include "harqfbl/errors.hpp"
#include "harqfbl/special_functions.hpp"

namespace harqfbl {

ChannelSpec::ChannelSpec(double snr, Fading fading) : snr_(snr), fading_(fading) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw InvalidArgument("ChannelSpec: snr must be positive and finite");
  }
}

ChannelSpec ChannelSpec::from_db(double snr_db) { return ChannelSpec(db_to_linear(snr_db)); }

double ChannelSpec::gain_pdf(double x) const { return x < 0.0 ? 0.0 : std::exp(-x); }

double db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

CodeBlock::CodeBlock(std::int64_t length, double nats) : length_(length), nats_(nats) {
  if (length < 1) throw InvalidArgument("CodeBlock: length must be >= 1");
  if (!(nats >= 0.0) || !std::isfinite(nats)) {
    throw InvalidArgument("CodeBlock: nats must be finite and >= 0");
  }
}

CodeBlock CodeBlock::from_rate(std::int64_t length, double rate) {
  return CodeBlock(length, rate * static_cast<double>(length));
}

double dispersion_argument(const CodeBlock& block, const ChannelSpec& spec, double gain) {
  if (!std::isfinite(gain) || gain < 0.0) {
    throw InvalidArgument("dispersion_argument: gain must be finite and >= 0");
  }
  const double rate = block.rate();
  const double y = gain * spec.snr();
  if (y == 0.0) {
    return rate > 0.0 ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
  }
  // 1 - (1+y)^-2 = y (2 + y) / (1 + y)^2, without the cancellation near y = 0.
  const double dispersion_root = std::sqrt(y) * std::sqrt(2.0 + y) / (1.0 + y);
  const double root_length = std::sqrt(static_cast<double>(block.length()));
  return root_length * (std::log1p(y) - rate) / dispersion_root;
}

double conditional_error_prob(const CodeBlock& block, const ChannelSpec& spec, double gain) {
  return q_function(dispersion_argument(block, spec, gain));
}

}  // namespace harqfbl
