#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace harqfbl {

/// SNR axis in dB: a single value ("10"), a list ("0,5,10") or an inclusive
/// start:stop:step range ("0:20:0.5"). Must be non-empty and strictly increasing.
std::vector<double> parse_snr_axis(std::string_view text);

/// Comma-separated positive integers, e.g. "300,300".
std::vector<std::int64_t> parse_lengths(std::string_view text);

/// "300,300" style rendering used in CSV cells.
std::string join_lengths(const std::vector<std::int64_t>& lengths);

}  // namespace harqfbl
