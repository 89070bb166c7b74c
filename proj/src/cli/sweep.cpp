#include "harqfbl/sweep.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "harqfbl/errors.hpp"

namespace harqfbl {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text) {
  text = trim(text);
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  }
}

}  // namespace

std::vector<double> parse_snr_axis(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InvalidArgument("SNR axis is empty");
  std::vector<double> axis;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidArgument("SNR range must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0)) throw InvalidArgument("SNR step must be positive");
    if (stop < start) throw InvalidArgument("SNR range stop must be >= start");
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::int64_t i = 0; i < count; ++i) axis.push_back(start + static_cast<double>(i) * step);
  } else {
    for (auto part : split(text, ',')) axis.push_back(parse_double(part));
  }
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) throw InvalidArgument("SNR axis must be strictly increasing");
  }
  return axis;
}

std::vector<std::int64_t> parse_lengths(std::string_view text) {
  std::vector<std::int64_t> lengths;
  for (auto part : split(trim(text), ',')) {
    part = trim(part);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v < 1) {
      throw InvalidArgument("bad sub-codeword length '" + std::string(part) + "'");
    }
    lengths.push_back(v);
  }
  return lengths;
}

std::string join_lengths(const std::vector<std::int64_t>& lengths) {
  std::string out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(lengths[i]);
  }
  return out;
}

}  // namespace harqfbl
