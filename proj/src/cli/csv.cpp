#include "harqfbl/csv.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace harqfbl::csv {

std::string format_number(double value) {
  if (!std::isfinite(value)) return {};
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(12);
  s << value;
  return s.str();
}

std::string quote(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Writer::comment(std::string_view text) { out_ << "# " << text << '\n'; }

void Writer::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << quote(columns[i]);
  out_ << '\n';
}

void Writer::row(const Row& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_number(v);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            out_ << v;
          } else if constexpr (std::is_same_v<T, std::string>) {
            out_ << quote(v);
          }
        },
        fields[i]);
  }
  out_ << '\n';
}

}  // namespace harqfbl::csv
