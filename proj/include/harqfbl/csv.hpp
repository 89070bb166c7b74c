#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace harqfbl::csv {

/// Empty (monostate), number, integer or text cell.
using Field = std::variant<std::monostate, double, std::int64_t, std::string>;
using Row = std::vector<Field>;

/// 12 significant digits, '.' decimal separator; non-finite values become "".
std::string format_number(double value);

/// RFC-4180 quoting: fields containing ',', '"' or line breaks are quoted, quotes doubled.
std::string quote(std::string_view text);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  /// '#'-prefixed line, placed above the header.
  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);
  void row(const Row& fields);

 private:
  std::ostream& out_;
};

}  // namespace harqfbl::csv
