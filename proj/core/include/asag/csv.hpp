#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace asag::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

/// Parses RFC-4180 text: comma separated, `"` quoting with `""` escapes,
/// quoted fields may span lines, CRLF or LF record ends. A UTF-8 BOM is
/// skipped. Blank lines are ignored. Throws ParseError on an unterminated
/// quote or stray characters after a closing quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

}  // namespace asag::csv
