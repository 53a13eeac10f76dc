#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ontoeval::csv {

using Row = std::vector<std::string>;

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Comma-separated, LF-terminated.
std::string format_row(const Row& row);

/// RFC 4180 reader. Accepts LF or CRLF line ends and a leading UTF-8 BOM;
/// a trailing line break does not produce an empty row. Throws ImportError
/// on an unterminated quoted field.
std::vector<Row> parse(std::string_view text);

} // namespace ontoeval::csv
