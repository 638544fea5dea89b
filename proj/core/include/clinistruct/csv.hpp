#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct::csv {

/// RFC 4180 field quoting; quotes only when the field needs it.
std::string escape_field(std::string_view field);

/// Appends one CRLF-terminated row.
void append_row(std::string& out, std::span<const std::string> fields);

struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0; ///< 1-based line of the row's first byte
};

/// Parses a full RFC 4180 body (quoted fields, embedded separators,
/// embedded newlines, doubled quotes). Accepts LF or CRLF line ends.
/// Throws ParseError with a line reference on malformed quoting.
std::vector<Row> parse(std::string_view body);

} // namespace clinistruct::csv
