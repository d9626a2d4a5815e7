#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace medpipe::detail {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based physical line where each row starts (quoted fields can span
    // lines, so this is not simply index + 2)
    std::vector<std::size_t> row_lines;
};

// RFC 4180-style parsing: quoted fields, "" escapes, embedded separators and
// line breaks, CRLF or LF endings. The first record is the header. Raises
// MalformedRow for unterminated quotes or text after a closing quote.
CsvTable parse_csv(const std::string& text);

// Quotes the field if it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

}  // namespace medpipe::detail
