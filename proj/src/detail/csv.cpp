#include "csv.hpp"

#include "medpipe/errors.hpp"

namespace medpipe::detail {

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool record_has_content = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        // a record consisting of one empty unquoted field is a blank line
        if (record.size() == 1 && record[0].empty() && !record_has_content) {
            record.clear();
            return;
        }
        if (table.header.empty() && table.rows.empty() && table.row_lines.empty()) {
            table.header = std::move(record);
        } else {
            table.rows.push_back(std::move(record));
            table.row_lines.push_back(record_line);
        }
        record.clear();
        record_has_content = false;
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted) {
                    throw MalformedRow(line, "quote in the middle of a field");
                }
                in_quotes = true;
                field_was_quoted = true;
                record_has_content = true;
                ++i;
                break;
            case ',':
                end_field();
                record_has_content = true;
                ++i;
                break;
            case '\r':
                if (i + 1 < n && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                end_record();
                ++i;
                ++line;
                record_line = line;
                break;
            default:
                if (field_was_quoted) {
                    throw MalformedRow(line, "text after a closing quote");
                }
                field.push_back(c);
                record_has_content = true;
                ++i;
                break;
        }
    }
    if (in_quotes) {
        throw MalformedRow(record_line, "unterminated quoted field");
    }
    if (!field.empty() || !record.empty() || field_was_quoted) {
        end_record();
    }
    return table;
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace medpipe::detail
