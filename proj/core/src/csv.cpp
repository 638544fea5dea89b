#include "clinistruct/csv.hpp"

#include "clinistruct/errors.hpp"

namespace clinistruct::csv {

std::string escape_field(std::string_view field) {
    bool needs_quotes = false;
    for (const char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void append_row(std::string& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape_field(fields[i]);
    }
    out += "\r\n";
}

std::vector<Row> parse(std::string_view body) {
    std::vector<Row> rows;
    std::size_t line = 1;

    Row cur;
    cur.line = 1;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    bool row_started = false;

    const auto finish_field = [&] {
        cur.fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    const auto finish_row = [&] {
        finish_field();
        rows.push_back(std::move(cur));
        cur = Row{};
        cur.line = line;
        row_started = false;
    };

    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < body.size() && body[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    was_quoted = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (was_quoted || !field.empty())
                throw ParseError("csv: stray quote inside unquoted field at line " +
                                 std::to_string(line));
            in_quotes = true;
            row_started = true;
            break;
        case ',':
            finish_field();
            row_started = true;
            break;
        case '\r':
            if (i + 1 < body.size() && body[i + 1] == '\n') break; // handled by the \n
            ++line;
            finish_row();
            break;
        case '\n':
            ++line;
            finish_row();
            break;
        default:
            if (was_quoted)
                throw ParseError("csv: text after a closing quote at line " +
                                 std::to_string(line));
            field.push_back(c);
            row_started = true;
            break;
        }
    }
    if (in_quotes) throw ParseError("csv: unterminated quoted field at line " + std::to_string(cur.line));
    if (row_started || !field.empty() || !cur.fields.empty()) finish_row();
    return rows;
}

} // namespace clinistruct::csv
