#include "csv.hpp"

#include "kgc/error.hpp"

namespace kgc::csv {

namespace {

[[noreturn]] void fail(const std::string& origin, std::size_t line,
                       const std::string& what) {
    throw Error(ErrorKind::ParseError,
                origin + ":" + std::to_string(line) + ": " + what);
}

} // namespace

Table parse(std::string_view text, const std::string& origin) {
    Table table;
    std::size_t pos = 0;
    std::size_t line = 1;

    while (pos < text.size()) {
        const std::size_t record_line = line;
        std::vector<std::string> fields;
        bool record_open = true;
        while (record_open) {
            std::string field;
            if (pos < text.size() && text[pos] == '"') {
                ++pos;
                bool closed = false;
                while (pos < text.size()) {
                    const char c = text[pos++];
                    if (c == '"') {
                        if (pos < text.size() && text[pos] == '"') {
                            field += '"';
                            ++pos;
                            continue;
                        }
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field += c;
                }
                if (!closed) fail(origin, record_line, "unterminated quoted field");
            } else {
                while (pos < text.size() && text[pos] != ',' && text[pos] != '\r' &&
                       text[pos] != '\n') {
                    if (text[pos] == '"')
                        fail(origin, line, "quote inside unquoted field");
                    field += text[pos++];
                }
            }
            fields.push_back(std::move(field));

            if (pos >= text.size()) {
                record_open = false;
            } else if (text[pos] == ',') {
                ++pos;
            } else if (text[pos] == '\n') {
                ++pos;
                ++line;
                record_open = false;
            } else if (text[pos] == '\r') {
                if (pos + 1 >= text.size() || text[pos + 1] != '\n')
                    fail(origin, line, "bare carriage return");
                pos += 2;
                ++line;
                record_open = false;
            } else {
                fail(origin, line, "unexpected character after closing quote");
            }
        }

        if (table.header.empty() && table.rows.empty() && table.row_lines.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                fail(origin, record_line,
                     "expected " + std::to_string(table.header.size()) +
                         " fields, got " + std::to_string(fields.size()));
            table.rows.push_back(std::move(fields));
            table.row_lines.push_back(record_line);
        }
    }

    if (table.header.empty())
        throw Error(ErrorKind::ParseError, origin + ": missing header row");
    return table;
}

std::string escape_field(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace kgc::csv
