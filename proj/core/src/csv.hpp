#ifndef KGC_CSV_HPP
#define KGC_CSV_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgc::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;   // starting line of each row, 1-based
};

// Strict RFC-4180: quoted fields with doubled quotes, CRLF or LF record
// ends, no quotes inside bare fields. Every row must match the header
// width. Errors carry "<origin>:<line>".
Table parse(std::string_view text, const std::string& origin);

// Minimal quoting: bare unless the field holds a comma, quote, or newline.
std::string escape_field(std::string_view field);

} // namespace kgc::csv

#endif
