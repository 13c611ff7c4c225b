#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace costar::csv {

struct Record {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields, doubled quotes, embedded commas and line
// breaks, CRLF or LF endings. A UTF-8 byte order mark is skipped. Throws
// DataError (with path and line) on an unterminated quote or on stray
// characters after a closing quote.
std::vector<Record> parse(std::string_view text, const std::string& source_name);
std::vector<Record> read_file(const std::filesystem::path& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& os, const std::vector<std::string>& fields);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace costar::csv
