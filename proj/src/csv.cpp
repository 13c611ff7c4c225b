#include "costar/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "costar/error.hpp"

namespace costar::csv {

std::vector<Record> parse(std::string_view text, const std::string& source_name) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool field_started = false;

    auto fail = [&](const std::string& msg) {
        throw DataError(source_name + ":" + std::to_string(line) + ": " + msg);
    };
    auto end_record = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        // A blank line is not a record.
        if (!(current.fields.size() == 1 && current.fields[0].empty())) {
            records.push_back(std::move(current));
        }
        current = Record{};
        field_started = false;
    };

    while (i < text.size()) {
        if (!field_started) {
            current.line = current.fields.empty() ? line : current.line;
            field_started = true;
        }
        const char c = text[i];
        if (c == '"' && field.empty()) {
            // quoted field
            ++i;
            const std::size_t open_line = line;
            while (true) {
                if (i >= text.size()) {
                    line = open_line;
                    fail("unterminated quoted field");
                }
                const char q = text[i];
                if (q == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (q == '\n') ++line;
                field += q;
                ++i;
            }
            if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                fail("unexpected character after closing quote");
            }
            continue;
        }
        if (c == ',') {
            current.fields.push_back(std::move(field));
            field.clear();
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            ++i;
            ++line;
            continue;
        }
        if (c == '"') fail("quote inside unquoted field");
        field += c;
        ++i;
    }
    if (field_started || !field.empty() || !current.fields.empty()) end_record();
    return records;
}

std::vector<Record> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << escape(fields[i]);
    }
    os << '\n';
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

}  // namespace costar::csv
