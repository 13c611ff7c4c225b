#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "costar/csv.hpp"
#include "costar/error.hpp"
#include "costar/rng.hpp"

using namespace costar;

TEST_CASE("quoted fields, embedded separators and line numbers") {
    const std::string text =
        "\xEF\xBB\xBF"
        "a,b,c\r\n"
        "1,\"x, y\",\"say \"\"hi\"\"\"\r\n"
        "2,\"two\nlines\",\r\n"
        "3,,z\n";
    const auto rows = csv::parse(text, "t.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1].fields == std::vector<std::string>{"1", "x, y", "say \"hi\""});
    CHECK(rows[2].fields == std::vector<std::string>{"2", "two\nlines", ""});
    CHECK(rows[3].line == 5);
    CHECK(rows[3].fields == std::vector<std::string>{"3", "", "z"});
}

TEST_CASE("malformed quoting reports file and line") {
    try {
        csv::parse("a\n\"open\n", "bad.csv");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
    }
    CHECK_THROWS_AS(csv::parse("\"a\"b\n", "x"), DataError);
    CHECK_THROWS_AS(csv::read_file("/nonexistent/costar.csv"), DataError);
}

TEST_CASE("escape and write round-trip") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"") == "\"q\"\"\"");
    std::ostringstream os;
    const std::vector<std::string> row = {"x", "a,b", "line\nbreak", "", "\"q\""};
    csv::write_row(os, row);
    const auto back = csv::parse(os.str(), "mem");
    REQUIRE(back.size() == 1);
    CHECK(back[0].fields == row);
}

TEST_CASE("doubles format to shortest round-trip text") {
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK(csv::format_double(2.0) == "2");
    CHECK(csv::format_double(std::numeric_limits<double>::infinity()) == "inf");
    auto rng = make_rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = (uniform_unit(rng) - 0.5) * std::pow(10.0, static_cast<int>(uniform_below(rng, 20)) - 10);
        CHECK(std::stod(csv::format_double(v)) == v);
    }
}
