#include <doctest.h>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "wsis/errors.hpp"
#include "wsis/textio.hpp"

namespace textio = wsis::textio;

namespace {

bool bitwise_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

TEST_CASE("format_double emits the shortest round-trip form") {
    CHECK(textio::format_double(1.5) == "1.5");
    CHECK(textio::format_double(0.1) == "0.1");
    CHECK(textio::format_double(0.0) == "0");
    CHECK(textio::format_double(-2.0) == "-2");
    CHECK(textio::format_double(300.0) == "300");
}

TEST_CASE("format_double / parse_double round-trips bit-exactly") {
    const std::vector<double> values = {0.1,
                                        1.0 / 3.0,
                                        -7.25,
                                        1e300,
                                        -2.5e-308,
                                        0.0,
                                        123456789.123456789,
                                        std::numeric_limits<double>::denorm_min()};
    for (const double v : values) {
        const double back = textio::parse_double(textio::format_double(v));
        CHECK(bitwise_equal(back, v));
    }
}

TEST_CASE("format_hex / parse_hex round-trips bit-exactly") {
    const std::vector<double> values = {0.1, -1.0 / 3.0, 6.3539094650205755, 0.0, 1e-300};
    for (const double v : values) {
        const double back = textio::parse_hex(textio::format_hex(v));
        CHECK(bitwise_equal(back, v));
    }
}

TEST_CASE("strict parsers reject trailing garbage") {
    CHECK_THROWS_AS(textio::parse_double("1.5x"), wsis::IngestionError);
    CHECK_THROWS_AS(textio::parse_double(""), wsis::IngestionError);
    CHECK_THROWS_AS(textio::parse_double("--3"), wsis::IngestionError);
    CHECK_THROWS_AS(textio::parse_int("12.5"), wsis::IngestionError);
    CHECK_THROWS_AS(textio::parse_int("seven"), wsis::IngestionError);
    CHECK(textio::parse_int("-42") == -42);
    CHECK(textio::parse_double("-3.25") == -3.25);
}

TEST_CASE("split keeps empty fields") {
    const auto parts = textio::split("a,b,,c", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[0] == "a");
    CHECK(parts[1] == "b");
    CHECK(parts[2] == "");
    CHECK(parts[3] == "c");

    const auto lonely = textio::split("x", ',');
    REQUIRE(lonely.size() == 1);
    CHECK(lonely[0] == "x");
}

TEST_CASE("lines handles LF and CRLF and drops the trailing blank") {
    const auto got = textio::lines("alpha\r\nbeta\ngamma\n");
    REQUIRE(got.size() == 3);
    CHECK(got[0] == "alpha");
    CHECK(got[1] == "beta");
    CHECK(got[2] == "gamma");

    const auto no_trailing = textio::lines("one\ntwo");
    REQUIRE(no_trailing.size() == 2);
    CHECK(no_trailing[1] == "two");
}

TEST_CASE("write_file / read_file round-trips and creates parent directories") {
    const auto dir = std::filesystem::temp_directory_path() / "wsis_textio_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "nested" / "out.txt";
    textio::write_file(path, "hello\nworld\n");
    CHECK(textio::read_file(path) == "hello\nworld\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("read_file on a missing path reports the file name") {
    CHECK_THROWS_AS(textio::read_file("/nonexistent/wsis/file.txt"), wsis::IngestionError);
}
