#include "clinistruct/errors.hpp"
#include "clinistruct/text.hpp"

#include <doctest.h>

using namespace clinistruct;

TEST_CASE("fold lower-cases ascii only") {
    CHECK(text::fold("NG/mL") == "ng/ml");
    CHECK(text::fold("Asthma Action Plan") == "asthma action plan");
    CHECK(text::fold("") == "");
    CHECK(text::fold("caf\xc3\xa9") == "caf\xc3\xa9");
}

TEST_CASE("trim strips edge whitespace") {
    CHECK(text::trim("  a b  ") == "a b");
    CHECK(text::trim("\t\r\nx\n") == "x");
    CHECK(text::trim("   ") == "");
    CHECK(text::trim("") == "");
}

TEST_CASE("collapse_ws folds runs to single spaces") {
    CHECK(text::collapse_ws("  a\t\tb \n c ") == "a b c");
    CHECK(text::collapse_ws("one") == "one");
    CHECK(text::collapse_ws(" \t ") == "");
}

TEST_CASE("format_double uses the shortest round-trip form") {
    CHECK(text::format_double(8.8) == "8.8");
    CHECK(text::format_double(44.0) == "44");
    CHECK(text::format_double(0.5) == "0.5");
    CHECK(text::format_double(-3.25) == "-3.25");
    CHECK(text::format_double(0.0) == "0");
    CHECK(text::format_double(123456789.0) == "123456789");
    CHECK_THROWS_AS(text::format_double(1.0 / 0.0), ValidationError);
}

TEST_CASE("format_double round-trips through parse_double") {
    for (const double v : {0.1, 8.8, 44.0, -17.25, 1e-6, 98.6, 250.0, 0.0069}) {
        const auto back = text::parse_double(text::format_double(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
}

TEST_CASE("parse_double rejects partial and non-finite input") {
    CHECK(text::parse_double("44") == 44.0);
    CHECK(text::parse_double("-0.5") == -0.5);
    CHECK_FALSE(text::parse_double("44 mg").has_value());
    CHECK_FALSE(text::parse_double("").has_value());
    CHECK_FALSE(text::parse_double("x12").has_value());
    CHECK_FALSE(text::parse_double("nan").has_value());
    CHECK_FALSE(text::parse_double("inf").has_value());
}

TEST_CASE("is_digits") {
    CHECK(text::is_digits("0123"));
    CHECK_FALSE(text::is_digits(""));
    CHECK_FALSE(text::is_digits("12a"));
    CHECK_FALSE(text::is_digits("-1"));
}

TEST_CASE("iso date validation is calendar-aware") {
    CHECK(text::is_iso_date("2020-05-16"));
    CHECK(text::is_iso_date("2020-02-29")); // leap year
    CHECK(text::is_iso_date("2000-02-29")); // divisible by 400
    CHECK_FALSE(text::is_iso_date("1900-02-29")); // not a leap year
    CHECK_FALSE(text::is_iso_date("2021-02-29"));
    CHECK_FALSE(text::is_iso_date("2020-13-01"));
    CHECK_FALSE(text::is_iso_date("2020-00-10"));
    CHECK_FALSE(text::is_iso_date("2020-04-31"));
    CHECK_FALSE(text::is_iso_date("2020-5-16"));
    CHECK_FALSE(text::is_iso_date("2020/05/16"));
    CHECK_FALSE(text::is_iso_date(""));
}

TEST_CASE("iso datetime validation") {
    CHECK(text::is_iso_datetime("2020-05-16T14:30:00"));
    CHECK(text::is_iso_datetime("2020-05-16T00:00:00"));
    CHECK_FALSE(text::is_iso_datetime("2020-05-16T24:00:00"));
    CHECK_FALSE(text::is_iso_datetime("2020-05-16 14:30:00"));
    CHECK_FALSE(text::is_iso_datetime("2020-05-16T14:30"));
    CHECK_FALSE(text::is_iso_datetime("2020-05-16"));
}

TEST_CASE("dotted dates convert both ways") {
    CHECK(text::is_dotted_date("16.05.2020"));
    CHECK_FALSE(text::is_dotted_date("31.04.2020"));
    CHECK_FALSE(text::is_dotted_date("2020-05-16"));
    CHECK(text::dotted_to_iso("16.05.2020") == "2020-05-16");
    CHECK(text::iso_date_to_dotted("2020-05-16") == "16.05.2020");
    CHECK(text::dotted_to_iso(text::iso_date_to_dotted("1999-12-31")) == "1999-12-31");
}

TEST_CASE("hl7 timestamps convert both ways") {
    CHECK(text::is_hl7_timestamp("20200516143000"));
    CHECK(text::is_hl7_timestamp("20200516"));
    CHECK_FALSE(text::is_hl7_timestamp("2020051614300"));
    CHECK_FALSE(text::is_hl7_timestamp("20201316143000"));
    CHECK(text::iso_to_hl7_timestamp("2020-05-16T14:30:00") == "20200516143000");
    CHECK(text::iso_to_hl7_timestamp("2020-05-16") == "20200516");
    CHECK(text::hl7_to_iso_timestamp("20200516143000") == "2020-05-16T14:30:00");
    CHECK(text::hl7_to_iso_timestamp("20200516") == "2020-05-16");
}

TEST_CASE("canonical_timestamp accepts every tolerated form") {
    CHECK(text::canonical_timestamp("2020-05-16T14:30:00") == "2020-05-16T14:30:00");
    // Bare dates normalize to midnight so currency comparisons stay total.
    CHECK(text::canonical_timestamp("2020-05-16") == "2020-05-16T00:00:00");
    CHECK(text::canonical_timestamp("16.05.2020") == "2020-05-16T00:00:00");
    CHECK(text::canonical_timestamp("20200516143000") == "2020-05-16T14:30:00");
    CHECK(text::canonical_timestamp("20200516") == "2020-05-16T00:00:00");
    CHECK(text::canonical_timestamp("2020-05-16 at 14:30:00") == "2020-05-16T14:30:00");
    CHECK(text::canonical_timestamp("16.05.2020 at 14:30:00") == "2020-05-16T14:30:00");
    CHECK_FALSE(text::canonical_timestamp("not a date").has_value());
    CHECK_FALSE(text::canonical_timestamp("99.99.2020").has_value());
    CHECK_FALSE(text::canonical_timestamp("").has_value());
}

TEST_CASE("day_number arithmetic agrees with known anchors") {
    CHECK(text::day_number("1970-01-01") == 0);
    CHECK(text::day_number("1970-01-02") == 1);
    CHECK(text::day_number("1969-12-31") == -1);
    CHECK(text::day_number("2000-03-01") == 11017);
    CHECK(text::date_from_day_number(0) == "1970-01-01");
    CHECK(text::date_from_day_number(11017) == "2000-03-01");
}

TEST_CASE("day_number round-trips across year boundaries") {
    for (const char* d : {"1930-01-01", "1999-12-31", "2000-02-29", "2024-12-31", "2025-06-15"}) {
        CHECK(text::date_from_day_number(text::day_number(d)) == d);
    }
    const std::int64_t base = text::day_number("2020-02-27");
    CHECK(text::date_from_day_number(base + 1) == "2020-02-28");
    CHECK(text::date_from_day_number(base + 2) == "2020-02-29");
    CHECK(text::date_from_day_number(base + 3) == "2020-03-01");
}

TEST_CASE("canonical_value_text normalizes numbers, units and dates") {
    text::UnitTable units;
    units["ng/ml"] = "ng/ml";
    units["mg"] = "mg";
    CHECK(text::canonical_value_text("8.80 ng/mL", units) == "8.8 ng/ml");
    CHECK(text::canonical_value_text("44.0", units) == "44");
    CHECK(text::canonical_value_text("16.05.2020", units) == "2020-05-16");
    CHECK(text::canonical_value_text("  free   text  ", units) == "free text");
    CHECK(text::canonical_value_text("250 MG", units) == "250 mg");
    // Unknown unit spellings pass through with collapsed whitespace.
    CHECK(text::canonical_value_text("250 bogons", units) == "250 bogons");
}

TEST_CASE("match_key equates case variants of the same value") {
    text::UnitTable units;
    units["mg"] = "mg";
    CHECK(text::match_key("250 MG", units) == text::match_key("250 mg", units));
    CHECK(text::match_key("Stage II", units) == text::match_key("stage ii", units));
    CHECK(text::match_key("8.8", units) != text::match_key("8.9", units));
}

TEST_CASE("word_tokens splits on non-alphanumerics and folds") {
    CHECK(text::word_tokens("Asthma Action-Plan 2") ==
          std::vector<std::string>{"asthma", "action", "plan", "2"});
    CHECK(text::word_tokens("...") == std::vector<std::string>{});
}

TEST_CASE("within_edit_one") {
    CHECK(text::within_edit_one("wheeze", "wheeze"));
    CHECK(text::within_edit_one("wheeze", "wheze"));   // deletion
    CHECK(text::within_edit_one("wheeze", "wheezes")); // insertion
    CHECK(text::within_edit_one("wheeze", "whteze"));  // substitution
    CHECK_FALSE(text::within_edit_one("wheeze", "whtze"));
    CHECK_FALSE(text::within_edit_one("abc", "cba"));
    CHECK(text::within_edit_one("", "a"));
    CHECK_FALSE(text::within_edit_one("", "ab"));
}
