#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct::text {

/// ASCII lower-casing; non-ASCII bytes pass through untouched.
std::string fold(std::string_view s);

std::string trim(std::string_view s);

/// Collapses every run of whitespace to a single space and trims the ends.
std::string collapse_ws(std::string_view s);

/// Shortest decimal form that round-trips the double ("8.8", "44", not "44.0").
std::string format_double(double v);

/// Whole-string parse; rejects trailing garbage, infinities and NaN.
std::optional<double> parse_double(std::string_view s);

bool is_digits(std::string_view s);

// ---- dates and timestamps ------------------------------------------------
//
// Canonical date:      YYYY-MM-DD
// Canonical timestamp: YYYY-MM-DDTHH:MM:SS
// Tolerated inputs:    dotted European dates (DD.MM.YYYY), HL7 compact
//                      timestamps (YYYYMMDD[HHMMSS]), "<date> at <time>".

bool is_iso_date(std::string_view s);
bool is_iso_datetime(std::string_view s);
bool is_dotted_date(std::string_view s);
bool is_hl7_timestamp(std::string_view s);

std::string dotted_to_iso(std::string_view s);
std::string iso_date_to_dotted(std::string_view s);

/// "2020-05-16T14:30:00" -> "20200516143000"; bare dates keep 8 digits.
std::string iso_to_hl7_timestamp(std::string_view s);
std::string hl7_to_iso_timestamp(std::string_view s);

/// Normalizes any tolerated date/timestamp form to canonical; returns
/// std::nullopt when the input is not date-like.
std::optional<std::string> canonical_timestamp(std::string_view s);

/// Day-number arithmetic (days since 1970-01-01, proleptic Gregorian).
std::int64_t day_number(std::string_view iso_date);
std::string date_from_day_number(std::int64_t days);

/// Canonical unit spellings keyed by their folded form ("ng/ml" -> "ng/ml",
/// "NG/ML" folds to the same key).
using UnitTable = std::map<std::string, std::string>;

/// Canonical serialization of a clinical value:
/// whitespace collapsed, numbers in shortest form, units re-cased through the
/// table, dotted dates converted to ISO. Non-conforming text passes through
/// with only whitespace normalization.
std::string canonical_value_text(std::string_view raw, const UnitTable& units);

/// Case-folded canonical form; two values are considered equal when their
/// match keys are byte-identical.
std::string match_key(std::string_view raw, const UnitTable& units);

/// Splits into lowercase alphanumeric tokens; every other byte separates.
std::vector<std::string> word_tokens(std::string_view s);

/// True when the edit distance between a and b is <= 1.
bool within_edit_one(std::string_view a, std::string_view b);

} // namespace clinistruct::text
