#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace clinistruct {

/// The ten variable categories of the extraction schema.
enum class VariableCategory {
    Immunizations,
    Codes,
    Names,
    Medications,
    Symptoms,
    Conditions,
    Observations,
    CarePlans,
    Procedures,
    Devices,
};

inline constexpr std::size_t kCategoryCount = 10;

inline constexpr std::array<VariableCategory, kCategoryCount> kAllCategories = {
    VariableCategory::Immunizations, VariableCategory::Codes,        VariableCategory::Names,
    VariableCategory::Medications,   VariableCategory::Symptoms,     VariableCategory::Conditions,
    VariableCategory::Observations,  VariableCategory::CarePlans,    VariableCategory::Procedures,
    VariableCategory::Devices,
};

std::string_view category_name(VariableCategory c);
std::optional<VariableCategory> category_from_name(std::string_view name);

enum class ValueKind {
    Numeric,
    Coded,
    Date,
    FreeText,
    Boolean,
};

std::string_view value_kind_name(ValueKind k);
std::optional<ValueKind> value_kind_from_name(std::string_view name);

/// A typed clinical value. Numeric values carry the number and an optional
/// unit; all other kinds carry their canonical text.
struct Value {
    ValueKind kind = ValueKind::FreeText;
    double number = 0.0;
    std::string text;
    std::string unit;

    /// Canonical text serialization ("8.8 ng/ml", "2017-07-31", "Yes").
    std::string to_text() const;

    static Value numeric(double number, std::string unit = {});
    static Value coded(std::string text);
    static Value date(std::string iso_date);
    static Value free_text(std::string text);
    static Value boolean(bool yes);

    /// Types loose text: full-string numbers become Numeric (with an optional
    /// trailing unit token), ISO/dotted dates become Date, Yes/No becomes
    /// Boolean, everything else FreeText.
    static Value from_text(std::string_view raw);

    bool operator==(const Value&) const = default;
};

} // namespace clinistruct
