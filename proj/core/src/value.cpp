#include "clinistruct/value.hpp"

#include "clinistruct/text.hpp"

namespace clinistruct {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Immunizations", "Codes",        "Names",      "Medications", "Symptoms",
    "Conditions",    "Observations", "Care-plans", "Procedures",  "Devices",
};

constexpr std::array<std::string_view, 5> kKindNames = {
    "numeric", "coded", "date", "free_text", "boolean",
};

} // namespace

std::string_view category_name(VariableCategory c) {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<VariableCategory> category_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == name) return static_cast<VariableCategory>(i);
    return std::nullopt;
}

std::string_view value_kind_name(ValueKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ValueKind> value_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<ValueKind>(i);
    return std::nullopt;
}

std::string Value::to_text() const {
    if (kind == ValueKind::Numeric) {
        std::string out = text::format_double(number);
        if (!unit.empty()) {
            out.push_back(' ');
            out += unit;
        }
        return out;
    }
    return text;
}

Value Value::numeric(double number, std::string unit) {
    Value v;
    v.kind = ValueKind::Numeric;
    v.number = number;
    v.unit = std::move(unit);
    return v;
}

Value Value::coded(std::string text) {
    Value v;
    v.kind = ValueKind::Coded;
    v.text = std::move(text);
    return v;
}

Value Value::date(std::string iso_date) {
    Value v;
    v.kind = ValueKind::Date;
    v.text = std::move(iso_date);
    return v;
}

Value Value::free_text(std::string text) {
    Value v;
    v.kind = ValueKind::FreeText;
    v.text = std::move(text);
    return v;
}

Value Value::boolean(bool yes) {
    Value v;
    v.kind = ValueKind::Boolean;
    v.text = yes ? "Yes" : "No";
    return v;
}

Value Value::from_text(std::string_view raw) {
    const std::string s = text::collapse_ws(raw);
    if (const auto num = text::parse_double(s)) return numeric(*num);

    // "250 mg": exactly one number and one unit token. Longer phrases that
    // merely start with a number ("8 of 10 days") stay free text.
    const auto sp = s.find(' ');
    if (sp != std::string::npos && sp + 1 < s.size() &&
        s.find(' ', sp + 1) == std::string::npos) {
        if (const auto num = text::parse_double(std::string_view(s).substr(0, sp)))
            return numeric(*num, s.substr(sp + 1));
    }
    if (text::is_iso_date(s)) return date(s);
    if (text::is_dotted_date(s)) return date(text::dotted_to_iso(s));
    if (s == "Yes" || s == "No") return boolean(s == "Yes");
    return free_text(s);
}

} // namespace clinistruct
