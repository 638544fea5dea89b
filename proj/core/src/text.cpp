#include "clinistruct/text.hpp"

#include "clinistruct/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace clinistruct::text {

namespace {

bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

int two_digits(std::string_view s, std::size_t at) {
    return (s[at] - '0') * 10 + (s[at + 1] - '0');
}

bool valid_ymd(int y, int m, int d) {
    if (y < 1 || m < 1 || m > 12 || d < 1) return false;
    static constexpr std::array<int, 12> len = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dmax = len[static_cast<std::size_t>(m - 1)];
    if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) dmax = 29;
    return d <= dmax;
}

bool valid_hms(int h, int mi, int s) {
    return h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s < 60;
}

} // namespace

std::string fold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) out.push_back(ascii_lower(c));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && ascii_space(s[b])) ++b;
    while (e > b && ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true; // leading whitespace is dropped
    for (const char c : s) {
        if (ascii_space(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw ValidationError("format_double: value is not finite");
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    if (!is_digits(s.substr(0, 4)) || !is_digits(s.substr(5, 2)) || !is_digits(s.substr(8, 2)))
        return false;
    const int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    return valid_ymd(y, two_digits(s, 5), two_digits(s, 8));
}

bool is_iso_datetime(std::string_view s) {
    if (s.size() != 19 || s[10] != 'T' || s[13] != ':' || s[16] != ':') return false;
    if (!is_iso_date(s.substr(0, 10))) return false;
    if (!is_digits(s.substr(11, 2)) || !is_digits(s.substr(14, 2)) || !is_digits(s.substr(17, 2)))
        return false;
    return valid_hms(two_digits(s, 11), two_digits(s, 14), two_digits(s, 17));
}

bool is_dotted_date(std::string_view s) {
    if (s.size() != 10 || s[2] != '.' || s[5] != '.') return false;
    if (!is_digits(s.substr(0, 2)) || !is_digits(s.substr(3, 2)) || !is_digits(s.substr(6, 4)))
        return false;
    const int y = (s[6] - '0') * 1000 + (s[7] - '0') * 100 + (s[8] - '0') * 10 + (s[9] - '0');
    return valid_ymd(y, two_digits(s, 3), two_digits(s, 0));
}

bool is_hl7_timestamp(std::string_view s) {
    if (s.size() != 8 && s.size() != 14) return false;
    if (!is_digits(s)) return false;
    const int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    if (!valid_ymd(y, two_digits(s, 4), two_digits(s, 6))) return false;
    if (s.size() == 14 && !valid_hms(two_digits(s, 8), two_digits(s, 10), two_digits(s, 12)))
        return false;
    return true;
}

std::string dotted_to_iso(std::string_view s) {
    if (!is_dotted_date(s)) throw ParseError("dotted_to_iso: not a DD.MM.YYYY date: " + std::string(s));
    std::string out;
    out.reserve(10);
    out.append(s.substr(6, 4));
    out.push_back('-');
    out.append(s.substr(3, 2));
    out.push_back('-');
    out.append(s.substr(0, 2));
    return out;
}

std::string iso_date_to_dotted(std::string_view s) {
    if (!is_iso_date(s)) throw ParseError("iso_date_to_dotted: not an ISO date: " + std::string(s));
    std::string out;
    out.reserve(10);
    out.append(s.substr(8, 2));
    out.push_back('.');
    out.append(s.substr(5, 2));
    out.push_back('.');
    out.append(s.substr(0, 4));
    return out;
}

std::string iso_to_hl7_timestamp(std::string_view s) {
    std::string out;
    if (is_iso_date(s)) {
        out.append(s.substr(0, 4)).append(s.substr(5, 2)).append(s.substr(8, 2));
        return out;
    }
    if (is_iso_datetime(s)) {
        out.append(s.substr(0, 4)).append(s.substr(5, 2)).append(s.substr(8, 2));
        out.append(s.substr(11, 2)).append(s.substr(14, 2)).append(s.substr(17, 2));
        return out;
    }
    throw ParseError("iso_to_hl7_timestamp: not an ISO date or datetime: " + std::string(s));
}

std::string hl7_to_iso_timestamp(std::string_view s) {
    if (!is_hl7_timestamp(s)) throw ParseError("hl7_to_iso_timestamp: bad timestamp: " + std::string(s));
    std::string out;
    out.append(s.substr(0, 4)).push_back('-');
    out.append(s.substr(4, 2)).push_back('-');
    out.append(s.substr(6, 2));
    if (s.size() == 14) {
        out.push_back('T');
        out.append(s.substr(8, 2)).push_back(':');
        out.append(s.substr(10, 2)).push_back(':');
        out.append(s.substr(12, 2));
    }
    return out;
}

std::optional<std::string> canonical_timestamp(std::string_view raw) {
    const std::string s = collapse_ws(raw);
    if (is_iso_datetime(s)) return s;
    if (is_iso_date(s)) return s + "T00:00:00";
    if (is_dotted_date(s)) return dotted_to_iso(s) + "T00:00:00";
    if (is_hl7_timestamp(s)) {
        std::string iso = hl7_to_iso_timestamp(s);
        if (iso.size() == 10) iso += "T00:00:00";
        return iso;
    }
    // "<date> at HH:MM:SS" as written by narrative notes.
    const auto at = s.find(" at ");
    if (at != std::string::npos) {
        const std::string d = s.substr(0, at);
        const std::string t = s.substr(at + 4);
        std::string iso_d;
        if (is_iso_date(d)) {
            iso_d = d;
        } else if (is_dotted_date(d)) {
            iso_d = dotted_to_iso(d);
        } else {
            return std::nullopt;
        }
        if (t.size() == 8 && t[2] == ':' && t[5] == ':' && is_digits(t.substr(0, 2)) &&
            is_digits(t.substr(3, 2)) && is_digits(t.substr(6, 2)) &&
            valid_hms(two_digits(t, 0), two_digits(t, 3), two_digits(t, 6))) {
            return iso_d + "T" + t;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::int64_t day_number(std::string_view iso_date) {
    if (!is_iso_date(iso_date))
        throw ParseError("day_number: not an ISO date: " + std::string(iso_date));
    std::int64_t y = (iso_date[0] - '0') * 1000 + (iso_date[1] - '0') * 100 +
                     (iso_date[2] - '0') * 10 + (iso_date[3] - '0');
    const int m = two_digits(iso_date, 5);
    const int d = two_digits(iso_date, 8);
    // Howard Hinnant's days_from_civil.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::uint64_t yoe = static_cast<std::uint64_t>(y - era * 400);
    const std::uint64_t doy =
        static_cast<std::uint64_t>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const std::uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string date_from_day_number(std::int64_t z) {
    // Howard Hinnant's civil_from_days.
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::uint64_t doe = static_cast<std::uint64_t>(z - era * 146097);
    const std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::uint64_t mp = (5 * doy + 2) / 153;
    const std::uint64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::uint64_t m = mp + (mp < 10 ? 3 : static_cast<std::uint64_t>(-9));
    const std::int64_t year = y + (m <= 2);

    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02llu-%02llu", static_cast<long long>(year),
                  static_cast<unsigned long long>(m), static_cast<unsigned long long>(d));
    return std::string(buf);
}

std::string canonical_value_text(std::string_view raw, const UnitTable& units) {
    const std::string s = collapse_ws(raw);
    if (s.empty()) return s;

    if (const auto num = parse_double(s)) return format_double(*num);

    const auto sp = s.find(' ');
    if (sp != std::string::npos && sp + 1 < s.size()) {
        const std::string_view head(s.data(), sp);
        const std::string_view tail(s.data() + sp + 1, s.size() - sp - 1);
        if (const auto num = parse_double(head)) {
            const auto it = units.find(fold(tail));
            if (it != units.end()) return format_double(*num) + " " + it->second;
            return format_double(*num) + " " + std::string(tail);
        }
    }

    if (is_dotted_date(s)) return dotted_to_iso(s);
    return s;
}

std::string match_key(std::string_view raw, const UnitTable& units) {
    return fold(canonical_value_text(raw, units));
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : s) {
        if (ascii_alnum(c)) {
            cur.push_back(ascii_lower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool within_edit_one(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t la = a.size();
    const std::size_t lb = b.size();
    if (lb - la > 1) return false;
    std::size_t i = 0;
    while (i < la && a[i] == b[i]) ++i;
    if (i == la) return true; // equal, or b has one extra trailing char
    if (la == lb) return a.substr(i + 1) == b.substr(i + 1); // one substitution
    return a.substr(i) == b.substr(i + 1); // one insertion in b
}

} // namespace clinistruct::text
