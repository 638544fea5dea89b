#include "clinistruct/ingest.hpp"

#include "clinistruct/csv.hpp"
#include "clinistruct/errors.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <fstream>

namespace clinistruct {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kNarrativeHeaders = {
    "CLINICAL SUMMARY", "PROGRESS NOTE", "DISCHARGE SUMMARY", "OUTPATIENT VISIT NOTE"};

/// Raises in strict mode, records a warning in lenient mode. Returns false so
/// callers can `return issue(...)` from statement builders.
bool issue(ParsedDocument& doc, ParseMode mode, std::size_t position, std::string message) {
    if (mode == ParseMode::Strict) {
        throw ParseError(doc.doc_id + ": " + message);
    }
    doc.warnings.push_back(ParseIssue{position, std::move(message)});
    return false;
}

std::optional<VariableCategory> category_from_fhir_resource(std::string_view resource_type) {
    if (resource_type == "Immunization") return VariableCategory::Immunizations;
    if (resource_type == "Encounter") return VariableCategory::Codes;
    if (resource_type == "MedicationRequest") return VariableCategory::Medications;
    if (resource_type == "Observation") return VariableCategory::Observations;
    if (resource_type == "Condition") return VariableCategory::Conditions;
    if (resource_type == "CarePlan") return VariableCategory::CarePlans;
    if (resource_type == "Procedure") return VariableCategory::Procedures;
    if (resource_type == "Device") return VariableCategory::Devices;
    return std::nullopt;
}

std::optional<std::string> hl7_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (i + 2 >= s.size() || s[i + 2] != '\\') return std::nullopt;
        switch (s[i + 1]) {
        case 'F': out.push_back('|'); break;
        case 'S': out.push_back('^'); break;
        case 'R': out.push_back('~'); break;
        case 'T': out.push_back('&'); break;
        case 'E': out.push_back('\\'); break;
        default: return std::nullopt;
        }
        i += 2;
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string field_at(const std::vector<std::string>& fields, std::size_t i) {
    return i < fields.size() ? fields[i] : std::string();
}

bool compact_date_like(std::string_view s) {
    return (s.size() == 8 || s.size() == 14) && text::is_digits(s);
}

/// Typed value from an HL7 value cell (already unescaped, unit separate).
Value hl7_value(const std::string& value, const std::string& unit) {
    if (!unit.empty()) {
        if (const auto num = text::parse_double(value)) return Value::numeric(*num, unit);
        // A unit next to a non-numeric payload: keep both as text.
        return Value::free_text(value + " " + unit);
    }
    if (compact_date_like(value)) {
        const std::string iso = text::hl7_to_iso_timestamp(value);
        return Value::date(iso.substr(0, 10));
    }
    return Value::from_text(value);
}

const std::array<std::string_view, 7> kCsvHeader = {"event_id", "timestamp", "category", "code",
                                                    "display",  "value",     "unit"};

// Longest first so that leftmost-longest matching is a simple scan.
const std::array<std::string_view, 7> kConnectors = {
    " documented as ", " measured at ", " recorded as ", " reported as ",
    " status: ",       " noted: ",      " was "};

} // namespace

DocumentFormat detect_format(std::string_view body) {
    std::size_t i = 0;
    while (i < body.size() && (body[i] == ' ' || body[i] == '\n' || body[i] == '\r' ||
                               body[i] == '\t')) {
        ++i;
    }
    const std::string_view s = body.substr(i);
    if (!s.empty() && s.front() == '{') return DocumentFormat::FhirJson;
    if (s.substr(0, 4) == "MSH|") return DocumentFormat::Hl7V2;
    if (s.substr(0, 9) == "event_id,") return DocumentFormat::CsvExtract;
    const std::size_t eol = s.find_first_of("\r\n");
    const std::string_view first = s.substr(0, eol == std::string_view::npos ? s.size() : eol);
    for (const auto header : kNarrativeHeaders) {
        if (first == header) return DocumentFormat::Narrative;
    }
    throw ParseError("unrecognized document format");
}

// ---- FHIR ------------------------------------------------------------------

ParsedDocument parse_fhir_bundle(std::string_view body, std::string_view doc_id, ParseMode mode) {
    ParsedDocument parsed;
    parsed.doc_id = std::string(doc_id);
    parsed.format = DocumentFormat::FhirJson;

    json bundle;
    try {
        bundle = json::parse(body);
    } catch (const json::exception& e) {
        throw ParseError(parsed.doc_id + ": invalid JSON: " + e.what());
    }
    if (bundle.value("resourceType", "") != "Bundle") {
        throw ParseError(parsed.doc_id + ": not a FHIR bundle");
    }

    const json entries = bundle.value("entry", json::array());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = "entry[" + std::to_string(i) + "]";
        try {
            const json& resource = entries[i].at("resource");
            const std::string rt = resource.value("resourceType", "");
            if (rt == "Patient") {
                parsed.patient_id = resource.value("id", "");
                continue;
            }

            CanonicalStatement st;
            st.source = SourceLocator{parsed.doc_id, DocumentFormat::FhirJson, i, where};

            if (resource.contains("category")) {
                const std::string name = resource.at("category")
                                             .at(0)
                                             .at("coding")
                                             .at(0)
                                             .value("code", "");
                st.category = category_from_name(name);
                if (!st.category) {
                    issue(parsed, mode, i, where + ": unknown category " + name);
                    continue;
                }
            } else {
                st.category = category_from_fhir_resource(rt);
                if (!st.category) {
                    issue(parsed, mode, i, where + ": no category for resource " + rt);
                    continue;
                }
            }

            const json& coding = resource.at("code").at("coding").at(0);
            st.surface = coding.value("display", "");
            if (coding.contains("code") && coding.contains("system")) {
                st.code.system = coding.at("system").get<std::string>();
                st.code.code = coding.at("code").get<std::string>();
            }

            if (resource.contains("effectiveDateTime")) {
                const auto ts =
                    text::canonical_timestamp(resource.at("effectiveDateTime").get<std::string>());
                if (!ts) {
                    issue(parsed, mode, i, where + ": malformed effectiveDateTime");
                    continue;
                }
                st.timestamp = *ts;
            } else {
                issue(parsed, mode, i, where + ": missing effectiveDateTime");
                continue;
            }

            if (resource.contains("valueQuantity")) {
                const json& q = resource.at("valueQuantity");
                st.value = Value::numeric(q.at("value").get<double>(), q.value("unit", ""));
            } else if (resource.contains("valueDate")) {
                const std::string d = resource.at("valueDate").get<std::string>();
                if (!text::is_iso_date(d)) {
                    issue(parsed, mode, i, where + ": malformed valueDate " + d);
                    continue;
                }
                st.value = Value::date(d);
            } else if (resource.contains("valueString")) {
                st.value = Value::from_text(resource.at("valueString").get<std::string>());
            } else {
                issue(parsed, mode, i, where + ": resource carries no value");
                continue;
            }

            st.patient_id = parsed.patient_id;
            parsed.statements.push_back(std::move(st));
        } catch (const json::exception& e) {
            issue(parsed, mode, i, where + ": " + e.what());
        }
    }
    // The Patient entry comes first in rendered bundles; backfill in case a
    // permuted bundle put it last.
    for (auto& st : parsed.statements) {
        if (st.patient_id.empty()) st.patient_id = parsed.patient_id;
    }
    return parsed;
}

// ---- HL7 -------------------------------------------------------------------

namespace {

struct Hl7Code {
    CodeBinding code;
    std::string surface;
};

std::optional<Hl7Code> parse_hl7_code(const std::string& field) {
    const auto comps = split(field, '^');
    const auto c0 = hl7_unescape(field_at(comps, 0));
    const auto c1 = hl7_unescape(field_at(comps, 1));
    const auto c2 = hl7_unescape(field_at(comps, 2));
    if (!c0 || !c1 || !c2) return std::nullopt;
    Hl7Code out;
    out.surface = *c1;
    if (!c0->empty() && !c2->empty()) out.code = CodeBinding{*c2, *c0};
    return out;
}

std::optional<Value> parse_hl7_composite_value(const std::string& field) {
    const auto comps = split(field, '^');
    const auto v0 = hl7_unescape(field_at(comps, 0));
    const auto v1 = hl7_unescape(field_at(comps, 1));
    if (!v0 || !v1) return std::nullopt;
    return hl7_value(*v0, *v1);
}

} // namespace

ParsedDocument parse_hl7_message(std::string_view body, std::string_view doc_id, ParseMode mode) {
    ParsedDocument parsed;
    parsed.doc_id = std::string(doc_id);
    parsed.format = DocumentFormat::Hl7V2;

    std::vector<std::string> segments;
    for (auto& seg : split(body, '\r')) {
        // Tolerate LF and CRLF segment breaks.
        for (auto& part : split(seg, '\n')) {
            if (!part.empty()) segments.push_back(std::move(part));
        }
    }
    if (segments.empty() || segments.front().substr(0, 4) != "MSH|") {
        throw ParseError(parsed.doc_id + ": missing MSH segment");
    }

    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto fields = split(segments[i], '|');
        const std::string& type = fields.front();
        const std::string where = type + " segment " + std::to_string(i + 1);

        const auto statement_ts = [&](std::size_t index) -> std::optional<std::string> {
            const std::string raw = field_at(fields, index);
            if (raw.empty()) return std::string();
            const auto ts = text::canonical_timestamp(raw);
            if (!ts) return std::nullopt;
            return *ts;
        };

        CanonicalStatement st;
        st.patient_id = parsed.patient_id;
        st.source = SourceLocator{parsed.doc_id, DocumentFormat::Hl7V2, i, where};

        std::string code_field;
        std::string value_field;
        std::size_t ts_index = 0;

        if (type == "MSH") {
            continue;
        } else if (type == "PID") {
            parsed.patient_id = field_at(fields, 3);
            continue;
        } else if (type == "OBX") {
            st.category = VariableCategory::Observations;
            code_field = field_at(fields, 3);
            ts_index = 14;
            const auto code = parse_hl7_code(code_field);
            const auto unit = hl7_unescape(field_at(fields, 6));
            const auto raw_value = hl7_unescape(field_at(fields, 5));
            if (!code || !unit || !raw_value) {
                issue(parsed, mode, i, where + ": bad escape sequence");
                continue;
            }
            st.code = code->code;
            st.surface = code->surface;
            const std::string obx_type = field_at(fields, 2);
            if (obx_type == "NM") {
                const auto num = text::parse_double(*raw_value);
                if (!num) {
                    issue(parsed, mode, i, where + ": non-numeric NM value " + *raw_value);
                    continue;
                }
                st.value = Value::numeric(*num, *unit);
            } else if (obx_type == "DT") {
                if (!compact_date_like(*raw_value)) {
                    issue(parsed, mode, i, where + ": malformed DT value " + *raw_value);
                    continue;
                }
                st.value = Value::date(text::hl7_to_iso_timestamp(*raw_value).substr(0, 10));
            } else {
                st.value = hl7_value(*raw_value, *unit);
            }
            const auto ts = statement_ts(ts_index);
            if (!ts) {
                issue(parsed, mode, i, where + ": malformed timestamp");
                continue;
            }
            st.timestamp = *ts;
            parsed.statements.push_back(std::move(st));
            continue;
        } else if (type == "DG1") {
            st.category = VariableCategory::Conditions;
            code_field = field_at(fields, 3);
            value_field = field_at(fields, 4);
            ts_index = 5;
        } else if (type == "RXA") {
            st.category = VariableCategory::Immunizations;
            code_field = field_at(fields, 5);
            value_field = field_at(fields, 6);
            ts_index = 3;
        } else if (type == "RXE") {
            st.category = VariableCategory::Medications;
            code_field = field_at(fields, 2);
            value_field = field_at(fields, 3);
            ts_index = 5;
        } else if (type == "PR1") {
            st.category = VariableCategory::Procedures;
            code_field = field_at(fields, 3);
            value_field = field_at(fields, 4);
            ts_index = 5;
        } else {
            issue(parsed, mode, i, where + ": unknown segment type");
            continue;
        }

        const auto code = parse_hl7_code(code_field);
        const auto value = parse_hl7_composite_value(value_field);
        if (!code || !value) {
            issue(parsed, mode, i, where + ": bad escape sequence");
            continue;
        }
        st.code = code->code;
        st.surface = code->surface;
        st.value = *value;
        const auto ts = statement_ts(ts_index);
        if (!ts) {
            issue(parsed, mode, i, where + ": malformed timestamp");
            continue;
        }
        st.timestamp = *ts;
        parsed.statements.push_back(std::move(st));
    }

    for (auto& st : parsed.statements) st.patient_id = parsed.patient_id;
    return parsed;
}

// ---- CSV -------------------------------------------------------------------

ParsedDocument parse_csv_extract(std::string_view body, std::string_view doc_id,
                                 std::string_view patient_id, ParseMode mode) {
    ParsedDocument parsed;
    parsed.doc_id = std::string(doc_id);
    parsed.patient_id = std::string(patient_id);
    parsed.format = DocumentFormat::CsvExtract;

    const auto rows = csv::parse(body);
    if (rows.empty()) throw ParseError(parsed.doc_id + ": empty CSV document");
    const auto& header = rows.front().fields;
    if (header.size() != kCsvHeader.size() ||
        !std::equal(header.begin(), header.end(), kCsvHeader.begin())) {
        throw ParseError(parsed.doc_id + ": unexpected CSV header");
    }

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i].fields;
        const std::string where = "row " + std::to_string(rows[i].line);
        if (row.size() != kCsvHeader.size()) {
            issue(parsed, mode, rows[i].line, where + ": expected 7 fields");
            continue;
        }

        CanonicalStatement st;
        st.patient_id = parsed.patient_id;
        st.source = SourceLocator{parsed.doc_id, DocumentFormat::CsvExtract, rows[i].line, where};

        const auto ts = text::canonical_timestamp(row[1]);
        if (!ts) {
            issue(parsed, mode, rows[i].line, where + ": malformed timestamp " + row[1]);
            continue;
        }
        st.timestamp = *ts;

        st.category = category_from_name(row[2]);
        if (!st.category) {
            issue(parsed, mode, rows[i].line, where + ": unknown category " + row[2]);
            continue;
        }
        if (!row[3].empty()) st.code = CodeBinding{"", row[3]};
        st.surface = row[4];

        const std::string& value = row[5];
        const std::string& unit = row[6];
        if (!unit.empty()) {
            const auto num = text::parse_double(value);
            if (!num) {
                issue(parsed, mode, rows[i].line, where + ": non-numeric value " + value);
                continue;
            }
            st.value = Value::numeric(*num, unit);
        } else {
            st.value = Value::from_text(value);
        }
        parsed.statements.push_back(std::move(st));
    }
    return parsed;
}

// ---- narrative -------------------------------------------------------------

namespace {

std::optional<CanonicalStatement> parse_sentence(const std::string& line) {
    if (line.size() < 2 || line.back() != '.') return std::nullopt;
    const std::string core = line.substr(0, line.size() - 1);

    // The timestamp tail is the last " on " whose remainder parses as a
    // date-time; values and surfaces are guaranteed not to look like one.
    std::size_t on = std::string::npos;
    std::string ts;
    for (std::size_t pos = core.rfind(" on "); pos != std::string::npos;
         pos = pos == 0 ? std::string::npos : core.rfind(" on ", pos - 1)) {
        if (const auto t = text::canonical_timestamp(core.substr(pos + 4))) {
            on = pos;
            ts = *t;
            break;
        }
    }
    if (on == std::string::npos) return std::nullopt;
    const std::string head = core.substr(0, on);

    for (std::size_t i = 0; i < head.size(); ++i) {
        for (const auto connector : kConnectors) {
            if (head.compare(i, connector.size(), connector) != 0) continue;
            CanonicalStatement st;
            st.surface = head.substr(0, i);
            st.value = Value::from_text(head.substr(i + connector.size()));
            st.timestamp = ts;
            if (st.surface.empty()) return std::nullopt;
            return st;
        }
    }
    return std::nullopt;
}

} // namespace

ParsedDocument parse_narrative_note(std::string_view body, std::string_view doc_id,
                                    ParseMode mode) {
    ParsedDocument parsed;
    parsed.doc_id = std::string(doc_id);
    parsed.format = DocumentFormat::Narrative;

    const auto lines = split(body, '\n');
    bool in_findings = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.rfind("Patient: ", 0) == 0) {
            const auto open = line.rfind('(');
            const auto close = line.rfind(')');
            if (open != std::string::npos && close != std::string::npos && close > open) {
                parsed.patient_id = line.substr(open + 1, close - open - 1);
            }
            continue;
        }
        if (line == "FINDINGS") {
            in_findings = true;
            continue;
        }
        if (!in_findings || line.empty()) continue;

        auto st = parse_sentence(line);
        if (!st) {
            issue(parsed, mode, i + 1, "line " + std::to_string(i + 1) + ": unparseable sentence");
            continue;
        }
        st->patient_id = parsed.patient_id;
        st->source = SourceLocator{parsed.doc_id, DocumentFormat::Narrative, i + 1,
                                   "line " + std::to_string(i + 1)};
        parsed.statements.push_back(std::move(*st));
    }
    if (!in_findings) {
        throw ParseError(parsed.doc_id + ": narrative note has no FINDINGS section");
    }
    return parsed;
}

ParsedDocument parse_document(std::string_view body, std::string_view doc_id,
                              std::string_view fallback_patient_id, ParseMode mode) {
    switch (detect_format(body)) {
    case DocumentFormat::FhirJson: return parse_fhir_bundle(body, doc_id, mode);
    case DocumentFormat::Hl7V2: return parse_hl7_message(body, doc_id, mode);
    case DocumentFormat::CsvExtract:
        return parse_csv_extract(body, doc_id, fallback_patient_id, mode);
    case DocumentFormat::Narrative: return parse_narrative_note(body, doc_id, mode);
    }
    throw ParseError("unrecognized document format");
}

// ---- statement IO ----------------------------------------------------------

namespace {

json statement_to_json(const CanonicalStatement& st) {
    json j;
    j["patient_id"] = st.patient_id;
    j["category"] = st.category ? json(std::string(category_name(*st.category))) : json();
    j["code_system"] = st.code.system;
    j["code"] = st.code.code;
    j["surface"] = st.surface;
    json v;
    v["kind"] = std::string(value_kind_name(st.value.kind));
    if (st.value.kind == ValueKind::Numeric) {
        v["number"] = st.value.number;
        if (!st.value.unit.empty()) v["unit"] = st.value.unit;
    } else {
        v["text"] = st.value.text;
    }
    j["value"] = v;
    j["timestamp"] = st.timestamp;
    j["doc_id"] = st.source.doc_id;
    j["format"] = std::string(format_name(st.source.format));
    j["position"] = st.source.position;
    j["detail"] = st.source.detail;
    return j;
}

CanonicalStatement statement_from_json(const json& j, const std::string& origin) {
    CanonicalStatement st;
    st.patient_id = j.at("patient_id").get<std::string>();
    if (!j.at("category").is_null()) {
        const std::string name = j.at("category").get<std::string>();
        const auto cat = category_from_name(name);
        if (!cat) throw ParseError(origin + ": unknown category " + name);
        st.category = *cat;
    }
    st.code.system = j.at("code_system").get<std::string>();
    st.code.code = j.at("code").get<std::string>();
    st.surface = j.at("surface").get<std::string>();
    const json& v = j.at("value");
    const auto kind = value_kind_from_name(v.at("kind").get<std::string>());
    if (!kind) throw ParseError(origin + ": unknown value kind");
    st.value.kind = *kind;
    if (st.value.kind == ValueKind::Numeric) {
        st.value.number = v.at("number").get<double>();
        if (v.contains("unit")) st.value.unit = v["unit"].get<std::string>();
    } else {
        st.value.text = v.at("text").get<std::string>();
    }
    st.timestamp = j.at("timestamp").get<std::string>();
    st.source.doc_id = j.at("doc_id").get<std::string>();
    const auto format = format_from_name(j.at("format").get<std::string>());
    if (!format) throw ParseError(origin + ": unknown format");
    st.source.format = *format;
    st.source.position = j.at("position").get<std::size_t>();
    st.source.detail = j.at("detail").get<std::string>();
    return st;
}

} // namespace

void write_statements(const std::vector<CanonicalStatement>& statements,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& st : statements) out << statement_to_json(st).dump() << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

std::vector<CanonicalStatement> read_statements(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<CanonicalStatement> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string origin = path.string() + ":" + std::to_string(line_no);
        try {
            out.push_back(statement_from_json(json::parse(line), origin));
        } catch (const json::exception& e) {
            throw ParseError(origin + ": " + e.what());
        }
    }
    return out;
}

} // namespace clinistruct
