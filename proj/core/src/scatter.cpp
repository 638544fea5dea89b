#include "clinistruct/scatter.hpp"

#include "clinistruct/csv.hpp"
#include "clinistruct/errors.hpp"
#include "clinistruct/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>

namespace clinistruct {

using nlohmann::json;

namespace {

constexpr std::int64_t kMaxDocuments = 20;

std::string letter_id(char prefix, std::uint64_t bits) {
    std::string out(1, prefix);
    for (int i = 60; i >= 0; i -= 4) out.push_back(static_cast<char>('a' + ((bits >> i) & 0xf)));
    return out;
}

std::string draw_time_of_day(Rng& rng) {
    char buf[10];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", static_cast<int>(7 + rng.below(12)),
                  static_cast<int>(rng.below(60)), static_cast<int>(rng.below(60)));
    return std::string(buf);
}

/// Flips the letter case of a unit ("ng/ml" -> "NG/ML", "BPM" -> "bpm");
/// canonicalization maps either spelling back to the catalog form.
std::string recase_unit(const std::string& unit) {
    bool any_lower = false;
    for (const char c : unit) {
        if (std::islower(static_cast<unsigned char>(c))) any_lower = true;
    }
    std::string out;
    for (const char c : unit) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(static_cast<char>(any_lower ? std::toupper(u) : std::tolower(u)));
    }
    return out;
}

std::string mutate_typo(const std::string& s, Rng& rng) {
    if (s.empty()) return s;
    std::string out = s;
    const char letter = static_cast<char>('a' + rng.below(26));
    switch (rng.pick(3)) {
    case 0: out[rng.pick(out.size())] = letter; break;
    case 1: out.erase(rng.pick(out.size()), 1); break;
    default: out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng.pick(out.size() + 1)), letter);
    }
    return out;
}

std::string hl7_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
        case '|': out += "\\F\\"; break;
        case '^': out += "\\S\\"; break;
        case '~': out += "\\R\\"; break;
        case '&': out += "\\T\\"; break;
        case '\\': out += "\\E\\"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string_view fhir_resource_type(VariableCategory c) {
    switch (c) {
    case VariableCategory::Immunizations: return "Immunization";
    case VariableCategory::Codes: return "Encounter";
    case VariableCategory::Names: return "Encounter";
    case VariableCategory::Medications: return "MedicationRequest";
    case VariableCategory::Symptoms: return "Observation";
    case VariableCategory::Conditions: return "Condition";
    case VariableCategory::Observations: return "Observation";
    case VariableCategory::CarePlans: return "CarePlan";
    case VariableCategory::Procedures: return "Procedure";
    case VariableCategory::Devices: return "Device";
    }
    throw ValidationError("unknown category");
}

} // namespace

struct DocumentScatterer::Occurrence {
    ClinicalEvent event;
    std::string display;
    bool keep_code = true;
    bool jitter = false;
    bool conflict = false;
};

bool DocumentScatterer::hl7_compatible(VariableCategory c) {
    switch (c) {
    case VariableCategory::Observations:
    case VariableCategory::Conditions:
    case VariableCategory::Immunizations:
    case VariableCategory::Medications:
    case VariableCategory::Procedures: return true;
    default: return false;
    }
}

DocumentScatterer::DocumentScatterer(const Catalog& catalog, NoiseProfile profile)
    : catalog_(&catalog), profile_(std::move(profile)), units_(catalog.unit_table()) {
    profile_.validate();
    for (const auto& disease : catalog.diseases) {
        std::map<std::string, int> owners;
        for (const auto& v : disease.variables) {
            variables_.emplace(v.variable_id, &v);
            std::set<std::string> surfaces;
            surfaces.insert(text::fold(v.display));
            for (const auto& s : v.synonyms) surfaces.insert(text::fold(s));
            for (const auto& s : surfaces) ++owners[s];
        }
        auto& ambiguous = ambiguous_surfaces_[disease.disease_id];
        for (const auto& [surface, n] : owners) {
            if (n > 1) ambiguous.insert(surface);
        }
    }
}

const VariableSpec& DocumentScatterer::variable(const std::string& variable_id) const {
    const auto it = variables_.find(variable_id);
    if (it == variables_.end()) throw NotFoundError("unknown variable " + variable_id);
    return *it->second;
}

DocumentPlan DocumentScatterer::plan_fragmentation(const PatientRecord& record,
                                                   std::uint64_t seed) const {
    if (record.events.empty()) throw ValidationError("cannot fragment an event-free record");
    Rng rng(derive_seed(seed, "plan", record.patient_id));

    const auto n_events = static_cast<std::int64_t>(record.events.size());
    const std::int64_t max_docs = std::clamp<std::int64_t>(2 + n_events / 3, 2, kMaxDocuments);
    const std::int64_t n_docs = rng.range(2, max_docs);

    DocumentPlan plan;
    for (std::int64_t i = 0; i < n_docs; ++i) {
        DocumentSlot slot;
        const std::uint64_t w = rng.below(100);
        if (w < 30) {
            slot.format = DocumentFormat::FhirJson;
        } else if (w < 55) {
            slot.format = DocumentFormat::Hl7V2;
        } else if (w < 75) {
            slot.format = DocumentFormat::CsvExtract;
        } else {
            slot.format = DocumentFormat::Narrative;
        }
        plan.slots.push_back(std::move(slot));
    }
    // HL7 cannot express every category; keep at least one unrestricted slot.
    const bool all_hl7 = std::all_of(plan.slots.begin(), plan.slots.end(), [](const auto& s) {
        return s.format == DocumentFormat::Hl7V2;
    });
    if (all_hl7) plan.slots.front().format = DocumentFormat::CsvExtract;

    for (std::size_t i = 0; i < record.events.size(); ++i) {
        const VariableCategory cat = record.events[i].category;
        std::vector<std::size_t> candidates;
        for (std::size_t s = 0; s < plan.slots.size(); ++s) {
            if (plan.slots[s].format != DocumentFormat::Hl7V2 || hl7_compatible(cat)) {
                candidates.push_back(s);
            }
        }
        plan.slots[candidates[rng.pick(candidates.size())]].event_indices.push_back(i);
    }

    std::erase_if(plan.slots, [](const DocumentSlot& s) { return s.event_indices.empty(); });

    // Re-establish the floor of two documents spanning two formats.
    if (plan.slots.size() < 2) {
        DocumentSlot extra;
        extra.format = plan.slots.front().format == DocumentFormat::Narrative
                           ? DocumentFormat::CsvExtract
                           : DocumentFormat::Narrative;
        extra.event_indices.push_back(0);
        plan.slots.push_back(std::move(extra));
    }
    const bool single_format =
        std::all_of(plan.slots.begin(), plan.slots.end(),
                    [&](const auto& s) { return s.format == plan.slots.front().format; });
    if (single_format) {
        plan.slots.back().format = plan.slots.front().format == DocumentFormat::Narrative
                                       ? DocumentFormat::CsvExtract
                                       : DocumentFormat::Narrative;
    }

    if (profile_.duplicate_conflict_rate > 0.0) {
        for (std::size_t i = 0; i < record.events.size(); ++i) {
            const ClinicalEvent& ev = record.events[i];
            const double p = profile_.effective(profile_.duplicate_conflict_rate,
                                                variable(ev.variable_id).ambiguity_class);
            if (p <= 0.0) continue;
            Rng dup(derive_seed(seed, "dup", ev.event_id));
            if (!dup.chance(p)) continue;
            std::vector<std::size_t> targets;
            for (std::size_t s = 0; s < plan.slots.size(); ++s) {
                const DocumentSlot& slot = plan.slots[s];
                if (slot.format == DocumentFormat::Hl7V2 && !hl7_compatible(ev.category)) continue;
                if (std::find(slot.event_indices.begin(), slot.event_indices.end(), i) !=
                    slot.event_indices.end()) {
                    continue;
                }
                targets.push_back(s);
            }
            if (targets.empty()) continue;
            plan.slots[targets[dup.pick(targets.size())]].conflict_indices.push_back(i);
        }
    }
    return plan;
}

std::vector<DocumentScatterer::Occurrence>
DocumentScatterer::build_occurrences(const PatientRecord& record, const DocumentPlan& plan,
                                     std::size_t slot_index, std::uint64_t seed,
                                     bool with_noise) const {
    const DocumentSlot& slot = plan.slots[slot_index];
    const auto ambiguous_it = ambiguous_surfaces_.find(record.disease_id);

    std::vector<Occurrence> views;
    for (const std::size_t idx : slot.event_indices) {
        const ClinicalEvent& ev = record.events[idx];
        Occurrence o;
        o.event = ev;
        o.display = ev.display;
        if (!with_noise) {
            views.push_back(std::move(o));
            continue;
        }
        const VariableSpec& v = variable(ev.variable_id);
        Rng rng(derive_seed(seed, "occ", record.patient_id, slot_index, ev.event_id));
        if (rng.chance(profile_.effective(profile_.omission_rate, v.ambiguity_class))) continue;
        if (rng.chance(profile_.effective(profile_.synonym_swap_rate, v.ambiguity_class))) {
            std::vector<std::string> others;
            for (const auto& s : v.synonyms) {
                if (text::fold(s) != text::fold(o.display)) others.push_back(s);
            }
            if (!others.empty()) {
                o.display = others[rng.pick(others.size())];
                if (ambiguous_it != ambiguous_surfaces_.end() &&
                    ambiguous_it->second.count(text::fold(o.display)) > 0) {
                    // A shared surface without its code is genuinely ambiguous.
                    o.keep_code = false;
                }
            }
        }
        if (rng.chance(profile_.effective(profile_.typo_rate, v.ambiguity_class))) {
            o.display = mutate_typo(o.display, rng);
        }
        if (rng.chance(profile_.effective(profile_.format_jitter_rate, v.ambiguity_class))) {
            o.jitter = true;
        }
        views.push_back(std::move(o));
    }

    if (!with_noise) return views;

    for (const std::size_t idx : slot.conflict_indices) {
        const ClinicalEvent& ev = record.events[idx];
        const VariableSpec& v = variable(ev.variable_id);
        const std::string& truth = record.truth.at(ev.variable_id);
        Rng rng(derive_seed(seed, "dupval", ev.event_id));

        const auto differs = [&](const Value& cand) {
            return text::canonical_value_text(cand.to_text(), units_) != truth;
        };
        std::optional<Value> replacement;
        if (v.kind == ValueKind::Boolean) {
            const Value flipped = Value::boolean(truth != "Yes");
            if (differs(flipped)) replacement = flipped;
        } else if (v.has_pool()) {
            std::vector<std::size_t> slots;
            for (std::size_t k = 0; k < v.pool.size(); ++k) {
                if (differs(draw_conflict_pool(v, k))) slots.push_back(k);
            }
            if (!slots.empty()) replacement = draw_conflict_pool(v, slots[rng.pick(slots.size())]);
        } else if (v.kind == ValueKind::Numeric) {
            const double scale = std::pow(10.0, v.decimals);
            const auto lo = static_cast<std::int64_t>(std::llround(v.range_lo * scale));
            const auto hi = static_cast<std::int64_t>(std::llround(v.range_hi * scale));
            for (int attempt = 0; attempt < 64 && !replacement; ++attempt) {
                const Value cand =
                    Value::numeric(static_cast<double>(rng.range(lo, hi)) / scale, v.unit);
                if (differs(cand)) replacement = cand;
            }
        } else if (v.kind == ValueKind::Date) {
            const std::int64_t lo = text::day_number(v.date_lo);
            const std::int64_t hi = text::day_number(v.date_hi);
            for (int attempt = 0; attempt < 64 && !replacement; ++attempt) {
                const Value cand = Value::date(text::date_from_day_number(rng.range(lo, hi)));
                if (differs(cand)) replacement = cand;
            }
        }
        if (!replacement) continue; // the variable admits no second value

        std::string latest;
        for (const auto& e : record.events) {
            if (e.variable_id == ev.variable_id && e.timestamp > latest) latest = e.timestamp;
        }
        const std::int64_t day =
            text::day_number(latest.substr(0, 10)) + 1 + static_cast<std::int64_t>(rng.below(45));

        Occurrence o;
        o.event = ev;
        o.event.event_id = letter_id('E', derive_seed(seed, "dupid", ev.event_id));
        o.event.value = *replacement;
        o.event.timestamp = text::date_from_day_number(day) + latest.substr(10);
        o.display = v.display;
        o.conflict = true;
        views.push_back(std::move(o));
    }
    return views;
}

Value DocumentScatterer::draw_conflict_pool(const VariableSpec& v, std::size_t slot) {
    const std::string& raw = v.pool[slot];
    switch (v.kind) {
    case ValueKind::Numeric: return Value::numeric(*text::parse_double(raw), v.unit);
    case ValueKind::Coded: return Value::coded(raw);
    case ValueKind::Date: return Value::date(raw);
    case ValueKind::FreeText: return Value::free_text(raw);
    case ValueKind::Boolean: break;
    }
    throw ValidationError("pool draw for boolean variable " + v.variable_id);
}

MedicalDocument DocumentScatterer::render_slot(const PatientRecord& record,
                                               const DocumentPlan& plan, std::size_t slot_index,
                                               std::uint64_t seed, bool with_noise) const {
    const DocumentSlot& slot = plan.slots[slot_index];
    const std::string doc_id = letter_id('D', derive_seed(seed, "doc", record.patient_id, slot_index));

    Rng meta(derive_seed(seed, "meta", record.patient_id, slot_index));
    const std::string created_at = text::date_from_day_number(text::day_number("2025-01-01") +
                                                              static_cast<std::int64_t>(meta.below(334))) +
                                   "T" + draw_time_of_day(meta);

    const std::vector<Occurrence> views =
        build_occurrences(record, plan, slot_index, seed, with_noise);
    MedicalDocument doc = render_views(slot.format, record, views, doc_id, created_at);
    for (const auto& o : views) {
        if (!o.conflict) doc.covered_event_ids.push_back(o.event.event_id);
    }
    return doc;
}

std::vector<MedicalDocument> DocumentScatterer::scatter_patient(const PatientRecord& record,
                                                                std::uint64_t seed) const {
    const DocumentPlan plan = plan_fragmentation(record, seed);
    std::vector<MedicalDocument> docs;
    docs.reserve(plan.slots.size());
    for (std::size_t i = 0; i < plan.slots.size(); ++i) {
        docs.push_back(render_slot(record, plan, i, seed, !profile_.is_zero()));
    }
    return docs;
}

MedicalDocument DocumentScatterer::apply_noise(const MedicalDocument& clean,
                                               const PatientRecord& record,
                                               std::uint64_t seed) const {
    const DocumentPlan plan = plan_fragmentation(record, seed);
    for (std::size_t i = 0; i < plan.slots.size(); ++i) {
        if (letter_id('D', derive_seed(seed, "doc", record.patient_id, i)) == clean.doc_id) {
            return render_slot(record, plan, i, seed, !profile_.is_zero());
        }
    }
    throw NotFoundError("document " + clean.doc_id + " is not part of the plan for " +
                        record.patient_id);
}

// ---- renderers -------------------------------------------------------------

MedicalDocument DocumentScatterer::render_views(DocumentFormat format, const PatientRecord& record,
                                                const std::vector<Occurrence>& views,
                                                const std::string& doc_id,
                                                const std::string& created_at) const {
    MedicalDocument doc;
    doc.doc_id = doc_id;
    doc.patient_id = record.patient_id;
    doc.format = format;
    doc.created_at = created_at;
    switch (format) {
    case DocumentFormat::FhirJson: doc.body = fhir_body(record, views, doc_id, created_at); break;
    case DocumentFormat::Hl7V2: doc.body = hl7_body(record, views, doc_id, created_at); break;
    case DocumentFormat::CsvExtract: doc.body = csv_body(record, views, doc_id, created_at); break;
    case DocumentFormat::Narrative:
        doc.body = narrative_body(record, views, doc_id, created_at);
        break;
    }
    return doc;
}

std::string DocumentScatterer::fhir_body(const PatientRecord& record,
                                         const std::vector<Occurrence>& views,
                                         const std::string& doc_id,
                                         const std::string& created_at) const {
    json bundle;
    bundle["resourceType"] = "Bundle";
    bundle["id"] = doc_id;
    bundle["type"] = "collection";
    bundle["timestamp"] = created_at;

    json entries = json::array();
    const Demographics& d = record.demographics;
    json patient;
    patient["resourceType"] = "Patient";
    patient["id"] = record.patient_id;
    patient["name"] = json::array({json{{"family", d.family_name},
                                        {"given", json::array({d.given_name})},
                                        {"text", d.full_name()}}});
    patient["gender"] = d.sex == "M" ? "male" : "female";
    patient["birthDate"] = d.birth_date;
    patient["address"] = json::array(
        {json{{"city", d.city}, {"line", json::array({d.street})}, {"text", d.address()}}});
    entries.push_back(json{{"resource", patient}});

    for (const Occurrence& o : views) {
        const ClinicalEvent& ev = o.event;
        json res;
        res["resourceType"] = fhir_resource_type(ev.category);
        res["id"] = ev.event_id;
        res["subject"] = json{{"reference", "Patient/" + record.patient_id}};
        res["category"] = json::array({json{
            {"coding", json::array({json{{"system", "urn:clinistruct:category"},
                                         {"code", std::string(category_name(ev.category))}}})}}});
        json coding;
        coding["display"] = o.display;
        if (o.keep_code) {
            coding["system"] = ev.code.system;
            coding["code"] = ev.code.code;
        }
        res["code"] = json{{"coding", json::array({coding})}};
        res["effectiveDateTime"] = ev.timestamp;
        switch (ev.value.kind) {
        case ValueKind::Numeric: {
            json q;
            q["value"] = ev.value.number;
            if (!ev.value.unit.empty()) {
                q["unit"] = o.jitter ? recase_unit(ev.value.unit) : ev.value.unit;
            }
            res["valueQuantity"] = q;
            break;
        }
        case ValueKind::Date: res["valueDate"] = ev.value.text; break;
        default: res["valueString"] = ev.value.text;
        }
        entries.push_back(json{{"resource", res}});
    }
    bundle["entry"] = entries;
    return bundle.dump(2) + "\n";
}

std::string DocumentScatterer::hl7_body(const PatientRecord& record,
                                        const std::vector<Occurrence>& views,
                                        const std::string& doc_id,
                                        const std::string& created_at) const {
    const Demographics& d = record.demographics;
    std::string body;
    body += "MSH|^~\\&|CLINISTRUCT|GENUNIT|INGEST|ARCHIVE|" + text::iso_to_hl7_timestamp(created_at) +
            "||ORU^R01|" + doc_id + "|P|2.5\r";
    body += "PID|1||" + record.patient_id + "||" + hl7_escape(d.family_name) + "^" +
            hl7_escape(d.given_name) + "||" + text::iso_to_hl7_timestamp(d.birth_date) + "|" +
            d.sex + "|||" + hl7_escape(d.street) + "^^" + hl7_escape(d.city) + "\r";

    std::map<std::string, int> counters;
    for (const Occurrence& o : views) {
        const ClinicalEvent& ev = o.event;
        const std::string ts = text::iso_to_hl7_timestamp(ev.timestamp);
        const std::string code_field =
            (o.keep_code ? hl7_escape(ev.code.code) : std::string()) + "^" +
            hl7_escape(o.display) + "^" + (o.keep_code ? hl7_escape(ev.code.system) : std::string());

        std::string value;
        std::string unit;
        switch (ev.value.kind) {
        case ValueKind::Numeric:
            value = text::format_double(ev.value.number);
            unit = o.jitter ? recase_unit(ev.value.unit) : ev.value.unit;
            break;
        case ValueKind::Date: value = text::iso_to_hl7_timestamp(ev.value.text); break;
        default: value = hl7_escape(ev.value.text);
        }

        switch (ev.category) {
        case VariableCategory::Observations: {
            const char* type = ev.value.kind == ValueKind::Numeric  ? "NM"
                               : ev.value.kind == ValueKind::Date   ? "DT"
                                                                    : "ST";
            body += "OBX|" + std::to_string(++counters["OBX"]) + "|" + type + "|" + code_field +
                    "||" + value + "|" + hl7_escape(unit) + "|||||F|||" + ts + "\r";
            break;
        }
        case VariableCategory::Conditions:
            body += "DG1|" + std::to_string(++counters["DG1"]) + "||" + code_field + "|" +
                    compose_hl7_value(value, unit) + "|" + ts + "\r";
            break;
        case VariableCategory::Immunizations:
            body += "RXA|0|" + std::to_string(++counters["RXA"]) + "|" + ts + "|" + ts + "|" +
                    code_field + "|" + compose_hl7_value(value, unit) + "\r";
            break;
        case VariableCategory::Medications:
            body += "RXE|" + std::to_string(++counters["RXE"]) + "|" + code_field + "|" +
                    compose_hl7_value(value, unit) + "||" + ts + "\r";
            break;
        case VariableCategory::Procedures:
            body += "PR1|" + std::to_string(++counters["PR1"]) + "||" + code_field + "|" +
                    compose_hl7_value(value, unit) + "|" + ts + "\r";
            break;
        default:
            throw ValidationError("category " + std::string(category_name(ev.category)) +
                                  " cannot be rendered as HL7");
        }
    }
    return body;
}

std::string DocumentScatterer::compose_hl7_value(const std::string& value,
                                                 const std::string& unit) {
    if (unit.empty()) return value;
    return value + "^" + hl7_escape(unit);
}

std::string DocumentScatterer::csv_body(const PatientRecord& record,
                                        const std::vector<Occurrence>& views,
                                        const std::string& doc_id,
                                        const std::string& created_at) const {
    (void)doc_id;
    (void)created_at;
    (void)record;
    std::string body;
    csv::append_row(body, std::vector<std::string>{"event_id", "timestamp", "category", "code",
                                                   "display", "value", "unit"});
    for (const Occurrence& o : views) {
        const ClinicalEvent& ev = o.event;
        std::string value;
        std::string unit;
        switch (ev.value.kind) {
        case ValueKind::Numeric:
            value = text::format_double(ev.value.number);
            unit = o.jitter ? recase_unit(ev.value.unit) : ev.value.unit;
            break;
        case ValueKind::Date:
            value = o.jitter ? text::iso_date_to_dotted(ev.value.text) : ev.value.text;
            break;
        default: value = ev.value.text;
        }
        csv::append_row(body, std::vector<std::string>{
                                  ev.event_id, ev.timestamp, std::string(category_name(ev.category)),
                                  o.keep_code ? ev.code.code : std::string(), o.display, value, unit});
    }
    return body;
}

std::string DocumentScatterer::narrative_body(const PatientRecord& record,
                                              const std::vector<Occurrence>& views,
                                              const std::string& doc_id,
                                              const std::string& created_at) const {
    static constexpr std::array<std::string_view, 4> kHeaders = {
        "CLINICAL SUMMARY", "PROGRESS NOTE", "DISCHARGE SUMMARY", "OUTPATIENT VISIT NOTE"};

    const Demographics& d = record.demographics;
    Rng header_rng(derive_seed(fnv1a64(doc_id), "header"));
    std::string body(kHeaders[header_rng.pick(kHeaders.size())]);
    body += "\n";
    body += "Patient: " + d.full_name() + " (" + record.patient_id + ")\n";
    body += "DOB: " + d.birth_date + "\n";
    body += "Address: " + d.address() + "\n";
    body += "Date: " + created_at.substr(0, 10) + "\n\n";
    body += "FINDINGS\n";

    for (const Occurrence& o : views) {
        const ClinicalEvent& ev = o.event;
        Rng rng(derive_seed(fnv1a64(doc_id), "sentence", ev.event_id));
        const std::uint64_t variant = rng.pick(3);

        const std::string date_part = o.jitter ? text::iso_date_to_dotted(ev.timestamp.substr(0, 10))
                                               : ev.timestamp.substr(0, 10);
        const std::string when = date_part + " at " + ev.timestamp.substr(11);

        std::string value;
        switch (ev.value.kind) {
        case ValueKind::Numeric:
            value = text::format_double(ev.value.number);
            if (!ev.value.unit.empty()) {
                value += " " + (o.jitter ? recase_unit(ev.value.unit) : ev.value.unit);
            }
            break;
        case ValueKind::Date:
            value = o.jitter ? text::iso_date_to_dotted(ev.value.text) : ev.value.text;
            break;
        default: value = ev.value.text;
        }

        std::string connector;
        switch (ev.value.kind) {
        case ValueKind::Numeric:
            connector = variant == 0 ? " measured at " : variant == 1 ? " was " : " recorded as ";
            break;
        case ValueKind::Boolean:
            connector = variant == 0   ? " status: "
                        : variant == 1 ? " reported as "
                                       : " documented as ";
            break;
        default:
            connector = variant == 0   ? " documented as "
                        : variant == 1 ? " noted: "
                                       : " reported as ";
        }
        body += o.display + connector + value + " on " + when + ".\n";
    }
    return body;
}

MedicalDocument DocumentScatterer::render(DocumentFormat format, const PatientRecord& record,
                                          std::span<const ClinicalEvent> events,
                                          const std::string& doc_id,
                                          const std::string& created_at) const {
    std::vector<Occurrence> views;
    views.reserve(events.size());
    for (const ClinicalEvent& ev : events) {
        Occurrence o;
        o.event = ev;
        o.display = ev.display;
        views.push_back(std::move(o));
    }
    MedicalDocument doc = render_views(format, record, views, doc_id, created_at);
    for (const ClinicalEvent& ev : events) doc.covered_event_ids.push_back(ev.event_id);
    return doc;
}

MedicalDocument DocumentScatterer::render_fhir_bundle(const PatientRecord& record,
                                                      std::span<const ClinicalEvent> events,
                                                      const std::string& doc_id,
                                                      const std::string& created_at) const {
    return render(DocumentFormat::FhirJson, record, events, doc_id, created_at);
}

MedicalDocument DocumentScatterer::render_hl7_message(const PatientRecord& record,
                                                      std::span<const ClinicalEvent> events,
                                                      const std::string& doc_id,
                                                      const std::string& created_at) const {
    return render(DocumentFormat::Hl7V2, record, events, doc_id, created_at);
}

MedicalDocument DocumentScatterer::render_csv_extract(const PatientRecord& record,
                                                      std::span<const ClinicalEvent> events,
                                                      const std::string& doc_id,
                                                      const std::string& created_at) const {
    return render(DocumentFormat::CsvExtract, record, events, doc_id, created_at);
}

MedicalDocument DocumentScatterer::render_narrative_note(const PatientRecord& record,
                                                         std::span<const ClinicalEvent> events,
                                                         const std::string& doc_id,
                                                         const std::string& created_at) const {
    return render(DocumentFormat::Narrative, record, events, doc_id, created_at);
}

} // namespace clinistruct
