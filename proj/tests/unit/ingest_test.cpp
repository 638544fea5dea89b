#include "clinistruct/ingest.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/generator.hpp"
#include "clinistruct/scatter.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

using namespace clinistruct;

namespace {

const Catalog& catalog() {
    static const Catalog c = default_catalog();
    return c;
}

PatientRecord record_for(const char* disease, std::size_t index, std::uint64_t seed) {
    return generate_patient(catalog().disease(disease), index, seed, catalog().unit_table());
}

/// Multiset of (folded surface, canonical value text, timestamp) triples:
/// the parse(render(x)) comparison key shared by all four formats.
std::multiset<std::string> statement_keys(const std::vector<CanonicalStatement>& statements,
                                          const text::UnitTable& units) {
    std::multiset<std::string> keys;
    for (const auto& s : statements) {
        keys.insert(text::fold(s.surface) + "|" +
                    text::canonical_value_text(s.value.to_text(), units) + "|" + s.timestamp);
    }
    return keys;
}

std::multiset<std::string> event_keys(std::span<const ClinicalEvent> events,
                                      const text::UnitTable& units) {
    std::multiset<std::string> keys;
    for (const auto& e : events) {
        keys.insert(text::fold(e.display) + "|" +
                    text::canonical_value_text(e.value.to_text(), units) + "|" + e.timestamp);
    }
    return keys;
}

} // namespace

TEST_CASE("detect_format sniffs all four serializations") {
    CHECK(detect_format("{\n  \"resourceType\": \"Bundle\"\n}") == DocumentFormat::FhirJson);
    CHECK(detect_format("MSH|^~\\&|A|B|C|D|20250101000000||ORU^R01|X|P|2.5\r") ==
          DocumentFormat::Hl7V2);
    CHECK(detect_format("event_id,timestamp,category,code,display,value,unit\r\n") ==
          DocumentFormat::CsvExtract);
    CHECK(detect_format("PROGRESS NOTE\nPatient: Someone (id)\nDate: 2025-01-01\n\nFINDINGS\n") ==
          DocumentFormat::Narrative);
    CHECK_THROWS_AS(detect_format("Dear colleague,\n"), ParseError);
}

TEST_CASE("detect_format agrees with the renderer on real documents") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::preset("mild"));
    for (const char* disease : {"asthma", "copd", "gout", "epilepsy"}) {
        const PatientRecord r = record_for(disease, 0, 19);
        for (const auto& doc : scatterer.scatter_patient(r, 19)) {
            CHECK(detect_format(doc.body) == doc.format);
        }
    }
}

TEST_CASE("per-format round trip: parse(render(events)) preserves every statement") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const auto units = catalog().unit_table();
    for (const char* disease : {"asthma", "gout", "colorectal_cancer", "contraceptives"}) {
        const PatientRecord r = record_for(disease, 1, 101);
        const std::span<const ClinicalEvent> events(r.events);

        for (const auto format : {DocumentFormat::FhirJson, DocumentFormat::CsvExtract,
                                  DocumentFormat::Narrative}) {
            const MedicalDocument doc =
                scatterer.render(format, r, events, "Droundtrip", "2025-03-04T05:06:07");
            const ParsedDocument parsed =
                parse_document(doc.body, doc.doc_id, r.patient_id, ParseMode::Strict);
            CHECK(parsed.format == format);
            CHECK(parsed.patient_id == r.patient_id);
            CHECK(statement_keys(parsed.statements, units) == event_keys(events, units));
        }

        // HL7 expresses only the segment-backed categories.
        std::vector<ClinicalEvent> compatible;
        for (const auto& e : r.events) {
            if (DocumentScatterer::hl7_compatible(e.category)) compatible.push_back(e);
        }
        const MedicalDocument hl7 = scatterer.render(
            DocumentFormat::Hl7V2, r, std::span<const ClinicalEvent>(compatible), "Droundtrip",
            "2025-03-04T05:06:07");
        const ParsedDocument parsed =
            parse_document(hl7.body, hl7.doc_id, r.patient_id, ParseMode::Strict);
        CHECK(statement_keys(parsed.statements, units) ==
              event_keys(std::span<const ClinicalEvent>(compatible), units));
    }
}

TEST_CASE("fhir parser recovers codes, categories and typed values") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const PatientRecord r = record_for("asthma", 0, 23);
    const MedicalDocument doc = scatterer.render_fhir_bundle(
        r, std::span<const ClinicalEvent>(r.events), "Dfhir", "2025-01-01T00:00:00");
    const ParsedDocument parsed = parse_fhir_bundle(doc.body, "Dfhir", ParseMode::Strict);

    CHECK(parsed.patient_id == r.patient_id);
    REQUIRE(parsed.statements.size() == r.events.size());
    for (std::size_t i = 0; i < parsed.statements.size(); ++i) {
        const auto& s = parsed.statements[i];
        CHECK(s.has_code());
        REQUIRE(s.category.has_value());
        CHECK(text::is_iso_datetime(s.timestamp));
        CHECK(s.source.doc_id == "Dfhir");
        CHECK(s.source.format == DocumentFormat::FhirJson);
    }
    const bool any_numeric =
        std::any_of(parsed.statements.begin(), parsed.statements.end(),
                    [](const auto& s) { return s.value.kind == ValueKind::Numeric; });
    CHECK(any_numeric);
}

TEST_CASE("hl7 parser reads OBX/RXA/RXE segments and hl7 timestamps") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const PatientRecord r = record_for("copd", 0, 29);
    std::vector<ClinicalEvent> compatible;
    for (const auto& e : r.events) {
        if (DocumentScatterer::hl7_compatible(e.category)) compatible.push_back(e);
    }
    REQUIRE_FALSE(compatible.empty());
    const MedicalDocument doc = scatterer.render_hl7_message(
        r, std::span<const ClinicalEvent>(compatible), "Dhl7", "2025-01-01T00:00:00");
    const ParsedDocument parsed = parse_hl7_message(doc.body, "Dhl7", ParseMode::Strict);

    CHECK(parsed.patient_id == r.patient_id);
    REQUIRE(parsed.statements.size() == compatible.size());
    for (const auto& s : parsed.statements) {
        CHECK(text::is_iso_datetime(s.timestamp)); // converted from compact form
        CHECK(s.source.format == DocumentFormat::Hl7V2);
    }
}

TEST_CASE("csv parser attributes rows to the fallback patient") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const PatientRecord r = record_for("gout", 0, 31);
    const MedicalDocument doc = scatterer.render_csv_extract(
        r, std::span<const ClinicalEvent>(r.events), "Dcsv", "2025-01-01T00:00:00");
    const ParsedDocument parsed =
        parse_csv_extract(doc.body, "Dcsv", "P_9", ParseMode::Strict);

    CHECK(parsed.patient_id == "P_9");
    REQUIRE(parsed.statements.size() == r.events.size());
    for (const auto& s : parsed.statements) {
        CHECK(s.patient_id == "P_9");
        CHECK(s.source.format == DocumentFormat::CsvExtract);
    }
}

TEST_CASE("narrative parser recovers surfaces, values and dates from prose") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const PatientRecord r = record_for("atopy", 0, 37);
    const MedicalDocument doc = scatterer.render_narrative_note(
        r, std::span<const ClinicalEvent>(r.events), "Dnote", "2025-01-01T00:00:00");
    const ParsedDocument parsed = parse_narrative_note(doc.body, "Dnote", ParseMode::Strict);

    CHECK(parsed.patient_id == r.patient_id);
    REQUIRE(parsed.statements.size() == r.events.size());
    for (const auto& s : parsed.statements) {
        CHECK_FALSE(s.has_code()); // narrative text never carries codes
        CHECK_FALSE(s.surface.empty());
        CHECK(text::is_iso_datetime(s.timestamp));
    }
}

TEST_CASE("narrative surfaces containing ' on ' survive the sentence split") {
    ParsedDocument parsed = parse_narrative_note(
        "PROGRESS NOTE\nPatient: Someone (P_1)\nDate: 2025-01-01\n\nFINDINGS\n"
        "Wheezing on auscultation reported as Yes on 2010-05-06 at 14:00:00.\n",
        "Dnote", ParseMode::Strict);
    REQUIRE(parsed.statements.size() == 1);
    CHECK(parsed.statements[0].patient_id == "P_1");
    CHECK(parsed.statements[0].surface == "Wheezing on auscultation");
    CHECK(parsed.statements[0].value.kind == ValueKind::Boolean);
    CHECK(parsed.statements[0].value.to_text() == "Yes");
    CHECK(parsed.statements[0].timestamp == "2010-05-06T14:00:00");
}

TEST_CASE("strict mode throws on malformed documents, lenient mode warns") {
    const std::string bad_fhir = "{\"resourceType\": \"Bundle\", \"entry\": [ {\"resource\": "
                                 "{\"resourceType\": \"Observation\"}} ]}";
    CHECK_THROWS_AS(parse_fhir_bundle(bad_fhir, "D", ParseMode::Strict), ParseError);
    const ParsedDocument tolerant = parse_fhir_bundle(bad_fhir, "D", ParseMode::Lenient);
    CHECK(tolerant.statements.empty());
    CHECK_FALSE(tolerant.warnings.empty());

    CHECK_THROWS_AS(parse_fhir_bundle("{ not json", "D", ParseMode::Lenient), ParseError);

    const std::string bad_hl7 = "MSH|^~\\&|A|B|C|D|20250101000000||ORU^R01|X|P|2.5\r"
                                "PID|1||P_1||[REDACTED-NAME]||[REDACTED-DOB]|M\r"
                                "OBX|1|NM|C^S||not-a-number|bpm|||||F|20250101000000\r";
    CHECK_THROWS_AS(parse_hl7_message(bad_hl7, "D", ParseMode::Strict), ParseError);
    const ParsedDocument hl7_tolerant = parse_hl7_message(bad_hl7, "D", ParseMode::Lenient);
    CHECK_FALSE(hl7_tolerant.warnings.empty());

    const std::string bad_csv = "event_id,timestamp,category,code,display,value,unit\r\n"
                                "E,2025-01-01T00:00:00,Observations,C\r\n";
    CHECK_THROWS_AS(parse_csv_extract(bad_csv, "D", "P", ParseMode::Strict), ParseError);
    const ParsedDocument csv_tolerant = parse_csv_extract(bad_csv, "D", "P", ParseMode::Lenient);
    CHECK(csv_tolerant.statements.empty());
    CHECK_FALSE(csv_tolerant.warnings.empty());

    const std::string bad_note = "PROGRESS NOTE\nPatient: Someone (P_1)\nDate: 2025-01-01\n\n"
                                 "FINDINGS\nThis sentence has no recognizable shape.\n";
    CHECK_THROWS_AS(parse_narrative_note(bad_note, "D", ParseMode::Strict), ParseError);
    const ParsedDocument note_tolerant = parse_narrative_note(bad_note, "D", ParseMode::Lenient);
    CHECK(note_tolerant.statements.empty());
    CHECK_FALSE(note_tolerant.warnings.empty());
}

TEST_CASE("parse_document dispatches via detection") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::zero());
    const PatientRecord r = record_for("epilepsy", 2, 41);
    for (const auto& doc : scatterer.scatter_patient(r, 41)) {
        const ParsedDocument parsed =
            parse_document(doc.body, doc.doc_id, r.patient_id, ParseMode::Strict);
        CHECK(parsed.format == doc.format);
        CHECK(parsed.doc_id == doc.doc_id);
        CHECK_FALSE(parsed.statements.empty());
    }
}

TEST_CASE("statements round-trip through jsonl") {
    const DocumentScatterer scatterer(catalog(), NoiseProfile::preset("mild"));
    const PatientRecord r = record_for("food_allergies", 0, 43);
    std::vector<CanonicalStatement> all;
    for (const auto& doc : scatterer.scatter_patient(r, 43)) {
        const ParsedDocument parsed =
            parse_document(doc.body, doc.doc_id, r.patient_id, ParseMode::Lenient);
        all.insert(all.end(), parsed.statements.begin(), parsed.statements.end());
    }
    REQUIRE_FALSE(all.empty());

    const auto path = std::filesystem::temp_directory_path() / "clinistruct_statements_test.jsonl";
    write_statements(all, path);
    const auto back = read_statements(path);
    REQUIRE(back.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(back[i] == all[i]);
    std::filesystem::remove(path);
}

TEST_CASE("jittered documents still parse to canonical timestamps") {
    NoiseProfile jitter;
    jitter.format_jitter_rate = 1.0;
    const DocumentScatterer scatterer(catalog(), jitter);
    const PatientRecord r = record_for("dermatitis", 0, 47);
    for (const auto& doc : scatterer.scatter_patient(r, 47)) {
        const ParsedDocument parsed =
            parse_document(doc.body, doc.doc_id, r.patient_id, ParseMode::Strict);
        for (const auto& s : parsed.statements) {
            if (!s.timestamp.empty()) CHECK(text::is_iso_datetime(s.timestamp));
            if (s.value.kind == ValueKind::Date) CHECK(text::is_iso_date(s.value.text));
        }
    }
}
