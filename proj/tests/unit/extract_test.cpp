#include "clinistruct/extract.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/generator.hpp"
#include "clinistruct/patient.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

using namespace clinistruct;

namespace {

const ConceptRegistry& registry() {
    static const Catalog c = default_catalog();
    static const ConceptRegistry r(c);
    return r;
}

const VariableExtractor& extractor() {
    static const VariableExtractor e(registry());
    return e;
}

CanonicalStatement stmt(const char* system, const char* code, const char* surface, Value value,
                        const char* timestamp, DocumentFormat format, const char* doc_id) {
    CanonicalStatement s;
    s.patient_id = "P_1";
    s.code = CodeBinding{system, code};
    s.surface = surface;
    s.value = std::move(value);
    s.timestamp = timestamp;
    s.source = SourceLocator{doc_id, format, 0, ""};
    return s;
}

const VariableAssignment& assignment_for(const std::vector<VariableAssignment>& all,
                                         const std::string& variable_id) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const VariableAssignment& a) {
        return a.variable_id == variable_id;
    });
    REQUIRE(it != all.end());
    return *it;
}

} // namespace

TEST_CASE("format_priority orders fhir > hl7 > csv > narrative") {
    CHECK(format_priority(DocumentFormat::FhirJson) > format_priority(DocumentFormat::Hl7V2));
    CHECK(format_priority(DocumentFormat::Hl7V2) > format_priority(DocumentFormat::CsvExtract));
    CHECK(format_priority(DocumentFormat::CsvExtract) >
          format_priority(DocumentFormat::Narrative));
}

TEST_CASE("match_statements resolves codes first, then surfaces") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "nonsense words here",
                              Value::numeric(400, "L/min"), "2020-01-01T00:00:00",
                              DocumentFormat::FhirJson, "Da"));
    statements.push_back(stmt("", "", "PEF reading", Value::numeric(410, "L/min"),
                              "2020-01-02T00:00:00", DocumentFormat::Narrative, "Db"));

    const auto matched = extractor().match_statements("asthma", statements);
    REQUIRE(matched.size() == 2);
    CHECK(matched[0].variable_id == "asthma.peak_flow"); // via code despite odd surface
    CHECK(matched[1].variable_id == "asthma.peak_flow"); // via surface dictionary
    CHECK_FALSE(matched[0].fuzzy_surface);
    CHECK_FALSE(matched[1].fuzzy_surface);
}

TEST_CASE("ambiguous code-less surfaces are dropped") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("", "", "inhaler", Value::coded("salbutamol"),
                              "2020-01-01T00:00:00", DocumentFormat::Narrative, "Da"));
    CHECK(extractor().match_statements("asthma", statements).empty());

    // The same surface with its code survives.
    statements[0].code = CodeBinding{"ATC", "R03AC"};
    const auto matched = extractor().match_statements("asthma", statements);
    REQUIRE(matched.size() == 1);
    CHECK(matched[0].variable_id == "asthma.reliever_inhaler");
}

TEST_CASE("typo'd surfaces still match, flagged as fuzzy") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("", "", "PEF reeding", Value::numeric(300, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::Narrative, "Da"));
    const auto matched = extractor().match_statements("asthma", statements);
    REQUIRE(matched.size() == 1);
    CHECK(matched[0].variable_id == "asthma.peak_flow");
    CHECK(matched[0].fuzzy_surface);
}

TEST_CASE("category mismatches disqualify a match") {
    auto coded = stmt("LOINC", "33452-4", "x", Value::numeric(400, "L/min"),
                      "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da");
    coded.category = VariableCategory::Medications; // peak_flow is an observation
    CHECK(extractor().match_statements("asthma", {coded}).empty());

    coded.category = VariableCategory::Observations;
    CHECK(extractor().match_statements("asthma", {coded}).size() == 1);

    auto surfaced = stmt("", "", "PEF reading", Value::numeric(400, "L/min"),
                         "2020-01-01T00:00:00", DocumentFormat::Narrative, "Db");
    surfaced.category = VariableCategory::Medications;
    CHECK(extractor().match_statements("asthma", {surfaced}).empty());
}

TEST_CASE("missing: no statement yields the sentinel") {
    const auto all = extractor().extract_patient("asthma", "P_1", {});
    CHECK(all.size() == registry().catalog().disease("asthma").variables.size());
    for (const auto& a : all) {
        CHECK(a.value == kMissingSentinel);
        CHECK(a.resolution == resolution::kMissing);
        CHECK(a.support == 0);
        CHECK(a.candidates == 0);
        CHECK(a.source_doc.empty());
    }
}

TEST_CASE("plausibility: out-of-bounds numerics are discarded") {
    // peak_flow range is [180, 620].
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(9000, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da"));
    auto all = extractor().extract_patient("asthma", "P_1", statements);
    {
        const auto& a = assignment_for(all, "asthma.peak_flow");
        CHECK(a.value == kMissingSentinel);
        CHECK(a.resolution == resolution::kPlausibility);
    }

    // One plausible candidate beats any number of implausible ones.
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(410, "L/min"),
                              "2019-01-01T00:00:00", DocumentFormat::Narrative, "Db"));
    all = extractor().extract_patient("asthma", "P_1", statements);
    {
        const auto& a = assignment_for(all, "asthma.peak_flow");
        CHECK(a.value == "410 L/min");
        CHECK(a.resolution == resolution::kUnique);
        CHECK(a.source_doc == "Db");
    }
}

TEST_CASE("unique: agreeing statements resolve with full support") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(410, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da"));
    statements.push_back(stmt("", "", "PEF reading", Value::numeric(410, "L/min"),
                              "2020-06-01T00:00:00", DocumentFormat::Narrative, "Db"));
    const auto all = extractor().extract_patient("asthma", "P_1", statements);
    const auto& a = assignment_for(all, "asthma.peak_flow");
    CHECK(a.value == "410 L/min");
    CHECK(a.resolution == resolution::kUnique);
    CHECK(a.support == 2);
    CHECK(a.candidates == 1);
}

TEST_CASE("currency: the latest timestamp wins a value conflict") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(300, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Dold"));
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(480, "L/min"),
                              "2021-05-05T10:00:00", DocumentFormat::Narrative, "Dnew"));
    const auto all = extractor().extract_patient("asthma", "P_1", statements);
    const auto& a = assignment_for(all, "asthma.peak_flow");
    CHECK(a.value == "480 L/min");
    CHECK(a.resolution == resolution::kCurrency);
    CHECK(a.candidates == 2);
    CHECK(a.support == 1);
    CHECK(a.source_doc == "Dnew");
}

TEST_CASE("priority: format trust breaks a currency tie") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(300, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::Narrative, "Dnote"));
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(480, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Dfhir"));
    const auto all = extractor().extract_patient("asthma", "P_1", statements);
    const auto& a = assignment_for(all, "asthma.peak_flow");
    CHECK(a.value == "480 L/min");
    CHECK(a.resolution == resolution::kPriority);
    CHECK(a.source_doc == "Dfhir");
}

TEST_CASE("lexicographic: the deterministic fallback picks the smallest value") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(480, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da"));
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(300, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Db"));
    const auto all = extractor().extract_patient("asthma", "P_1", statements);
    const auto& a = assignment_for(all, "asthma.peak_flow");
    CHECK(a.value == "300 L/min"); // "300..." < "480..."
    CHECK(a.resolution == resolution::kLexicographic);
    CHECK(a.candidates == 2);
}

TEST_CASE("statements for other variables do not leak into a cell") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "19926-5", "Tiffeneau index", Value::numeric(0.8),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da"));
    const auto all = extractor().extract_patient("asthma", "P_1", statements);
    CHECK(assignment_for(all, "asthma.fev1_fvc").value == "0.8");
    CHECK(assignment_for(all, "asthma.peak_flow").value == kMissingSentinel);
}

TEST_CASE("extraction recovers the ledger truth on a clean corpus slice") {
    const Catalog& cat = registry().catalog();
    const auto units = cat.unit_table();
    const PatientRecord r = generate_patient(cat.disease("gout"), 0, 77, units);

    // Feed perfectly faithful statements, one per event.
    std::vector<CanonicalStatement> statements;
    for (const auto& e : r.events) {
        auto s = stmt(e.code.system.c_str(), e.code.code.c_str(), e.display.c_str(), e.value,
                      e.timestamp.c_str(), DocumentFormat::FhirJson, "Da");
        s.category = e.category;
        statements.push_back(std::move(s));
    }
    const auto all = extractor().extract_patient("gout", r.patient_id, statements);
    REQUIRE(all.size() == r.truth.size());
    for (const auto& a : all) {
        CHECK(a.value == r.truth.at(a.variable_id));
    }
}

TEST_CASE("extract_patient rejects unknown diseases") {
    CHECK_THROWS_AS(extractor().extract_patient("no_such_disease", "P_1", {}), NotFoundError);
}

TEST_CASE("assignments round-trip through jsonl") {
    std::vector<CanonicalStatement> statements;
    statements.push_back(stmt("LOINC", "33452-4", "Peak flow", Value::numeric(410, "L/min"),
                              "2020-01-01T00:00:00", DocumentFormat::FhirJson, "Da"));
    const auto all = extractor().extract_patient("asthma", "P_7", statements);

    const auto path = std::filesystem::temp_directory_path() / "clinistruct_assignments_test.jsonl";
    write_assignments(all, path);
    const auto back = read_assignments(path);
    REQUIRE(back.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(back[i].patient_id == all[i].patient_id);
        CHECK(back[i].variable_id == all[i].variable_id);
        CHECK(back[i].value == all[i].value);
        CHECK(back[i].support == all[i].support);
        CHECK(back[i].candidates == all[i].candidates);
        CHECK(back[i].resolution == all[i].resolution);
        CHECK(back[i].source_doc == all[i].source_doc);
    }
    std::filesystem::remove(path);
}
