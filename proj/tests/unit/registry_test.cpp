#include "clinistruct/registry.hpp"

#include <doctest.h>

#include <map>
#include <string>

using namespace clinistruct;

namespace {

const ConceptRegistry& registry() {
    static const Catalog c = default_catalog();
    static const ConceptRegistry r(c);
    return r;
}

} // namespace

TEST_CASE("resolve_code finds variables by system and code") {
    const VariableSpec* v = registry().resolve_code("asthma", CodeBinding{"LOINC", "33452-4"});
    REQUIRE(v != nullptr);
    CHECK(v->variable_id == "asthma.peak_flow");

    CHECK(registry().resolve_code("asthma", CodeBinding{"LOINC", "99999-9"}) == nullptr);
    // Right code under the wrong system does not resolve.
    CHECK(registry().resolve_code("asthma", CodeBinding{"SNOMED", "33452-4"}) == nullptr);
    // Codes of another disease are invisible within asthma.
    CHECK(registry().resolve_code("asthma", CodeBinding{"ATC", "M04AA"}) == nullptr);
}

TEST_CASE("bare codes resolve when unique within the disease") {
    const VariableSpec* v = registry().resolve_code("asthma", CodeBinding{"", "R03AC"});
    REQUIRE(v != nullptr);
    CHECK(v->variable_id == "asthma.reliever_inhaler");
    CHECK(registry().resolve_code("asthma", CodeBinding{"", "no-such-code"}) == nullptr);
}

TEST_CASE("every catalog primary code resolves to its own variable") {
    for (const auto& disease : registry().catalog().diseases) {
        for (const auto& var : disease.variables) {
            const VariableSpec* hit = registry().resolve_code(disease.disease_id, var.codes.front());
            REQUIRE(hit != nullptr);
            CHECK(hit->variable_id == var.variable_id);
        }
    }
}

TEST_CASE("resolve_surface matches displays and synonyms case-insensitively") {
    const auto by_display = registry().resolve_surface("asthma", "PEF reading");
    REQUIRE(by_display.variable != nullptr);
    CHECK(by_display.variable->variable_id == "asthma.peak_flow");
    CHECK_FALSE(by_display.ambiguous);
    CHECK_FALSE(by_display.fuzzy);

    const auto folded = registry().resolve_surface("asthma", "pef READING");
    REQUIRE(folded.variable != nullptr);
    CHECK(folded.variable->variable_id == "asthma.peak_flow");
    CHECK_FALSE(folded.fuzzy);
}

TEST_CASE("shared surfaces come back flagged as ambiguous") {
    // "inhaler" is a synonym of both asthma inhaler variables.
    const auto hit = registry().resolve_surface("asthma", "inhaler");
    CHECK(hit.ambiguous);
    CHECK(registry().ambiguous_surfaces("asthma").count("inhaler") == 1);
    CHECK(registry().ambiguous_surfaces("no_such_disease").empty());
}

TEST_CASE("single-character typos resolve through fuzzy matching") {
    const auto sub = registry().resolve_surface("asthma", "PEF reeding");
    REQUIRE(sub.variable != nullptr);
    CHECK(sub.variable->variable_id == "asthma.peak_flow");
    CHECK(sub.fuzzy);

    const auto del = registry().resolve_surface("asthma", "PEF readin");
    REQUIRE(del.variable != nullptr);
    CHECK(del.variable->variable_id == "asthma.peak_flow");
    CHECK(del.fuzzy);

    const auto ins = registry().resolve_surface("asthma", "PEFF reading");
    REQUIRE(ins.variable != nullptr);
    CHECK(ins.variable->variable_id == "asthma.peak_flow");
    CHECK(ins.fuzzy);
}

TEST_CASE("unknown and distant surfaces do not resolve") {
    CHECK(registry().resolve_surface("asthma", "completely unrelated words").variable == nullptr);
    // Two edits away from any registered surface.
    CHECK(registry().resolve_surface("asthma", "PEF rd").variable == nullptr);
    CHECK(registry().resolve_surface("asthma", "").variable == nullptr);
}

TEST_CASE("surfaces of other diseases stay invisible") {
    // Every disease keeps its own dictionary partition.
    const auto hit = registry().resolve_surface("gout", "PEF reading");
    CHECK(hit.variable == nullptr);
}

TEST_CASE("relations are indexed in both directions") {
    const auto from = registry().relations_from("ATC:R03AC");
    REQUIRE(from.size() == 1);
    CHECK(from[0].rel == RelationEdge::Rel::Treats);
    CHECK(from[0].to_code == "SNOMED:195967001");

    const auto to = registry().relations_to("SNOMED:90560007");
    CHECK(to.size() == 2); // two gout drug classes treat the same condition

    CHECK(registry().relations_from("SNOMED:195967001").empty());
    CHECK(registry().relations_to("ATC:R03AC").empty());
    CHECK(registry().relations_from("FAKE:0").empty());
}

TEST_CASE("units table is shared with the catalog") {
    const auto& units = registry().units();
    CHECK(units.count(text::fold("L/min")) == 1);
}
