#include "clinistruct/catalog.hpp"
#include "clinistruct/errors.hpp"

#include <doctest.h>

#include <array>
#include <set>
#include <string>
#include <string_view>

using namespace clinistruct;

namespace {

// Connector phrases the narrative renderer and parser treat as structure; no
// surface form or pool value may contain one or the sentence becomes
// unsplittable.
constexpr std::array<std::string_view, 7> kConnectorPhrases = {
    " documented as ", " measured at ", " recorded as ", " reported as ",
    " status: ",       " noted: ",      " was ",
};

bool contains_reserved(std::string_view s) {
    for (const auto phrase : kConnectorPhrases) {
        if (s.find(phrase) != std::string_view::npos) return true;
    }
    // " on " itself is fine ("wheezing on auscultation") as long as the rest
    // of the string never reads as a timestamp, because the sentence parser
    // splits at the last " on " with a date-like tail.
    std::size_t at = s.find(" on ");
    while (at != std::string_view::npos) {
        if (text::canonical_timestamp(s.substr(at + 4)).has_value()) return true;
        at = s.find(" on ", at + 1);
    }
    return false;
}

} // namespace

TEST_CASE("built-in catalog parses and has the expected shape") {
    const Catalog c = default_catalog();
    CHECK(c.catalog_version == 1);
    CHECK(c.diseases.size() == 16);
    CHECK(c.total_variables() >= 128);

    std::set<std::string> disease_ids;
    for (const auto& d : c.diseases) {
        CHECK(disease_ids.insert(d.disease_id).second);
        CHECK_FALSE(d.name.empty());
        CHECK(d.variables.size() >= 8);
        CHECK(d.variables.size() <= 25);
    }
}

TEST_CASE("variable ids are globally unique and scoped to their disease") {
    const Catalog c = default_catalog();
    std::set<std::string> ids;
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            CHECK(ids.insert(v.variable_id).second);
            CHECK(v.disease_id == d.disease_id);
            CHECK(v.variable_id.rfind(d.disease_id + ".", 0) == 0);
        }
    }
}

TEST_CASE("every variable carries a display and a primary code") {
    const Catalog c = default_catalog();
    for (const auto& d : c.diseases) {
        std::set<std::string> code_keys;
        for (const auto& v : d.variables) {
            CHECK_FALSE(v.display.empty());
            REQUIRE_FALSE(v.codes.empty());
            for (const auto& code : v.codes) {
                CHECK_FALSE(code.system.empty());
                CHECK_FALSE(code.code.empty());
                CHECK(code_keys.insert(code.key()).second); // unique within the disease
            }
        }
    }
}

TEST_CASE("value models are coherent per kind") {
    const Catalog c = default_catalog();
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            switch (v.kind) {
            case ValueKind::Numeric:
                CHECK(v.has_bounds());
                CHECK(v.range_lo < v.range_hi);
                CHECK(v.decimals >= 0);
                CHECK(v.decimals <= 3);
                break;
            case ValueKind::Coded:
            case ValueKind::FreeText:
                CHECK(v.has_pool());
                break;
            case ValueKind::Date:
                if (v.has_pool()) {
                    for (const auto& p : v.pool) CHECK(text::is_iso_date(p));
                } else {
                    CHECK(text::is_iso_date(v.date_lo));
                    CHECK(text::is_iso_date(v.date_hi));
                    CHECK(v.date_lo <= v.date_hi);
                }
                break;
            case ValueKind::Boolean:
                CHECK(v.yes_probability >= 0.0);
                CHECK(v.yes_probability <= 1.0);
                break;
            }
            CHECK(v.none_probability >= 0.0);
            CHECK(v.none_probability < 1.0);
            CHECK(v.repeat_max >= 1);
            if (!v.pool_weights.empty()) CHECK(v.pool_weights.size() == v.pool.size());
        }
    }
}

TEST_CASE("surfaces and pool values avoid narrative structure phrases") {
    const Catalog c = default_catalog();
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            CHECK_FALSE(contains_reserved(v.display));
            for (const auto& s : v.synonyms) {
                CHECK_FALSE(s.empty());
                CHECK_FALSE(contains_reserved(s));
            }
            for (const auto& p : v.pool) {
                CHECK_FALSE(p.empty());
                CHECK_FALSE(contains_reserved(p));
            }
        }
    }
}

TEST_CASE("ambiguity classes align with their categories") {
    const Catalog c = default_catalog();
    std::size_t tagged = 0;
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            if (v.ambiguity_class.empty()) continue;
            ++tagged;
            if (v.ambiguity_class == "symptom_overlap") {
                CHECK(v.category == VariableCategory::Symptoms);
            } else if (v.ambiguity_class == "medication_overlap") {
                CHECK(v.category == VariableCategory::Medications);
            } else if (v.ambiguity_class == "immunization_overlap") {
                CHECK(v.category == VariableCategory::Immunizations);
            } else {
                FAIL("unexpected ambiguity class ", v.ambiguity_class);
            }
        }
    }
    CHECK(tagged >= 9);
}

TEST_CASE("relations reference codes that exist in the catalog") {
    const Catalog c = default_catalog();
    std::set<std::string> known;
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            for (const auto& code : v.codes) known.insert(code.key());
        }
    }
    CHECK_FALSE(c.relations.empty());
    for (const auto& edge : c.relations) {
        CHECK(known.count(edge.from_code) == 1);
        CHECK(known.count(edge.to_code) == 1);
    }
}

TEST_CASE("unit table folds every numeric unit to one canonical spelling") {
    const Catalog c = default_catalog();
    const text::UnitTable units = c.unit_table();
    for (const auto& d : c.diseases) {
        for (const auto& v : d.variables) {
            if (v.unit.empty()) continue;
            const auto it = units.find(text::fold(v.unit));
            REQUIRE(it != units.end());
            CHECK(it->second == v.unit);
        }
    }
}

TEST_CASE("find helpers resolve and reject ids") {
    const Catalog c = default_catalog();
    REQUIRE(c.find_disease("asthma") != nullptr);
    CHECK(c.find_disease("asthma")->disease_id == "asthma");
    CHECK(c.find_disease("nope") == nullptr);
    CHECK_THROWS_AS(c.disease("nope"), NotFoundError);
    const auto& asthma = c.disease("asthma");
    REQUIRE_FALSE(asthma.variables.empty());
    const auto& first = asthma.variables.front();
    CHECK(c.find_variable(first.variable_id) == asthma.find_variable(first.variable_id));
    CHECK(c.find_variable("asthma.nope") == nullptr);
}

TEST_CASE("malformed catalog json is rejected with context") {
    CHECK_THROWS_AS(parse_catalog_json("{not json", "test"), ParseError);
    CHECK_THROWS_AS(parse_catalog_json("[]", "test"), ValidationError);
    // Structurally valid JSON with a broken numeric range.
    const char* bad_range = R"({
      "catalog_version": 1,
      "diseases": [{
        "disease_id": "x", "name": "X",
        "variables": [{
          "variable_id": "x.v", "display": "V", "category": "Observations",
          "kind": "numeric", "codes": [{"system": "LOINC", "code": "1-1"}],
          "synonyms": [], "range": [5.0, 1.0], "decimals": 1
        }]
      }],
      "relations": []
    })";
    CHECK_THROWS_AS(parse_catalog_json(bad_range, "test"), ValidationError);
    // Unknown category.
    const char* bad_category = R"({
      "catalog_version": 1,
      "diseases": [{
        "disease_id": "x", "name": "X",
        "variables": [{
          "variable_id": "x.v", "display": "V", "category": "Wibble",
          "kind": "coded", "codes": [{"system": "LOINC", "code": "1-1"}],
          "synonyms": [], "pool": ["a"]
        }]
      }],
      "relations": []
    })";
    CHECK_THROWS_AS(parse_catalog_json(bad_category, "test"), ValidationError);
}

TEST_CASE("load_disease_catalog surfaces missing files as io errors") {
    CHECK_THROWS_AS(load_disease_catalog("/nonexistent/catalog.json"), IoError);
}
