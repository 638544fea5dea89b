#pragma once

#include "clinistruct/text.hpp"
#include "clinistruct/value.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct {

/// A (system, code) pair binding a variable to a vocabulary entry.
struct CodeBinding {
    std::string system;
    std::string code;

    std::string key() const { return system + ":" + code; }
    bool operator==(const CodeBinding&) const = default;
};

/// Declarative generation and extraction model for one clinical variable.
struct VariableSpec {
    std::string variable_id;
    std::string disease_id;
    std::string display;
    VariableCategory category = VariableCategory::Observations;
    ValueKind kind = ValueKind::FreeText;

    std::vector<CodeBinding> codes;    ///< first entry is the primary binding
    std::vector<std::string> synonyms; ///< surface forms; display is always included
    std::string ambiguity_class;       ///< empty when the variable is unambiguous

    // Value model. Exactly one of pool / numeric range / date range / boolean
    // probabilities drives generation, depending on kind.
    std::vector<std::string> pool;
    std::vector<double> pool_weights; ///< empty = uniform
    double range_lo = 0.0;            ///< numeric; derived from the pool when one is given
    double range_hi = 0.0;
    int decimals = 0;
    std::string date_lo;
    std::string date_hi;
    double yes_probability = 0.5;

    double none_probability = 0.0; ///< chance the variable is absent for a patient
    int repeat_max = 1;            ///< events per patient in [1, repeat_max]

    std::string unit; ///< numeric variables only; empty = unit-free

    bool has_pool() const { return !pool.empty(); }
    bool has_numeric_range() const { return kind == ValueKind::Numeric && !has_pool(); }

    /// Plausibility bounds [range_lo, range_hi] used by conflict resolution;
    /// every numeric variable has them.
    bool has_bounds() const { return kind == ValueKind::Numeric; }
};

/// Ontology relation edge between two coded concepts.
struct RelationEdge {
    enum class Rel { IsA, Treats, Indicates };

    std::string from_code; ///< "SYSTEM:code"
    Rel rel = Rel::IsA;
    std::string to_code;

    bool operator==(const RelationEdge&) const = default;
};

std::string_view relation_name(RelationEdge::Rel r);

/// One disease with its variable schema.
struct DiseaseModule {
    std::string disease_id;
    std::string name;
    std::vector<VariableSpec> variables;

    const VariableSpec* find_variable(std::string_view variable_id) const;
};

/// The full 16-disease catalog.
struct Catalog {
    int catalog_version = 0;
    std::vector<DiseaseModule> diseases;
    std::vector<RelationEdge> relations;

    const DiseaseModule* find_disease(std::string_view disease_id) const;
    const DiseaseModule& disease(std::string_view disease_id) const; ///< throws NotFoundError
    const VariableSpec* find_variable(std::string_view variable_id) const;
    std::size_t total_variables() const;

    /// Canonical unit spellings collected from all numeric variables.
    text::UnitTable unit_table() const;
};

/// Parses and validates catalog JSON. Validation failures carry the offending
/// disease/variable id and field name.
Catalog parse_catalog_json(std::string_view json_text, std::string_view origin);

/// Loads a catalog from disk.
Catalog load_disease_catalog(const std::filesystem::path& path);

/// The catalog compiled into the library.
const std::string& default_catalog_json();
Catalog default_catalog();

} // namespace clinistruct
