#pragma once

#include "clinistruct/catalog.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct {

/// Dictionary built from the catalog: per-disease lookup from codes and
/// surface forms back to variables, plus the ontology relations.
class ConceptRegistry {
public:
    explicit ConceptRegistry(const Catalog& catalog);

    const Catalog& catalog() const { return *catalog_; }
    const text::UnitTable& units() const { return units_; }

    /// Code lookup. A binding without a system falls back to the bare code;
    /// nullptr when unknown or (for bare codes) ambiguous within the disease.
    const VariableSpec* resolve_code(const std::string& disease_id, const CodeBinding& code) const;

    struct SurfaceHit {
        const VariableSpec* variable = nullptr;
        bool ambiguous = false; ///< several variables claim the surface
        bool fuzzy = false;     ///< matched within edit distance one
    };

    /// Surface lookup, case-folded; falls back to edit-distance-one matching
    /// so that single-character typos still resolve.
    SurfaceHit resolve_surface(const std::string& disease_id, std::string_view surface) const;

    /// Surfaces claimed by more than one variable of the disease.
    const std::set<std::string>& ambiguous_surfaces(const std::string& disease_id) const;

    std::vector<RelationEdge> relations_from(const std::string& code_key) const;
    std::vector<RelationEdge> relations_to(const std::string& code_key) const;

private:
    struct DiseaseIndex {
        std::map<std::string, const VariableSpec*> by_code_key; ///< "SYSTEM:code"
        std::map<std::string, std::vector<const VariableSpec*>> by_bare_code;
        std::map<std::string, std::vector<const VariableSpec*>> by_surface; ///< folded
        std::set<std::string> ambiguous;
    };

    const Catalog* catalog_;
    text::UnitTable units_;
    std::map<std::string, DiseaseIndex> diseases_;
    std::set<std::string> empty_;
};

} // namespace clinistruct
