#include "clinistruct/registry.hpp"

#include "clinistruct/errors.hpp"

#include <algorithm>

namespace clinistruct {

ConceptRegistry::ConceptRegistry(const Catalog& catalog)
    : catalog_(&catalog), units_(catalog.unit_table()) {
    for (const auto& disease : catalog.diseases) {
        DiseaseIndex& index = diseases_[disease.disease_id];
        for (const auto& v : disease.variables) {
            for (const auto& code : v.codes) {
                index.by_code_key.emplace(code.key(), &v);
                index.by_bare_code[code.code].push_back(&v);
            }
            std::set<std::string> surfaces;
            surfaces.insert(text::fold(v.display));
            for (const auto& s : v.synonyms) surfaces.insert(text::fold(s));
            for (const auto& s : surfaces) index.by_surface[s].push_back(&v);
        }
        for (const auto& [surface, owners] : index.by_surface) {
            if (owners.size() > 1) index.ambiguous.insert(surface);
        }
    }
}

const VariableSpec* ConceptRegistry::resolve_code(const std::string& disease_id,
                                                  const CodeBinding& code) const {
    const auto it = diseases_.find(disease_id);
    if (it == diseases_.end() || code.code.empty()) return nullptr;
    const DiseaseIndex& index = it->second;
    if (!code.system.empty()) {
        const auto hit = index.by_code_key.find(code.key());
        return hit == index.by_code_key.end() ? nullptr : hit->second;
    }
    const auto hit = index.by_bare_code.find(code.code);
    if (hit == index.by_bare_code.end()) return nullptr;
    // Distinct systems may bind the same bare code to one variable; only
    // genuinely split ownership is ambiguous.
    const VariableSpec* first = hit->second.front();
    const bool split = std::any_of(hit->second.begin(), hit->second.end(),
                                   [&](const VariableSpec* v) { return v != first; });
    return split ? nullptr : first;
}

ConceptRegistry::SurfaceHit ConceptRegistry::resolve_surface(const std::string& disease_id,
                                                             std::string_view surface) const {
    SurfaceHit out;
    const auto it = diseases_.find(disease_id);
    if (it == diseases_.end()) return out;
    const DiseaseIndex& index = it->second;
    const std::string folded = text::fold(surface);

    const auto exact = index.by_surface.find(folded);
    if (exact != index.by_surface.end()) {
        if (exact->second.size() == 1) {
            out.variable = exact->second.front();
        } else {
            out.ambiguous = true;
        }
        return out;
    }

    std::set<const VariableSpec*> near;
    for (const auto& [candidate, owners] : index.by_surface) {
        if (!text::within_edit_one(folded, candidate)) continue;
        near.insert(owners.begin(), owners.end());
    }
    if (near.size() == 1) {
        out.variable = *near.begin();
        out.fuzzy = true;
    } else if (near.size() > 1) {
        out.ambiguous = true;
    }
    return out;
}

const std::set<std::string>& ConceptRegistry::ambiguous_surfaces(
    const std::string& disease_id) const {
    const auto it = diseases_.find(disease_id);
    return it == diseases_.end() ? empty_ : it->second.ambiguous;
}

std::vector<RelationEdge> ConceptRegistry::relations_from(const std::string& code_key) const {
    std::vector<RelationEdge> out;
    for (const auto& edge : catalog_->relations) {
        if (edge.from_code == code_key) out.push_back(edge);
    }
    return out;
}

std::vector<RelationEdge> ConceptRegistry::relations_to(const std::string& code_key) const {
    std::vector<RelationEdge> out;
    for (const auto& edge : catalog_->relations) {
        if (edge.to_code == code_key) out.push_back(edge);
    }
    return out;
}

} // namespace clinistruct
