#pragma once

#include "clinistruct/ingest.hpp"
#include "clinistruct/registry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace clinistruct {

/// A statement resolved to a catalog variable.
struct MatchedStatement {
    CanonicalStatement statement;
    std::string variable_id;
    bool fuzzy_surface = false;
};

/// Final value chosen for one (patient, variable) cell.
struct VariableAssignment {
    std::string patient_id; ///< pseudonym in anonymized runs
    std::string disease_id;
    std::string variable_id;
    std::string value;          ///< canonical text, or "None"
    std::size_t support = 0;    ///< statements agreeing with the chosen value
    std::size_t candidates = 0; ///< distinct candidate values seen
    std::string resolution;     ///< rule that settled the cell
    std::string source_doc;     ///< document backing the winner, empty for "None"
};

/// Resolution labels, in the order the rules are applied.
namespace resolution {
inline constexpr const char* kMissing = "missing";           ///< no statement matched
inline constexpr const char* kPlausibility = "plausibility"; ///< all candidates out of bounds
inline constexpr const char* kUnique = "unique";             ///< one distinct value
inline constexpr const char* kCurrency = "currency";         ///< latest timestamp wins
inline constexpr const char* kPriority = "priority";         ///< format priority breaks the tie
inline constexpr const char* kLexicographic = "lexicographic"; ///< final deterministic fallback
} // namespace resolution

/// Source-format trust order; higher wins when currency ties.
int format_priority(DocumentFormat f);

/// Matches parsed statements to catalog variables and resolves one value per
/// variable. Matching prefers codes; code-less statements resolve through the
/// surface dictionary and are dropped when the surface is ambiguous.
class VariableExtractor {
public:
    explicit VariableExtractor(const ConceptRegistry& registry);

    std::vector<MatchedStatement> match_statements(
        const std::string& disease_id, const std::vector<CanonicalStatement>& statements) const;

    /// One assignment per catalog variable of the disease, "None" when
    /// nothing matched.
    std::vector<VariableAssignment> extract_patient(
        const std::string& disease_id, const std::string& patient_id,
        const std::vector<CanonicalStatement>& statements) const;

private:
    VariableAssignment resolve_variable(const VariableSpec& variable, const std::string& patient_id,
                                        const std::vector<MatchedStatement>& matched) const;

    const ConceptRegistry* registry_;
};

void write_assignments(const std::vector<VariableAssignment>& assignments,
                       const std::filesystem::path& path);
std::vector<VariableAssignment> read_assignments(const std::filesystem::path& path);

} // namespace clinistruct
