#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/document.hpp"
#include "clinistruct/value.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct {

/// Where inside a document a statement came from.
struct SourceLocator {
    std::string doc_id;
    DocumentFormat format = DocumentFormat::Narrative;
    std::size_t position = 0; ///< entry index / segment number / line number
    std::string detail;       ///< "entry[3]", "OBX|2", "row 5", "line 9"

    bool operator==(const SourceLocator&) const = default;
};

/// One clinical assertion recovered from a document, normalized as far as the
/// text allows: timestamps are canonical ISO, values are typed. Codes and
/// categories stay empty when the source format does not carry them
/// (narrative text, code-dropped occurrences).
struct CanonicalStatement {
    std::string patient_id;
    std::optional<VariableCategory> category;
    CodeBinding code; ///< empty system+code when the source had none
    std::string surface;
    Value value;
    std::string timestamp; ///< canonical ISO datetime, empty when absent
    SourceLocator source;

    bool has_code() const { return !code.code.empty(); }
    bool operator==(const CanonicalStatement&) const = default;
};

struct ParseIssue {
    std::size_t position = 0;
    std::string message;
};

struct ParsedDocument {
    std::string doc_id;
    std::string patient_id;
    DocumentFormat format = DocumentFormat::Narrative;
    std::vector<CanonicalStatement> statements;
    std::vector<ParseIssue> warnings; ///< lenient-mode diagnostics
};

/// Strict parsing throws ParseError at the first malformed construct;
/// lenient parsing records a warning and keeps going.
enum class ParseMode {
    Strict,
    Lenient,
};

/// Sniffs the serialization from the body alone.
DocumentFormat detect_format(std::string_view body);

ParsedDocument parse_fhir_bundle(std::string_view body, std::string_view doc_id, ParseMode mode);
ParsedDocument parse_hl7_message(std::string_view body, std::string_view doc_id, ParseMode mode);
ParsedDocument parse_csv_extract(std::string_view body, std::string_view doc_id,
                                 std::string_view patient_id, ParseMode mode);
ParsedDocument parse_narrative_note(std::string_view body, std::string_view doc_id, ParseMode mode);

/// Detects the format and dispatches. fallback_patient_id fills in for
/// formats that do not embed a patient marker (CSV).
ParsedDocument parse_document(std::string_view body, std::string_view doc_id,
                              std::string_view fallback_patient_id, ParseMode mode);

void write_statements(const std::vector<CanonicalStatement>& statements,
                      const std::filesystem::path& path);
std::vector<CanonicalStatement> read_statements(const std::filesystem::path& path);

} // namespace clinistruct
