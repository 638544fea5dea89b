#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct {

enum class DocumentFormat {
    FhirJson,
    Hl7V2,
    CsvExtract,
    Narrative,
};

inline constexpr std::size_t kFormatCount = 4;

std::string_view format_name(DocumentFormat f);
std::optional<DocumentFormat> format_from_name(std::string_view name);

/// File extension (without leading dot) used when a document is materialized.
std::string_view format_extension(DocumentFormat f);

/// One rendered artifact of a patient's chart.
struct MedicalDocument {
    std::string doc_id; ///< "D" + 16 letters, free of patient information
    std::string patient_id;
    DocumentFormat format = DocumentFormat::Narrative;
    std::string body;       ///< UTF-8 bytes
    std::string created_at; ///< ISO datetime, derived from the seed
    std::vector<std::string> covered_event_ids;

    bool operator==(const MedicalDocument&) const = default;
};

struct ManifestEntry {
    std::string doc_id;
    std::string patient_id;
    std::string disease_id;
    DocumentFormat format = DocumentFormat::Narrative;
    std::string path; ///< relative to the manifest's directory
    std::string created_at;
    std::string digest; ///< sha256 of the body
    std::vector<std::string> covered_event_ids;
};

struct CorpusManifest {
    std::vector<ManifestEntry> documents;
};

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Writes the body under dir/<patient_id>/<doc_id>.<ext> and returns the
/// manifest entry (path relative to dir).
ManifestEntry materialize_document(const MedicalDocument& doc, std::string_view disease_id,
                                   const std::filesystem::path& dir);

} // namespace clinistruct
