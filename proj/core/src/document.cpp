#include "clinistruct/document.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/hash.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace clinistruct {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kFormatCount> kFormatNames = {
    "fhir_json", "hl7_v2", "csv_extract", "narrative"};

constexpr std::array<std::string_view, kFormatCount> kExtensions = {
    "fhir.json", "hl7", "csv", "txt"};

} // namespace

std::string_view format_name(DocumentFormat f) {
    return kFormatNames[static_cast<std::size_t>(f)];
}

std::optional<DocumentFormat> format_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFormatNames.size(); ++i)
        if (kFormatNames[i] == name) return static_cast<DocumentFormat>(i);
    return std::nullopt;
}

std::string_view format_extension(DocumentFormat f) {
    return kExtensions[static_cast<std::size_t>(f)];
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    json docs = json::array();
    for (const auto& e : manifest.documents) {
        docs.push_back({
            {"doc_id", e.doc_id},
            {"patient_id", e.patient_id},
            {"disease_id", e.disease_id},
            {"format", std::string(format_name(e.format))},
            {"path", e.path},
            {"created_at", e.created_at},
            {"digest", e.digest},
            {"covered_event_ids", e.covered_event_ids},
        });
    }
    out << json{{"documents", std::move(docs)}}.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ParseError("manifest " + path.string() + ": " + ex.what());
    }
    CorpusManifest m;
    for (const auto& jd : root.at("documents")) {
        ManifestEntry e;
        e.doc_id = jd.at("doc_id").get<std::string>();
        e.patient_id = jd.at("patient_id").get<std::string>();
        e.disease_id = jd.at("disease_id").get<std::string>();
        const auto fmt = format_from_name(jd.at("format").get<std::string>());
        if (!fmt) throw ParseError("manifest: unknown format " + jd.at("format").get<std::string>());
        e.format = *fmt;
        e.path = jd.at("path").get<std::string>();
        e.created_at = jd.at("created_at").get<std::string>();
        e.digest = jd.at("digest").get<std::string>();
        e.covered_event_ids = jd.at("covered_event_ids").get<std::vector<std::string>>();
        m.documents.push_back(std::move(e));
    }
    return m;
}

ManifestEntry materialize_document(const MedicalDocument& doc, std::string_view disease_id,
                                   const std::filesystem::path& dir) {
    const std::string rel =
        doc.patient_id + "/" + doc.doc_id + "." + std::string(format_extension(doc.format));
    const std::filesystem::path full = dir / rel;
    std::filesystem::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + full.string());
    out << doc.body;
    if (!out) throw IoError("short write to " + full.string());

    ManifestEntry e;
    e.doc_id = doc.doc_id;
    e.patient_id = doc.patient_id;
    e.disease_id = std::string(disease_id);
    e.format = doc.format;
    e.path = rel;
    e.created_at = doc.created_at;
    e.digest = sha256_hex(doc.body);
    e.covered_event_ids = doc.covered_event_ids;
    return e;
}

} // namespace clinistruct
