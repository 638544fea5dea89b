#pragma once

#include "clinistruct/document.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace clinistruct {

/// Index entry of one stored document body.
struct ObjectRef {
    std::string digest; ///< sha256 of the body, also the object address
    std::string doc_id;
    std::string patient_id; ///< pseudonym once the corpus is anonymized
    std::string disease_id;
    DocumentFormat format = DocumentFormat::Narrative;
    std::string created_at;
    std::vector<std::string> tags; ///< "disease:asthma", "format:hl7_v2", ...

    bool operator==(const ObjectRef&) const = default;
};

/// Content-addressed archive: bodies under objects/<d0d1>/<digest>, plus an
/// index.jsonl manifest. Identical bodies share one object. The index is
/// rewritten atomically (temp file + rename) on flush.
class DocStore {
public:
    /// Opens (and creates, if needed) a store rooted at the directory;
    /// an existing index is loaded.
    explicit DocStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    /// Stores the body and registers an index entry. Duplicate doc_ids are
    /// rejected; duplicate bodies are stored once.
    ObjectRef put(const MedicalDocument& doc, std::string_view disease_id,
                  std::vector<std::string> tags);

    /// Reads a body back and re-hashes it; a digest mismatch throws.
    std::string get(const std::string& digest) const;

    const ObjectRef* find(const std::string& doc_id) const;

    /// Entries carrying every requested tag, ordered by doc_id.
    std::vector<ObjectRef> query_by_tags(const std::vector<std::string>& tags) const;

    const std::vector<ObjectRef>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Writes index.jsonl; call once after a batch of puts.
    void flush();

private:
    std::filesystem::path object_path(std::string_view digest) const;

    std::filesystem::path root_;
    std::vector<ObjectRef> entries_;
    std::map<std::string, std::size_t> by_doc_id_;
};

} // namespace clinistruct
