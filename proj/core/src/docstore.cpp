#include "clinistruct/docstore.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/hash.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace clinistruct {

using nlohmann::json;

namespace {

constexpr const char* kIndexName = "index.jsonl";

} // namespace

DocStore::DocStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "objects");
    const auto index = root_ / kIndexName;
    if (!std::filesystem::exists(index)) return;

    std::ifstream in(index, std::ios::binary);
    if (!in) throw IoError("cannot read " + index.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(index.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        ObjectRef ref;
        ref.digest = doc.at("digest").get<std::string>();
        ref.doc_id = doc.at("doc_id").get<std::string>();
        ref.patient_id = doc.at("patient_id").get<std::string>();
        ref.disease_id = doc.at("disease_id").get<std::string>();
        const auto format = format_from_name(doc.at("format").get<std::string>());
        if (!format) {
            throw ParseError(index.string() + ":" + std::to_string(line_no) +
                             ": unknown format " + doc.at("format").get<std::string>());
        }
        ref.format = *format;
        ref.created_at = doc.at("created_at").get<std::string>();
        for (const auto& t : doc.at("tags")) ref.tags.push_back(t.get<std::string>());
        by_doc_id_.emplace(ref.doc_id, entries_.size());
        entries_.push_back(std::move(ref));
    }
}

std::filesystem::path DocStore::object_path(std::string_view digest) const {
    return root_ / "objects" / std::string(digest.substr(0, 2)) / std::string(digest);
}

ObjectRef DocStore::put(const MedicalDocument& doc, std::string_view disease_id,
                        std::vector<std::string> tags) {
    if (by_doc_id_.count(doc.doc_id) > 0) {
        throw ValidationError("document " + doc.doc_id + " is already stored");
    }
    ObjectRef ref;
    ref.digest = sha256_hex(doc.body);
    ref.doc_id = doc.doc_id;
    ref.patient_id = doc.patient_id;
    ref.disease_id = std::string(disease_id);
    ref.format = doc.format;
    ref.created_at = doc.created_at;
    std::sort(tags.begin(), tags.end());
    ref.tags = std::move(tags);

    const auto path = object_path(ref.digest);
    if (!std::filesystem::exists(path)) {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(doc.body.data(), static_cast<std::streamsize>(doc.body.size()));
        if (!out) throw IoError("short write to " + path.string());
    }

    by_doc_id_.emplace(ref.doc_id, entries_.size());
    entries_.push_back(ref);
    return ref;
}

std::string DocStore::get(const std::string& digest) const {
    const auto path = object_path(digest);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("no object " + digest + " in " + root_.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string body = buf.str();
    if (sha256_hex(body) != digest) {
        throw ValidationError("object " + digest + " is corrupt");
    }
    return body;
}

const ObjectRef* DocStore::find(const std::string& doc_id) const {
    const auto it = by_doc_id_.find(doc_id);
    return it == by_doc_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<ObjectRef> DocStore::query_by_tags(const std::vector<std::string>& tags) const {
    std::vector<ObjectRef> out;
    for (const auto& ref : entries_) {
        const bool all = std::all_of(tags.begin(), tags.end(), [&](const std::string& t) {
            return std::find(ref.tags.begin(), ref.tags.end(), t) != ref.tags.end();
        });
        if (all) out.push_back(ref);
    }
    std::sort(out.begin(), out.end(),
              [](const ObjectRef& a, const ObjectRef& b) { return a.doc_id < b.doc_id; });
    return out;
}

void DocStore::flush() {
    const auto index = root_ / kIndexName;
    const auto tmp = root_ / (std::string(kIndexName) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        for (const auto& ref : entries_) {
            json doc;
            doc["digest"] = ref.digest;
            doc["doc_id"] = ref.doc_id;
            doc["patient_id"] = ref.patient_id;
            doc["disease_id"] = ref.disease_id;
            doc["format"] = std::string(format_name(ref.format));
            doc["created_at"] = ref.created_at;
            doc["tags"] = ref.tags;
            out << doc.dump() << "\n";
        }
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, index);
}

} // namespace clinistruct
