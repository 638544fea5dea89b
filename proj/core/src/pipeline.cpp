#include "clinistruct/pipeline.hpp"

#include "clinistruct/anonymize.hpp"
#include "clinistruct/docstore.hpp"
#include "clinistruct/document.hpp"
#include "clinistruct/errors.hpp"
#include "clinistruct/eval.hpp"
#include "clinistruct/extract.hpp"
#include "clinistruct/generator.hpp"
#include "clinistruct/ingest.hpp"
#include "clinistruct/megatable.hpp"
#include "clinistruct/parallel.hpp"
#include "clinistruct/scatter.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace clinistruct {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

void RunConfig::validate() const {
    if (!seed) throw ValidationError("config: seed is required");
    if (out_dir.empty()) throw ValidationError("config: out_dir is required");
    if (patients_per_disease == 0) {
        throw ValidationError("config: patients_per_disease must be positive");
    }
    if (patients_per_disease > 10000) {
        throw ValidationError("config: patients_per_disease above the desk-scale cap of 10000");
    }
    if (jobs < 1) throw ValidationError("config: jobs must be at least 1");
    if (noise_file.empty()) {
        NoiseProfile::preset(noise_preset); // throws on unknown preset names
    }
    const Catalog full = catalog_file.empty() ? default_catalog()
                                              : load_disease_catalog(catalog_file);
    for (const auto& id : diseases) {
        if (full.find_disease(id) == nullptr) {
            throw ValidationError("config: unknown disease " + id);
        }
    }
}

NoiseProfile RunConfig::noise() const {
    if (!noise_file.empty()) return NoiseProfile::load(noise_file);
    return NoiseProfile::preset(noise_preset);
}

Catalog RunConfig::catalog() const {
    Catalog full = catalog_file.empty() ? default_catalog() : load_disease_catalog(catalog_file);
    if (diseases.empty()) return full;
    Catalog subset;
    subset.catalog_version = full.catalog_version;
    subset.relations = full.relations;
    for (const auto& id : diseases) {
        const DiseaseModule* module = full.find_disease(id);
        if (module == nullptr) throw ValidationError("config: unknown disease " + id);
        subset.diseases.push_back(*module);
    }
    return subset;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(path.string() + ": config must be a JSON object");

    static const std::set<std::string> known = {
        "seed",       "out_dir",      "patients_per_disease", "noise_preset", "noise_file",
        "catalog_file", "jobs", "diseases", "anonymize", "lenient"};
    for (const auto& [key, value] : doc.items()) {
        if (known.count(key) == 0) {
            throw ValidationError(path.string() + ": unknown config key \"" + key + "\"");
        }
    }

    RunConfig config;
    try {
        if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("out_dir")) {
            config.out_dir = doc.at("out_dir").get<std::string>();
        }
        if (doc.contains("patients_per_disease")) {
            config.patients_per_disease = doc.at("patients_per_disease").get<std::size_t>();
        }
        if (doc.contains("noise_preset")) {
            config.noise_preset = doc.at("noise_preset").get<std::string>();
        }
        if (doc.contains("noise_file")) {
            config.noise_file = doc.at("noise_file").get<std::string>();
        }
        if (doc.contains("catalog_file")) {
            config.catalog_file = doc.at("catalog_file").get<std::string>();
        }
        if (doc.contains("jobs")) config.jobs = doc.at("jobs").get<int>();
        if (doc.contains("diseases")) {
            for (const auto& d : doc.at("diseases")) {
                config.diseases.push_back(d.get<std::string>());
            }
        }
        if (doc.contains("anonymize")) config.anonymize = doc.at("anonymize").get<bool>();
        if (doc.contains("lenient")) config.lenient = doc.at("lenient").get<bool>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return config;
}

RunPaths::RunPaths(std::filesystem::path r) : root(std::move(r)) {
    ledger = root / "ledger.jsonl";
    records = root / "raw" / "records.jsonl";
    raw_docs = root / "raw" / "docs";
    raw_manifest = root / "raw" / "manifest.json";
    identity_map = root / "private" / "identity_map.json";
    scrubbed_docs = root / "scrubbed" / "docs";
    scrubbed_manifest = root / "scrubbed" / "manifest.json";
    store = root / "store";
    parsed = root / "parsed" / "parsed.jsonl";
    assignments = root / "extracted" / "assignments.jsonl";
    tables = root / "tables";
    report_dir = root / "report";
    report = report_dir / "report.json";
    probe = root / "probe.json";
}

std::filesystem::path RunPaths::megatable_csv(std::string_view disease_id) const {
    return tables / disease_id / "megatable.csv";
}

std::filesystem::path RunPaths::megatable_json(std::string_view disease_id) const {
    return tables / disease_id / "megatable.json";
}

Pipeline::Pipeline(RunConfig config, std::ostream* log)
    : config_(std::move(config)), paths_(config_.out_dir), catalog_(config_.catalog()),
      log_(log) {
    config_.validate();
}

void Pipeline::log(const std::string& message) const {
    if (log_ != nullptr) *log_ << message << "\n";
}

void Pipeline::run_generate() {
    std::filesystem::create_directories(paths_.records.parent_path());
    const auto records =
        generate_corpus(catalog_, config_.patients_per_disease, *config_.seed, config_.jobs);
    const GroundTruthLedger ledger = build_ledger(records);
    write_ground_truth_ledger(ledger, paths_.ledger);
    write_patient_records(records, paths_.records);
    log("generate: " + std::to_string(records.size()) + " patients, " +
        std::to_string(ledger.entries.size()) + " ledger rows");
}

void Pipeline::run_scatter() {
    const auto records = read_patient_records(paths_.records);
    const DocumentScatterer scatterer(catalog_, config_.noise());

    std::vector<std::vector<MedicalDocument>> docs(records.size());
    parallel_for(records.size(), config_.jobs, [&](std::size_t i) {
        docs[i] = scatterer.scatter_patient(records[i], *config_.seed);
    });

    std::filesystem::create_directories(paths_.raw_docs);
    CorpusManifest manifest;
    std::size_t total = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& doc : docs[i]) {
            manifest.documents.push_back(
                materialize_document(doc, records[i].disease_id, paths_.raw_docs));
            ++total;
        }
    }
    write_manifest(manifest, paths_.raw_manifest);
    log("scatter: " + std::to_string(total) + " documents");
}

void Pipeline::run_anonymize() {
    const auto records = read_patient_records(paths_.records);
    IdentityMap ids;
    if (config_.anonymize) {
        ids = build_identity_map(records, *config_.seed);
    } else {
        for (const auto& r : records) ids.forward[r.patient_id] = r.patient_id;
    }
    std::filesystem::create_directories(paths_.identity_map.parent_path());
    write_identity_map(ids, paths_.identity_map);

    const CorpusManifest manifest = read_manifest(paths_.raw_manifest);

    std::vector<std::string> scrubbed(manifest.documents.size());
    std::vector<std::string> bodies(manifest.documents.size());
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        bodies[i] = read_file(paths_.raw_docs / manifest.documents[i].path);
    }
    if (config_.anonymize) {
        const PiiScrubber scrubber(records, ids);
        parallel_for(manifest.documents.size(), config_.jobs, [&](std::size_t i) {
            scrubbed[i] = scrubber.scrub(bodies[i]);
            if (const auto leak = scrubber.find_identifier(scrubbed[i])) {
                throw ValidationError("identifier \"" + *leak + "\" survived scrubbing in " +
                                      manifest.documents[i].doc_id);
            }
        });
    } else {
        scrubbed = std::move(bodies);
    }

    std::filesystem::create_directories(paths_.scrubbed_docs);
    CorpusManifest out;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const ManifestEntry& entry = manifest.documents[i];
        MedicalDocument doc;
        doc.doc_id = entry.doc_id;
        doc.patient_id = ids.pseudonym(entry.patient_id);
        doc.format = entry.format;
        doc.body = std::move(scrubbed[i]);
        doc.created_at = entry.created_at;
        doc.covered_event_ids = entry.covered_event_ids;
        out.documents.push_back(materialize_document(doc, entry.disease_id, paths_.scrubbed_docs));
    }
    write_manifest(out, paths_.scrubbed_manifest);
    log("anonymize: " + std::to_string(out.documents.size()) + " documents scrubbed, " +
        std::to_string(ids.forward.size()) + " pseudonyms");
}

void Pipeline::run_ingest() {
    const CorpusManifest manifest = read_manifest(paths_.scrubbed_manifest);
    DocStore store(paths_.store);

    std::vector<std::string> bodies(manifest.documents.size());
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        bodies[i] = read_file(paths_.scrubbed_docs / manifest.documents[i].path);
    }

    std::vector<ParsedDocument> parsed(manifest.documents.size());
    parallel_for(manifest.documents.size(), config_.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.documents[i];
        const DocumentFormat detected = detect_format(bodies[i]);
        if (detected != entry.format) {
            throw ValidationError(entry.doc_id + ": detected " +
                                  std::string(format_name(detected)) + ", manifest says " +
                                  std::string(format_name(entry.format)));
        }
        parsed[i] = parse_document(bodies[i], entry.doc_id, entry.patient_id,
                                   config_.lenient ? ParseMode::Lenient : ParseMode::Strict);
    });

    std::vector<CanonicalStatement> statements;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const ManifestEntry& entry = manifest.documents[i];
        MedicalDocument doc;
        doc.doc_id = entry.doc_id;
        doc.patient_id = entry.patient_id;
        doc.format = entry.format;
        doc.body = std::move(bodies[i]);
        doc.created_at = entry.created_at;
        store.put(doc, entry.disease_id,
                  {"disease:" + entry.disease_id,
                   "format:" + std::string(format_name(entry.format)),
                   "patient:" + entry.patient_id});
        statements.insert(statements.end(), parsed[i].statements.begin(),
                          parsed[i].statements.end());
    }
    store.flush();
    std::filesystem::create_directories(paths_.parsed.parent_path());
    write_statements(statements, paths_.parsed);
    log("ingest: " + std::to_string(store.size()) + " documents stored, " +
        std::to_string(statements.size()) + " statements");
}

void Pipeline::run_extract() {
    const CorpusManifest manifest = read_manifest(paths_.scrubbed_manifest);
    std::map<std::string, std::string> disease_of; // pseudonym -> disease
    for (const auto& entry : manifest.documents) {
        disease_of.emplace(entry.patient_id, entry.disease_id);
    }

    const auto statements = read_statements(paths_.parsed);
    std::map<std::string, std::vector<CanonicalStatement>> by_patient;
    for (const auto& st : statements) by_patient[st.patient_id].push_back(st);

    const ConceptRegistry registry(catalog_);
    const VariableExtractor extractor(registry);

    std::vector<VariableAssignment> assignments;
    static const std::vector<CanonicalStatement> kNone;
    for (const auto& [pseudonym, disease_id] : disease_of) {
        const auto it = by_patient.find(pseudonym);
        const auto patient_assignments =
            extractor.extract_patient(disease_id, pseudonym, it == by_patient.end() ? kNone
                                                                                    : it->second);
        assignments.insert(assignments.end(), patient_assignments.begin(),
                           patient_assignments.end());
    }
    std::filesystem::create_directories(paths_.assignments.parent_path());
    write_assignments(assignments, paths_.assignments);
    log("extract: " + std::to_string(assignments.size()) + " assignments for " +
        std::to_string(disease_of.size()) + " patients");
}

void Pipeline::run_assemble() {
    const auto assignments = read_assignments(paths_.assignments);
    for (const auto& module : catalog_.diseases) {
        const MegaTable table = assemble_megatable(module, assignments);
        std::filesystem::create_directories(paths_.tables / module.disease_id);
        write_megatable_csv(table, paths_.megatable_csv(module.disease_id));
        write_megatable_json(table, paths_.megatable_json(module.disease_id));
        log("assemble: " + module.disease_id + " " + std::to_string(table.rows.size()) + " rows x " +
            std::to_string(table.columns.size()) + " columns");
    }
}

void Pipeline::run_evaluate() {
    const GroundTruthLedger ledger = read_ground_truth_ledger(paths_.ledger);
    const IdentityMap ids = read_identity_map(paths_.identity_map);
    const auto assignments = read_assignments(paths_.assignments);

    const EvalReport report = evaluate_assignments(catalog_, ledger, ids, assignments,
                                                   *config_.seed);
    std::filesystem::create_directories(paths_.report_dir);
    write_report_json(report, paths_.report);
    write_accuracy_csv(report, paths_.report_dir / "fig5_accuracy.csv");
    write_outlier_csv(report, paths_.report_dir / "fig6_outliers.csv");
    write_effect_csv(report, paths_.report_dir / "fig7_effect.csv");

    std::ostringstream line;
    line << "evaluate: overall " << report.overall_accuracy << "% over "
         << report.total_comparisons << " comparisons, " << report.outliers.size() << " outliers";
    log(line.str());
}

// Serial re-parse and re-extract of the stored corpus under a wall clock.
// Single-threaded on purpose so the numbers are comparable across hosts.
namespace {

json measure_throughput(const RunConfig& config, const RunPaths& paths,
                        const Catalog& catalog) {
    json t;
    t["threads"] = 1;
    t["documents"] = 0;
    t["parse_seconds"] = 0.0;
    t["documents_per_second"] = 0.0;
    t["statements"] = 0;
    t["cells"] = 0;
    t["extract_seconds"] = 0.0;
    t["cells_per_second"] = 0.0;
    if (!std::filesystem::exists(paths.scrubbed_manifest)) return t;

    const CorpusManifest manifest = read_manifest(paths.scrubbed_manifest);
    std::vector<std::string> bodies;
    bodies.reserve(manifest.documents.size());
    for (const auto& entry : manifest.documents) {
        bodies.push_back(read_file(paths.scrubbed_docs / entry.path));
    }
    std::map<std::string, std::string> disease_of; // pseudonym -> disease
    for (const auto& entry : manifest.documents) {
        disease_of.emplace(entry.patient_id, entry.disease_id);
    }
    const ParseMode mode = config.lenient ? ParseMode::Lenient : ParseMode::Strict;

    const auto parse_start = std::chrono::steady_clock::now();
    std::vector<CanonicalStatement> statements;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const ManifestEntry& entry = manifest.documents[i];
        auto parsed = parse_document(bodies[i], entry.doc_id, entry.patient_id, mode);
        statements.insert(statements.end(),
                          std::make_move_iterator(parsed.statements.begin()),
                          std::make_move_iterator(parsed.statements.end()));
    }
    const auto parse_end = std::chrono::steady_clock::now();

    const ConceptRegistry registry(catalog);
    const VariableExtractor extractor(registry);
    const auto extract_start = std::chrono::steady_clock::now();
    std::map<std::string, std::vector<CanonicalStatement>> by_patient;
    for (auto& st : statements) by_patient[st.patient_id].push_back(std::move(st));
    std::size_t cells = 0;
    static const std::vector<CanonicalStatement> kNone;
    for (const auto& [pseudonym, disease_id] : disease_of) {
        const auto it = by_patient.find(pseudonym);
        cells += extractor
                     .extract_patient(disease_id, pseudonym,
                                      it == by_patient.end() ? kNone : it->second)
                     .size();
    }
    const auto extract_end = std::chrono::steady_clock::now();

    const auto seconds = [](auto from, auto to) {
        return std::chrono::duration<double>(to - from).count();
    };
    const double parse_s = seconds(parse_start, parse_end);
    const double extract_s = seconds(extract_start, extract_end);
    const double n_docs = static_cast<double>(manifest.documents.size());
    t["documents"] = manifest.documents.size();
    t["parse_seconds"] = parse_s;
    t["documents_per_second"] = n_docs / std::max(parse_s, 1e-9);
    t["statements"] = statements.size();
    t["cells"] = cells;
    t["extract_seconds"] = extract_s;
    t["cells_per_second"] = static_cast<double>(cells) / std::max(extract_s, 1e-9);
    return t;
}

} // namespace

void Pipeline::run_probe() {
    json probe;
    probe["version"] = std::string(kPipelineVersion);
    probe["seed"] = *config_.seed;
    probe["out_dir"] = paths_.root.string();
    probe["patients_per_disease"] = config_.patients_per_disease;
    probe["noise_preset"] = config_.noise_file.empty() ? config_.noise_preset : "file";
    probe["jobs"] = config_.jobs;
    probe["anonymize"] = config_.anonymize;
    probe["lenient"] = config_.lenient;
    probe["catalog_version"] = catalog_.catalog_version;
    probe["diseases"] = catalog_.diseases.size();
    probe["variables"] = catalog_.total_variables();

    json artifacts;
    artifacts["ledger"] = std::filesystem::exists(paths_.ledger);
    artifacts["records"] = std::filesystem::exists(paths_.records);
    artifacts["raw_manifest"] = std::filesystem::exists(paths_.raw_manifest);
    artifacts["identity_map"] = std::filesystem::exists(paths_.identity_map);
    artifacts["scrubbed_manifest"] = std::filesystem::exists(paths_.scrubbed_manifest);
    artifacts["store_index"] = std::filesystem::exists(paths_.store / "index.jsonl");
    artifacts["parsed"] = std::filesystem::exists(paths_.parsed);
    artifacts["assignments"] = std::filesystem::exists(paths_.assignments);
    artifacts["report"] = std::filesystem::exists(paths_.report);
    probe["artifacts"] = artifacts;
    probe["throughput"] = measure_throughput(config_, paths_, catalog_);

    std::filesystem::create_directories(paths_.root);
    std::ofstream out(paths_.probe, std::ios::binary);
    if (!out) throw IoError("cannot write " + paths_.probe.string());
    out << probe.dump(2) << "\n";
    if (!out) throw IoError("short write to " + paths_.probe.string());
    log("probe: " + paths_.probe.string());
}

void Pipeline::run_all() {
    run_generate();
    run_scatter();
    run_anonymize();
    run_ingest();
    run_extract();
    run_assemble();
    run_evaluate();
    run_probe();
}

const std::vector<std::string>& Pipeline::stage_names() {
    static const std::vector<std::string> names = {"generate", "scatter",  "anonymize",
                                                   "ingest",   "extract",  "assemble",
                                                   "evaluate", "probe",    "all"};
    return names;
}

void Pipeline::run(std::string_view stage) {
    if (stage == "generate") return run_generate();
    if (stage == "scatter") return run_scatter();
    if (stage == "anonymize") return run_anonymize();
    if (stage == "ingest") return run_ingest();
    if (stage == "extract") return run_extract();
    if (stage == "assemble") return run_assemble();
    if (stage == "evaluate") return run_evaluate();
    if (stage == "probe") return run_probe();
    if (stage == "all") return run_all();
    throw ValidationError("unknown stage \"" + std::string(stage) + "\"");
}

} // namespace clinistruct
