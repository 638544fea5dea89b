#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace clinistruct {

inline constexpr std::string_view kPipelineVersion = "0.1.0";

/// Fully resolved run settings. The CLI assembles this from flags, the
/// CLINISTRUCT_OUT environment variable and an optional config file, in that
/// precedence order.
struct RunConfig {
    std::optional<std::uint64_t> seed; ///< required, no default on purpose
    std::filesystem::path out_dir;     ///< required
    std::size_t patients_per_disease = 50;
    std::string noise_preset = "zero";
    std::filesystem::path noise_file;   ///< overrides the preset when set
    std::filesystem::path catalog_file; ///< empty = compiled-in catalog
    int jobs = 1;
    std::vector<std::string> diseases; ///< subset filter; empty = all
    bool anonymize = true;             ///< false = pass documents through unscrubbed
    bool lenient = false;              ///< parse warnings instead of hard failures

    void validate() const; ///< throws ValidationError with the offending field

    NoiseProfile noise() const;
    /// Embedded or loaded catalog, reduced to the disease subset.
    Catalog catalog() const;
};

/// Reads a config file (JSON object, same field names as the struct).
/// Unknown keys are rejected so that typos do not silently fall back to
/// defaults.
RunConfig load_run_config(const std::filesystem::path& path);

/// Artifact layout of one run directory.
struct RunPaths {
    explicit RunPaths(std::filesystem::path root);

    std::filesystem::path root;
    std::filesystem::path ledger;            ///< ledger.jsonl
    std::filesystem::path records;           ///< raw/records.jsonl
    std::filesystem::path raw_docs;          ///< raw/docs/
    std::filesystem::path raw_manifest;      ///< raw/manifest.json
    std::filesystem::path identity_map;      ///< private/identity_map.json
    std::filesystem::path scrubbed_docs;     ///< scrubbed/docs/
    std::filesystem::path scrubbed_manifest; ///< scrubbed/manifest.json
    std::filesystem::path store;             ///< store/
    std::filesystem::path parsed;            ///< parsed/parsed.jsonl
    std::filesystem::path assignments;       ///< extracted/assignments.jsonl
    std::filesystem::path tables;            ///< tables/<disease>/
    std::filesystem::path report_dir;        ///< report/
    std::filesystem::path report;            ///< report/report.json
    std::filesystem::path probe;             ///< probe.json

    std::filesystem::path megatable_csv(std::string_view disease_id) const;
    std::filesystem::path megatable_json(std::string_view disease_id) const;
};

/// Stage runner over the artifact tree. Stages communicate only through
/// files, so any stage can be re-run in isolation once its inputs exist.
class Pipeline {
public:
    explicit Pipeline(RunConfig config, std::ostream* log = nullptr);

    const RunConfig& config() const { return config_; }
    const RunPaths& paths() const { return paths_; }

    void run_generate();
    void run_scatter();
    void run_anonymize();
    void run_ingest();
    void run_extract();
    void run_assemble();
    void run_evaluate();
    void run_probe();
    void run_all();

    /// Stage names accepted by run(): generate, scatter, anonymize, ingest,
    /// extract, assemble, evaluate, probe, all.
    void run(std::string_view stage);
    static const std::vector<std::string>& stage_names();

private:
    void log(const std::string& message) const;

    RunConfig config_;
    RunPaths paths_;
    Catalog catalog_;
    std::ostream* log_ = nullptr;
};

} // namespace clinistruct
