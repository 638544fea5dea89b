#include "clinistruct/errors.hpp"
#include "clinistruct/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;

void print_error(const std::string& type, const std::string& message) {
    std::cerr << json{{"error", json{{"type", type}, {"message", message}}}}.dump() << "\n";
}

std::string canonical_stage(const std::string& stage) {
    if (stage == "gen") return "generate";
    if (stage == "eval") return "evaluate";
    return stage;
}

std::vector<std::string> accepted_stages() {
    auto names = clinistruct::Pipeline::stage_names();
    names.push_back("gen");
    names.push_back("eval");
    return names;
}

std::string stage_help() {
    std::string out = "Pipeline stage to run (";
    const auto& names = clinistruct::Pipeline::stage_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += names[i];
        if (i + 1 < names.size()) out += ", ";
    }
    out += "; gen and eval are accepted shorthands)";
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic clinical-records pipeline: synthesize a patient corpus, "
                 "fragment it into mixed-format documents, de-identify, parse, extract "
                 "variables into per-disease tables and score them against ground truth."};

    std::string stage = "all";
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string config_file;
    std::size_t patients = 0;
    std::string noise_preset;
    std::string noise_file;
    std::string catalog_file;
    int jobs = 0;
    std::vector<std::string> diseases;
    bool quiet = false;

    app.add_option("stage", stage, stage_help())->check(CLI::IsMember(accepted_stages()));
    const auto* seed_opt =
        app.add_option("--seed", seed, "Run seed; every artifact is a pure function of it");
    const auto* out_opt =
        app.add_option("--out", out_dir,
                       "Output directory (falls back to $CLINISTRUCT_OUT, then the config file)");
    app.add_option("--config", config_file, "JSON config file; flags override its values")
        ->check(CLI::ExistingFile);
    const auto* patients_opt =
        app.add_option("--patients", patients, "Patients generated per disease (default 50)");
    const auto* noise_opt = app.add_option("--noise", noise_preset,
                                           "Noise preset: zero, mild or ambiguity (default zero)");
    const auto* noise_file_opt =
        app.add_option("--noise-file", noise_file, "Noise profile JSON; overrides --noise")
            ->check(CLI::ExistingFile);
    const auto* catalog_opt =
        app.add_option("--catalog", catalog_file, "Disease catalog JSON (default: built-in)")
            ->check(CLI::ExistingFile);
    const auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads (default 1)");
    const auto* disease_opt = app.add_option(
        "--disease", diseases, "Restrict the run to these disease ids (repeatable)");
    bool no_anonymize = false;
    bool lenient = false;
    const auto* no_anon_opt = app.add_flag("--no-anonymize", no_anonymize,
                                           "Keep raw identifiers (testing only)");
    const auto* lenient_opt =
        app.add_flag("--lenient", lenient, "Collect parse warnings instead of failing");
    app.add_flag("--quiet", quiet, "Suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        print_error("usage", e.what());
        return app.exit(e, std::cerr, std::cerr);
    }

    try {
        clinistruct::RunConfig config;
        if (!config_file.empty()) config = clinistruct::load_run_config(config_file);

        // Precedence: flags beat the environment, the environment beats the
        // config file.
        if (const char* env = std::getenv("CLINISTRUCT_OUT"); env != nullptr && *env != '\0') {
            config.out_dir = env;
        }
        if (seed_opt->count() > 0) config.seed = seed;
        if (out_opt->count() > 0) config.out_dir = out_dir;
        if (patients_opt->count() > 0) config.patients_per_disease = patients;
        if (noise_opt->count() > 0) config.noise_preset = noise_preset;
        if (noise_file_opt->count() > 0) config.noise_file = noise_file;
        if (catalog_opt->count() > 0) config.catalog_file = catalog_file;
        if (jobs_opt->count() > 0) config.jobs = jobs;
        if (disease_opt->count() > 0) config.diseases = diseases;
        if (no_anon_opt->count() > 0) config.anonymize = !no_anonymize;
        if (lenient_opt->count() > 0) config.lenient = lenient;

        config.validate();
        clinistruct::Pipeline pipeline(std::move(config), quiet ? nullptr : &std::cout);
        pipeline.run(canonical_stage(stage));
        return 0;
    } catch (const clinistruct::ValidationError& e) {
        print_error("validation", e.what());
    } catch (const clinistruct::ParseError& e) {
        print_error("parse", e.what());
    } catch (const clinistruct::NotFoundError& e) {
        print_error("not_found", e.what());
    } catch (const clinistruct::IoError& e) {
        print_error("io", e.what());
    } catch (const clinistruct::Error& e) {
        print_error("error", e.what());
    } catch (const std::exception& e) {
        print_error("internal", e.what());
    }
    return 1;
}
