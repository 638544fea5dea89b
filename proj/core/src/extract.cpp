#include "clinistruct/extract.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/patient.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace clinistruct {

using nlohmann::json;

int format_priority(DocumentFormat f) {
    switch (f) {
    case DocumentFormat::FhirJson: return 4;
    case DocumentFormat::Hl7V2: return 3;
    case DocumentFormat::CsvExtract: return 2;
    case DocumentFormat::Narrative: return 1;
    }
    return 0;
}

VariableExtractor::VariableExtractor(const ConceptRegistry& registry) : registry_(&registry) {}

std::vector<MatchedStatement> VariableExtractor::match_statements(
    const std::string& disease_id, const std::vector<CanonicalStatement>& statements) const {
    std::vector<MatchedStatement> out;
    for (const auto& st : statements) {
        const VariableSpec* var = nullptr;
        bool fuzzy = false;
        if (st.has_code()) {
            var = registry_->resolve_code(disease_id, st.code);
            if (var && st.category && *st.category != var->category) var = nullptr;
        }
        if (var == nullptr) {
            const auto hit = registry_->resolve_surface(disease_id, st.surface);
            // Shared surfaces without a code cannot be attributed; dropping
            // them is what makes ambiguity costly downstream.
            if (hit.ambiguous || hit.variable == nullptr) continue;
            if (st.category && st.category != hit.variable->category) continue;
            var = hit.variable;
            fuzzy = hit.fuzzy;
        }
        out.push_back(MatchedStatement{st, var->variable_id, fuzzy});
    }
    return out;
}

VariableAssignment VariableExtractor::resolve_variable(
    const VariableSpec& variable, const std::string& patient_id,
    const std::vector<MatchedStatement>& matched) const {
    VariableAssignment a;
    a.patient_id = patient_id;
    a.disease_id = variable.disease_id;
    a.variable_id = variable.variable_id;
    a.value = kMissingSentinel;

    if (matched.empty()) {
        a.resolution = resolution::kMissing;
        return a;
    }

    struct Candidate {
        const MatchedStatement* m;
        std::string text;
    };
    std::vector<Candidate> candidates;
    for (const auto& m : matched) {
        candidates.push_back(
            Candidate{&m, text::canonical_value_text(m.statement.value.to_text(),
                                                     registry_->units())});
    }

    if (variable.has_bounds()) {
        std::erase_if(candidates, [&](const Candidate& c) {
            if (c.m->statement.value.kind != ValueKind::Numeric) return false;
            const double n = c.m->statement.value.number;
            return n < variable.range_lo - 1e-9 || n > variable.range_hi + 1e-9;
        });
        if (candidates.empty()) {
            a.resolution = resolution::kPlausibility;
            return a;
        }
    }

    const auto distinct = [](const std::vector<Candidate>& cs) {
        std::set<std::string> values;
        for (const auto& c : cs) values.insert(c.text);
        return values;
    };
    a.candidates = distinct(candidates).size();

    std::vector<Candidate> pool = candidates;
    if (a.candidates == 1) {
        a.resolution = resolution::kUnique;
    } else {
        std::string max_ts;
        for (const auto& c : pool) max_ts = std::max(max_ts, c.m->statement.timestamp);
        std::erase_if(pool, [&](const Candidate& c) { return c.m->statement.timestamp != max_ts; });
        if (distinct(pool).size() == 1) {
            a.resolution = resolution::kCurrency;
        } else {
            int max_priority = 0;
            for (const auto& c : pool) {
                max_priority = std::max(max_priority, format_priority(c.m->statement.source.format));
            }
            std::erase_if(pool, [&](const Candidate& c) {
                return format_priority(c.m->statement.source.format) != max_priority;
            });
            a.resolution = distinct(pool).size() == 1 ? resolution::kPriority
                                                      : resolution::kLexicographic;
        }
    }

    a.value = *distinct(pool).begin(); // lexicographically smallest surviving value
    for (const auto& c : candidates) {
        if (c.text == a.value) ++a.support;
    }
    for (const auto& c : pool) {
        if (c.text == a.value) {
            a.source_doc = c.m->statement.source.doc_id;
            break;
        }
    }
    return a;
}

std::vector<VariableAssignment> VariableExtractor::extract_patient(
    const std::string& disease_id, const std::string& patient_id,
    const std::vector<CanonicalStatement>& statements) const {
    const DiseaseModule& module = registry_->catalog().disease(disease_id);
    const auto matched = match_statements(disease_id, statements);

    std::map<std::string, std::vector<MatchedStatement>> grouped;
    for (const auto& m : matched) grouped[m.variable_id].push_back(m);

    std::vector<VariableAssignment> out;
    out.reserve(module.variables.size());
    static const std::vector<MatchedStatement> kNone;
    for (const auto& v : module.variables) {
        const auto it = grouped.find(v.variable_id);
        out.push_back(resolve_variable(v, patient_id, it == grouped.end() ? kNone : it->second));
    }
    return out;
}

void write_assignments(const std::vector<VariableAssignment>& assignments,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& a : assignments) {
        json j;
        j["patient_id"] = a.patient_id;
        j["disease_id"] = a.disease_id;
        j["variable_id"] = a.variable_id;
        j["value"] = a.value;
        j["support"] = a.support;
        j["candidates"] = a.candidates;
        j["resolution"] = a.resolution;
        j["source_doc"] = a.source_doc;
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("short write to " + path.string());
}

std::vector<VariableAssignment> read_assignments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<VariableAssignment> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            VariableAssignment a;
            a.patient_id = j.at("patient_id").get<std::string>();
            a.disease_id = j.at("disease_id").get<std::string>();
            a.variable_id = j.at("variable_id").get<std::string>();
            a.value = j.at("value").get<std::string>();
            a.support = j.at("support").get<std::size_t>();
            a.candidates = j.at("candidates").get<std::size_t>();
            a.resolution = j.at("resolution").get<std::string>();
            a.source_doc = j.at("source_doc").get<std::string>();
            out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace clinistruct
