#include "clinistruct/patient.hpp"

#include "clinistruct/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace clinistruct {

using nlohmann::json;

namespace {

json value_to_json(const Value& v) {
    json j;
    j["kind"] = std::string(value_kind_name(v.kind));
    if (v.kind == ValueKind::Numeric) {
        j["number"] = v.number;
        if (!v.unit.empty()) j["unit"] = v.unit;
    } else {
        j["text"] = v.text;
    }
    return j;
}

Value value_from_json(const json& j) {
    Value v;
    const auto kind = value_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("value: unknown kind " + j.at("kind").get<std::string>());
    v.kind = *kind;
    if (v.kind == ValueKind::Numeric) {
        v.number = j.at("number").get<double>();
        if (j.contains("unit")) v.unit = j["unit"].get<std::string>();
    } else {
        v.text = j.at("text").get<std::string>();
    }
    return v;
}

json event_to_json(const ClinicalEvent& e) {
    json j;
    j["event_id"] = e.event_id;
    j["variable_id"] = e.variable_id;
    j["timestamp"] = e.timestamp;
    j["category"] = std::string(category_name(e.category));
    j["code_system"] = e.code.system;
    j["code"] = e.code.code;
    j["display"] = e.display;
    j["value"] = value_to_json(e.value);
    return j;
}

ClinicalEvent event_from_json(const json& j, const std::string& patient_id) {
    ClinicalEvent e;
    e.event_id = j.at("event_id").get<std::string>();
    e.patient_id = patient_id;
    e.variable_id = j.at("variable_id").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::string>();
    const auto cat = category_from_name(j.at("category").get<std::string>());
    if (!cat) throw ParseError("event: unknown category " + j.at("category").get<std::string>());
    e.category = *cat;
    e.code.system = j.at("code_system").get<std::string>();
    e.code.code = j.at("code").get<std::string>();
    e.display = j.at("display").get<std::string>();
    e.value = value_from_json(j.at("value"));
    return e;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return in;
}

} // namespace

std::map<std::pair<std::string, std::string>, std::size_t> GroundTruthLedger::index() const {
    std::map<std::pair<std::string, std::string>, std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const auto [it, inserted] = out.emplace(std::make_pair(e.patient_id, e.variable_id), i);
        if (!inserted)
            throw ValidationError("ledger: duplicate entry for (" + e.patient_id + ", " +
                                  e.variable_id + ")");
    }
    return out;
}

void write_ground_truth_ledger(const GroundTruthLedger& ledger, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& e : ledger.entries) {
        json j;
        j["patient_id"] = e.patient_id;
        j["disease_id"] = e.disease_id;
        j["variable_id"] = e.variable_id;
        j["true_value"] = e.true_value;
        j["event_ids"] = e.event_ids;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to " + path.string());
}

GroundTruthLedger read_ground_truth_ledger(const std::filesystem::path& path) {
    auto in = open_in(path);
    GroundTruthLedger ledger;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw ParseError("ledger " + path.string() + ":" + std::to_string(lineno) + ": " +
                             ex.what());
        }
        LedgerEntry e;
        e.patient_id = j.at("patient_id").get<std::string>();
        e.disease_id = j.at("disease_id").get<std::string>();
        e.variable_id = j.at("variable_id").get<std::string>();
        e.true_value = j.at("true_value").get<std::string>();
        e.event_ids = j.at("event_ids").get<std::vector<std::string>>();
        ledger.entries.push_back(std::move(e));
    }
    return ledger;
}

void write_patient_records(const std::vector<PatientRecord>& records,
                           const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& r : records) {
        json j;
        j["patient_id"] = r.patient_id;
        j["disease_id"] = r.disease_id;
        j["demographics"] = {
            {"given_name", r.demographics.given_name}, {"family_name", r.demographics.family_name},
            {"birth_date", r.demographics.birth_date}, {"sex", r.demographics.sex},
            {"street", r.demographics.street},         {"city", r.demographics.city},
        };
        json events = json::array();
        for (const auto& e : r.events) events.push_back(event_to_json(e));
        j["events"] = std::move(events);
        j["truth"] = r.truth;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to " + path.string());
}

std::vector<PatientRecord> read_patient_records(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<PatientRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw ParseError("records " + path.string() + ":" + std::to_string(lineno) + ": " +
                             ex.what());
        }
        PatientRecord r;
        r.patient_id = j.at("patient_id").get<std::string>();
        r.disease_id = j.at("disease_id").get<std::string>();
        const json& jd = j.at("demographics");
        r.demographics.given_name = jd.at("given_name").get<std::string>();
        r.demographics.family_name = jd.at("family_name").get<std::string>();
        r.demographics.birth_date = jd.at("birth_date").get<std::string>();
        r.demographics.sex = jd.at("sex").get<std::string>();
        r.demographics.street = jd.at("street").get<std::string>();
        r.demographics.city = jd.at("city").get<std::string>();
        for (const auto& je : j.at("events")) r.events.push_back(event_from_json(je, r.patient_id));
        r.truth = j.at("truth").get<std::map<std::string, std::string>>();
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace clinistruct
