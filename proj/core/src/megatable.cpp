#include "clinistruct/megatable.hpp"

#include "clinistruct/csv.hpp"
#include "clinistruct/errors.hpp"
#include "clinistruct/patient.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace clinistruct {

using nlohmann::json;

namespace {

/// "P_12" -> 12; pseudonyms sort by rank, not lexicographically.
long pseudonym_rank(const std::string& id) {
    if (id.rfind("P_", 0) == 0) {
        try {
            return std::stol(id.substr(2));
        } catch (const std::exception&) {
        }
    }
    return -1;
}

} // namespace

std::size_t MegaTable::column_index(std::string_view variable_id) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].variable_id == variable_id) return i;
    }
    throw NotFoundError("megatable for " + disease_id + " has no column " +
                        std::string(variable_id));
}

const std::string& MegaTable::cell(std::size_t row, std::string_view variable_id) const {
    return rows.at(row).values.at(column_index(variable_id));
}

MegaTable assemble_megatable(const DiseaseModule& module,
                             const std::vector<VariableAssignment>& assignments) {
    MegaTable table;
    table.disease_id = module.disease_id;
    std::map<std::string, std::size_t> column_of;
    for (const auto& v : module.variables) {
        column_of.emplace(v.variable_id, table.columns.size());
        table.columns.push_back(MegaTable::Column{v.variable_id, v.display});
    }

    std::map<std::string, std::vector<std::string>> by_patient;
    for (const auto& a : assignments) {
        if (a.disease_id != module.disease_id) continue;
        const auto col = column_of.find(a.variable_id);
        if (col == column_of.end()) {
            throw ValidationError("assignment for unknown variable " + a.variable_id);
        }
        auto [it, inserted] = by_patient.try_emplace(
            a.patient_id, std::vector<std::string>(table.columns.size(), kMissingSentinel));
        it->second[col->second] = a.value;
    }

    for (auto& [patient, values] : by_patient) {
        table.rows.push_back(MegaTable::Row{patient, std::move(values)});
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const MegaTable::Row& a, const MegaTable::Row& b) {
                  const long ra = pseudonym_rank(a.anonymized_id);
                  const long rb = pseudonym_rank(b.anonymized_id);
                  if (ra != rb) return ra < rb;
                  return a.anonymized_id < b.anonymized_id;
              });
    return table;
}

void write_megatable_csv(const MegaTable& table, const std::filesystem::path& path) {
    std::string body;
    std::vector<std::string> header;
    header.push_back("Anonymized ID");
    for (const auto& c : table.columns) header.push_back(c.display);
    csv::append_row(body, header);
    for (const auto& row : table.rows) {
        std::vector<std::string> fields;
        fields.push_back(row.anonymized_id);
        fields.insert(fields.end(), row.values.begin(), row.values.end());
        csv::append_row(body, fields);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("short write to " + path.string());
}

void write_megatable_json(const MegaTable& table, const std::filesystem::path& path) {
    json doc;
    doc["disease_id"] = table.disease_id;
    json columns = json::array();
    for (const auto& c : table.columns) {
        columns.push_back(json{{"variable_id", c.variable_id}, {"display", c.display}});
    }
    doc["columns"] = columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back(json{{"anonymized_id", row.anonymized_id}, {"values", row.values}});
    }
    doc["rows"] = rows;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

MegaTable read_megatable_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    MegaTable table;
    try {
        table.disease_id = doc.at("disease_id").get<std::string>();
        for (const auto& c : doc.at("columns")) {
            table.columns.push_back(MegaTable::Column{c.at("variable_id").get<std::string>(),
                                                      c.at("display").get<std::string>()});
        }
        for (const auto& r : doc.at("rows")) {
            MegaTable::Row row;
            row.anonymized_id = r.at("anonymized_id").get<std::string>();
            for (const auto& v : r.at("values")) row.values.push_back(v.get<std::string>());
            if (row.values.size() != table.columns.size()) {
                throw ParseError(path.string() + ": row " + row.anonymized_id +
                                 " has the wrong width");
            }
            table.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return table;
}

MegaTable read_megatable_csv(const DiseaseModule& module, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rows = csv::parse(buf.str());
    if (rows.empty()) throw ParseError(path.string() + ": empty table");

    MegaTable table;
    table.disease_id = module.disease_id;
    const auto& header = rows.front().fields;
    if (header.empty() || header.front() != "Anonymized ID") {
        throw ParseError(path.string() + ": missing Anonymized ID column");
    }
    if (header.size() != module.variables.size() + 1) {
        throw ParseError(path.string() + ": expected " +
                         std::to_string(module.variables.size() + 1) + " columns, found " +
                         std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < module.variables.size(); ++i) {
        const VariableSpec& v = module.variables[i];
        if (header[i + 1] != v.display) {
            throw ParseError(path.string() + ": column " + std::to_string(i + 1) + " is \"" +
                             header[i + 1] + "\", expected \"" + v.display + "\"");
        }
        table.columns.push_back(MegaTable::Column{v.variable_id, v.display});
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& fields = rows[i].fields;
        if (fields.size() != header.size()) {
            throw ParseError(path.string() + ":" + std::to_string(rows[i].line) +
                             ": wrong field count");
        }
        MegaTable::Row row;
        row.anonymized_id = fields.front();
        row.values.assign(fields.begin() + 1, fields.end());
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace clinistruct
