#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/value.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace clinistruct {

/// One dated clinical fact of a patient.
struct ClinicalEvent {
    std::string event_id;   ///< "E" + 16 hex digits, free of patient information
    std::string patient_id; ///< raw (pre-anonymization) id
    std::string variable_id;
    std::string timestamp; ///< ISO datetime
    VariableCategory category = VariableCategory::Observations;
    CodeBinding code; ///< primary binding of the owning variable
    std::string display;
    Value value;

    bool operator==(const ClinicalEvent&) const = default;
};

/// Direct identifiers; never allowed to survive anonymization.
struct Demographics {
    std::string given_name;
    std::string family_name;
    std::string birth_date; ///< ISO, years 1930..1999
    std::string sex;        ///< "M" or "F"
    std::string street;     ///< "742 Maple Street"
    std::string city;

    std::string full_name() const { return given_name + " " + family_name; }
    std::string hl7_name() const { return family_name + "^" + given_name; }
    std::string address() const { return street + ", " + city; }
};

struct PatientRecord {
    std::string patient_id;
    std::string disease_id;
    Demographics demographics;
    std::vector<ClinicalEvent> events;          ///< ordered by (timestamp, event_id)
    std::map<std::string, std::string> truth;   ///< variable_id -> canonical value or "None"
};

/// The sentinel recorded when a variable is absent.
inline constexpr const char* kMissingSentinel = "None";

struct LedgerEntry {
    std::string patient_id;
    std::string disease_id;
    std::string variable_id;
    std::string true_value;
    std::vector<std::string> event_ids; ///< empty when true_value is the sentinel
};

struct GroundTruthLedger {
    std::vector<LedgerEntry> entries;

    /// (patient_id, variable_id) -> entry index.
    std::map<std::pair<std::string, std::string>, std::size_t> index() const;
};

void write_ground_truth_ledger(const GroundTruthLedger& ledger, const std::filesystem::path& path);
GroundTruthLedger read_ground_truth_ledger(const std::filesystem::path& path);

void write_patient_records(const std::vector<PatientRecord>& records,
                           const std::filesystem::path& path);
std::vector<PatientRecord> read_patient_records(const std::filesystem::path& path);

} // namespace clinistruct
