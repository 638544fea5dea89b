#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/patient.hpp"

#include <cstdint>
#include <vector>

namespace clinistruct {

/// Deterministically generates one patient. The same (module, index, seed)
/// triple always yields byte-identical records; different indices yield
/// different patients.
PatientRecord generate_patient(const DiseaseModule& module, std::size_t index, std::uint64_t seed,
                               const text::UnitTable& units);

/// Generates patients_per_disease records for every disease of the catalog,
/// ordered by (catalog disease order, index). jobs > 1 parallelizes across
/// patients without changing the result.
std::vector<PatientRecord> generate_corpus(const Catalog& catalog, std::size_t patients_per_disease,
                                           std::uint64_t seed, int jobs = 1);

/// Collects the per-(patient, variable) truth entries, sorted by
/// (disease_id, patient_id, variable_id).
GroundTruthLedger build_ledger(const std::vector<PatientRecord>& records);

} // namespace clinistruct
