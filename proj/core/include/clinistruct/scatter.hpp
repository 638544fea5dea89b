#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/document.hpp"
#include "clinistruct/noise.hpp"
#include "clinistruct/patient.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace clinistruct {

/// One planned document: a format plus the indices (into record.events) it
/// covers. conflict_indices lists events that additionally land here as a
/// conflicting duplicate when the noise profile asks for it.
struct DocumentSlot {
    DocumentFormat format = DocumentFormat::Narrative;
    std::vector<std::size_t> event_indices;
    std::vector<std::size_t> conflict_indices;
};

struct DocumentPlan {
    std::vector<DocumentSlot> slots;
};

/// Fragments patient records into 2..20 documents across at least two of the
/// four formats and renders them, with optional noise. Everything is a pure
/// function of (catalog, record, profile, seed).
class DocumentScatterer {
public:
    DocumentScatterer(const Catalog& catalog, NoiseProfile profile);

    const NoiseProfile& profile() const { return profile_; }

    /// Decides document count, formats and event assignment. Every event is
    /// covered by at least one slot; HL7 slots only receive the categories
    /// expressible in the segment subset.
    DocumentPlan plan_fragmentation(const PatientRecord& record, std::uint64_t seed) const;

    /// Plans, renders and (for non-zero profiles) noises all documents.
    std::vector<MedicalDocument> scatter_patient(const PatientRecord& record,
                                                 std::uint64_t seed) const;

    /// Re-renders one clean document with the profile's corruption applied.
    /// With a zero profile the result is byte-identical to the input. The
    /// document must belong to the plan of (record, seed).
    MedicalDocument apply_noise(const MedicalDocument& clean, const PatientRecord& record,
                                std::uint64_t seed) const;

    // Clean single-document renderers, also used by the round-trip tests.
    MedicalDocument render_fhir_bundle(const PatientRecord& record,
                                       std::span<const ClinicalEvent> events,
                                       const std::string& doc_id,
                                       const std::string& created_at) const;
    MedicalDocument render_hl7_message(const PatientRecord& record,
                                       std::span<const ClinicalEvent> events,
                                       const std::string& doc_id,
                                       const std::string& created_at) const;
    MedicalDocument render_csv_extract(const PatientRecord& record,
                                       std::span<const ClinicalEvent> events,
                                       const std::string& doc_id,
                                       const std::string& created_at) const;
    MedicalDocument render_narrative_note(const PatientRecord& record,
                                          std::span<const ClinicalEvent> events,
                                          const std::string& doc_id,
                                          const std::string& created_at) const;
    MedicalDocument render(DocumentFormat format, const PatientRecord& record,
                           std::span<const ClinicalEvent> events, const std::string& doc_id,
                           const std::string& created_at) const;

    static bool hl7_compatible(VariableCategory c);

private:
    struct Occurrence; // noised view of one event inside one document

    MedicalDocument render_slot(const PatientRecord& record, const DocumentPlan& plan,
                                std::size_t slot_index, std::uint64_t seed, bool with_noise) const;
    std::vector<Occurrence> build_occurrences(const PatientRecord& record, const DocumentPlan& plan,
                                              std::size_t slot_index, std::uint64_t seed,
                                              bool with_noise) const;
    MedicalDocument render_views(DocumentFormat format, const PatientRecord& record,
                                 const std::vector<Occurrence>& views, const std::string& doc_id,
                                 const std::string& created_at) const;
    std::string fhir_body(const PatientRecord& record, const std::vector<Occurrence>& views,
                          const std::string& doc_id, const std::string& created_at) const;
    std::string hl7_body(const PatientRecord& record, const std::vector<Occurrence>& views,
                         const std::string& doc_id, const std::string& created_at) const;
    std::string csv_body(const PatientRecord& record, const std::vector<Occurrence>& views,
                         const std::string& doc_id, const std::string& created_at) const;
    std::string narrative_body(const PatientRecord& record, const std::vector<Occurrence>& views,
                               const std::string& doc_id, const std::string& created_at) const;
    static std::string compose_hl7_value(const std::string& value, const std::string& unit);
    static Value draw_conflict_pool(const VariableSpec& v, std::size_t slot);
    const VariableSpec& variable(const std::string& variable_id) const;

    const Catalog* catalog_;
    NoiseProfile profile_;
    text::UnitTable units_;
    std::map<std::string, const VariableSpec*> variables_;
    // disease -> folded surfaces registered by more than one of its variables
    std::map<std::string, std::set<std::string>> ambiguous_surfaces_;
};

} // namespace clinistruct
