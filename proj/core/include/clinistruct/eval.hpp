#pragma once

#include "clinistruct/anonymize.hpp"
#include "clinistruct/catalog.hpp"
#include "clinistruct/extract.hpp"
#include "clinistruct/patient.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace clinistruct {

/// Exact-match accuracy of one variable across a disease's patients.
struct VariableAccuracy {
    std::string disease_id;
    std::string variable_id;
    std::string display;
    VariableCategory category = VariableCategory::Observations;
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0; ///< percent
};

struct DiseaseAccuracy {
    std::string disease_id;
    std::string name;
    std::size_t patients = 0;
    std::vector<VariableAccuracy> variables;
    double mean_accuracy = 0.0; ///< percent, unweighted mean over variables
};

/// Accuracy threshold below which a variable counts as an outlier.
inline constexpr double kOutlierThreshold = 85.0;

/// Bootstrap resamples used for the effect comparison in the report.
inline constexpr std::size_t kReportBootstrapResamples = 2000;

struct DiseaseOutlierRow {
    std::string disease_id;
    std::size_t outlier_count = 0;
    std::size_t variable_count = 0;
    double proportion_of_disease = 0.0; ///< percent of this disease's variables
    double share_of_outliers = 0.0;     ///< percent of all outliers
};

struct CategoryOutlierRow {
    VariableCategory category = VariableCategory::Observations;
    std::size_t outlier_count = 0;
    std::size_t variable_count = 0;      ///< all variables of the category
    double contribution = 0.0;           ///< percent of all outliers
    double outlier_mean_accuracy = 0.0;  ///< mean over this category's outliers
    double category_mean_accuracy = 0.0; ///< mean over all variables of the category
};

/// Outlier panel data: per-disease counts, the outlier-vs-total share,
/// per-category contributions, and the category-by-disease count matrix.
struct OutlierBreakdown {
    std::size_t outlier_count = 0;
    std::size_t variable_count = 0;
    double outlier_proportion = 0.0; ///< percent of all variables
    std::vector<DiseaseOutlierRow> by_disease;   ///< catalog order
    std::vector<CategoryOutlierRow> by_category; ///< sorted by contribution desc
    /// matrix[d][c] = outlier count for disease d (catalog order) and
    /// category kAllCategories[c].
    std::vector<std::vector<std::size_t>> matrix;
};

/// Outliers-vs-rest comparison over per-variable accuracies.
struct EffectComparison {
    std::size_t outlier_count = 0;
    std::size_t rest_count = 0;
    double mean_all = 0.0;
    double mean_outliers = 0.0;
    double mean_rest = 0.0;
    double cohens_d = 0.0; ///< outliers minus rest
    std::string band;
    double welch_t = 0.0;
    double welch_df = 0.0;
    double welch_p = 1.0;
    double mwu_u = 0.0;
    double mwu_p = 1.0;
    double diff_ci_lo = 0.0; ///< bootstrap CI of mean_outliers - mean_rest
    double diff_ci_hi = 0.0;
    std::uint64_t seed = 0;
};

struct EvalReport {
    std::vector<DiseaseAccuracy> diseases;
    double overall_accuracy = 0.0; ///< percent, unweighted mean over diseases
    double disease_sd = 0.0;       ///< sample SD across disease means, percent
    std::size_t total_comparisons = 0;
    std::size_t total_correct = 0;
    double proportion_correct = 0.0;
    double standard_error = 0.0;            ///< of the pooled proportion
    std::vector<VariableAccuracy> outliers; ///< accuracy strictly below 85%
    OutlierBreakdown breakdown;
    std::optional<EffectComparison> effect; ///< absent when either group is < 2

    const DiseaseAccuracy& disease(std::string_view disease_id) const; ///< throws NotFoundError
};

/// Scores extracted assignments against the ground-truth ledger. Ledger rows
/// are keyed by raw patient ids; the identity map bridges to the pseudonyms
/// the assignments carry. Every (patient, variable) cell of every disease is
/// compared exactly once. The seed drives the bootstrap in the effect
/// comparison.
EvalReport evaluate_assignments(const Catalog& catalog, const GroundTruthLedger& ledger,
                                const IdentityMap& ids,
                                const std::vector<VariableAssignment>& assignments,
                                std::uint64_t seed);

void write_report_json(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_json(const std::filesystem::path& path);

/// Per-disease accuracy table with a trailing overall row.
void write_accuracy_csv(const EvalReport& report, const std::filesystem::path& path);
/// Long-form outlier panels: one row per (panel, key) pair.
void write_outlier_csv(const EvalReport& report, const std::filesystem::path& path);
/// Outliers-vs-rest comparison as metric,value rows.
void write_effect_csv(const EvalReport& report, const std::filesystem::path& path);

} // namespace clinistruct
