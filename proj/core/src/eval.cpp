#include "clinistruct/eval.hpp"

#include "clinistruct/csv.hpp"
#include "clinistruct/errors.hpp"
#include "clinistruct/rng.hpp"
#include "clinistruct/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>

namespace clinistruct {

using nlohmann::json;

const DiseaseAccuracy& EvalReport::disease(std::string_view disease_id) const {
    for (const auto& d : diseases) {
        if (d.disease_id == disease_id) return d;
    }
    throw NotFoundError("no disease " + std::string(disease_id) + " in the report");
}

namespace {

std::size_t category_slot(VariableCategory c) {
    for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
        if (kAllCategories[i] == c) return i;
    }
    throw ValidationError("unknown variable category");
}

OutlierBreakdown build_breakdown(const EvalReport& report) {
    OutlierBreakdown b;
    b.outlier_count = report.outliers.size();
    for (const auto& d : report.diseases) b.variable_count += d.variables.size();
    b.outlier_proportion = b.variable_count == 0
                               ? 0.0
                               : 100.0 * static_cast<double>(b.outlier_count) /
                                     static_cast<double>(b.variable_count);

    b.matrix.assign(report.diseases.size(),
                    std::vector<std::size_t>(kAllCategories.size(), 0));
    std::vector<std::size_t> category_outliers(kAllCategories.size(), 0);
    std::vector<std::size_t> category_variables(kAllCategories.size(), 0);
    std::vector<double> category_outlier_sum(kAllCategories.size(), 0.0);
    std::vector<double> category_total_sum(kAllCategories.size(), 0.0);

    for (std::size_t di = 0; di < report.diseases.size(); ++di) {
        const auto& d = report.diseases[di];
        DiseaseOutlierRow row;
        row.disease_id = d.disease_id;
        row.variable_count = d.variables.size();
        for (const auto& v : d.variables) {
            const std::size_t c = category_slot(v.category);
            ++category_variables[c];
            category_total_sum[c] += v.accuracy;
            if (v.accuracy < kOutlierThreshold) {
                ++row.outlier_count;
                ++b.matrix[di][c];
                ++category_outliers[c];
                category_outlier_sum[c] += v.accuracy;
            }
        }
        row.proportion_of_disease = row.variable_count == 0
                                        ? 0.0
                                        : 100.0 * static_cast<double>(row.outlier_count) /
                                              static_cast<double>(row.variable_count);
        row.share_of_outliers = b.outlier_count == 0
                                    ? 0.0
                                    : 100.0 * static_cast<double>(row.outlier_count) /
                                          static_cast<double>(b.outlier_count);
        b.by_disease.push_back(std::move(row));
    }

    for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
        if (category_variables[c] == 0) continue;
        CategoryOutlierRow row;
        row.category = kAllCategories[c];
        row.outlier_count = category_outliers[c];
        row.variable_count = category_variables[c];
        row.contribution = b.outlier_count == 0
                               ? 0.0
                               : 100.0 * static_cast<double>(row.outlier_count) /
                                     static_cast<double>(b.outlier_count);
        row.outlier_mean_accuracy =
            row.outlier_count == 0
                ? 0.0
                : category_outlier_sum[c] / static_cast<double>(row.outlier_count);
        row.category_mean_accuracy =
            category_total_sum[c] / static_cast<double>(row.variable_count);
        b.by_category.push_back(std::move(row));
    }
    std::sort(b.by_category.begin(), b.by_category.end(),
              [](const CategoryOutlierRow& x, const CategoryOutlierRow& y) {
                  if (x.outlier_count != y.outlier_count) return x.outlier_count > y.outlier_count;
                  return category_name(x.category) < category_name(y.category);
              });
    return b;
}

std::optional<EffectComparison> build_effect(const EvalReport& report, std::uint64_t seed) {
    std::vector<double> outliers;
    std::vector<double> rest;
    std::vector<double> all;
    for (const auto& d : report.diseases) {
        for (const auto& v : d.variables) {
            all.push_back(v.accuracy);
            (v.accuracy < kOutlierThreshold ? outliers : rest).push_back(v.accuracy);
        }
    }
    if (outliers.size() < 2 || rest.size() < 2) return std::nullopt;
    if (stats::sample_variance(outliers) == 0.0 && stats::sample_variance(rest) == 0.0) {
        return std::nullopt;
    }

    EffectComparison e;
    e.outlier_count = outliers.size();
    e.rest_count = rest.size();
    e.mean_all = stats::mean(all);
    e.mean_outliers = stats::mean(outliers);
    e.mean_rest = stats::mean(rest);
    e.cohens_d = stats::cohens_d(outliers, rest);
    e.band = std::string(stats::effect_size_band(e.cohens_d));
    const auto t = stats::welch_t_test(outliers, rest);
    e.welch_t = t.t;
    e.welch_df = t.df;
    e.welch_p = t.p_two_sided;
    const auto u = stats::mann_whitney_u(outliers, rest);
    e.mwu_u = u.u;
    e.mwu_p = u.p_two_sided;
    const auto ci = stats::bootstrap_mean_diff_ci(outliers, rest, kReportBootstrapResamples,
                                                  0.95, derive_seed(seed, "report-effect"));
    e.diff_ci_lo = ci.lo;
    e.diff_ci_hi = ci.hi;
    e.seed = seed;
    return e;
}

} // namespace

EvalReport evaluate_assignments(const Catalog& catalog, const GroundTruthLedger& ledger,
                                const IdentityMap& ids,
                                const std::vector<VariableAssignment>& assignments,
                                std::uint64_t seed) {
    std::map<std::pair<std::string, std::string>, const VariableAssignment*> predicted;
    for (const auto& a : assignments) {
        if (!predicted.emplace(std::make_pair(a.patient_id, a.variable_id), &a).second) {
            throw ValidationError("duplicate assignment for " + a.patient_id + "/" +
                                  a.variable_id);
        }
    }

    // truth[disease][variable] -> (pseudonym -> value)
    std::map<std::string, std::map<std::string, std::map<std::string, std::string>>> truth;
    for (const auto& e : ledger.entries) {
        const std::string& pseudonym = ids.pseudonym(e.patient_id);
        truth[e.disease_id][e.variable_id][pseudonym] = e.true_value;
    }

    EvalReport report;
    std::vector<double> disease_means;
    for (const auto& module : catalog.diseases) {
        const auto disease_it = truth.find(module.disease_id);
        if (disease_it == truth.end()) continue; // disease absent from this run

        DiseaseAccuracy d;
        d.disease_id = module.disease_id;
        d.name = module.name;

        double variable_sum = 0.0;
        for (const auto& v : module.variables) {
            VariableAccuracy acc;
            acc.disease_id = module.disease_id;
            acc.variable_id = v.variable_id;
            acc.display = v.display;
            acc.category = v.category;

            const auto cells = disease_it->second.find(v.variable_id);
            if (cells == disease_it->second.end()) {
                throw ValidationError("ledger has no rows for variable " + v.variable_id);
            }
            for (const auto& [pseudonym, true_value] : cells->second) {
                ++acc.total;
                const auto p = predicted.find(std::make_pair(pseudonym, v.variable_id));
                const std::string value =
                    p == predicted.end() ? std::string(kMissingSentinel) : p->second->value;
                if (value == true_value) ++acc.correct;
            }
            acc.accuracy = 100.0 * static_cast<double>(acc.correct) /
                           static_cast<double>(acc.total);
            report.total_comparisons += acc.total;
            report.total_correct += acc.correct;
            variable_sum += acc.accuracy;
            d.patients = std::max(d.patients, acc.total);
            d.variables.push_back(std::move(acc));
        }
        d.mean_accuracy = variable_sum / static_cast<double>(d.variables.size());
        disease_means.push_back(d.mean_accuracy);
        report.diseases.push_back(std::move(d));
    }
    if (disease_means.empty()) throw ValidationError("no diseases to evaluate");

    report.overall_accuracy = stats::mean(disease_means);
    report.disease_sd =
        disease_means.size() < 2 ? 0.0 : std::sqrt(stats::sample_variance(disease_means));
    report.proportion_correct = static_cast<double>(report.total_correct) /
                                static_cast<double>(report.total_comparisons);
    report.standard_error =
        stats::standard_error_proportion(report.proportion_correct, report.total_comparisons);

    for (const auto& d : report.diseases) {
        for (const auto& v : d.variables) {
            if (v.accuracy < kOutlierThreshold) report.outliers.push_back(v);
        }
    }
    std::sort(report.outliers.begin(), report.outliers.end(),
              [](const VariableAccuracy& a, const VariableAccuracy& b) {
                  if (a.accuracy != b.accuracy) return a.accuracy < b.accuracy;
                  if (a.disease_id != b.disease_id) return a.disease_id < b.disease_id;
                  return a.variable_id < b.variable_id;
              });

    report.breakdown = build_breakdown(report);
    report.effect = build_effect(report, seed);
    return report;
}

namespace {

json variable_to_json(const VariableAccuracy& v) {
    return json{{"disease_id", v.disease_id},
                {"variable_id", v.variable_id},
                {"display", v.display},
                {"category", std::string(category_name(v.category))},
                {"total", v.total},
                {"correct", v.correct},
                {"accuracy_percent", v.accuracy}};
}

VariableAccuracy variable_from_json(const json& j) {
    VariableAccuracy v;
    v.disease_id = j.at("disease_id").get<std::string>();
    v.variable_id = j.at("variable_id").get<std::string>();
    v.display = j.at("display").get<std::string>();
    const auto category = category_from_name(j.at("category").get<std::string>());
    if (!category) throw ParseError("unknown category " + j.at("category").get<std::string>());
    v.category = *category;
    v.total = j.at("total").get<std::size_t>();
    v.correct = j.at("correct").get<std::size_t>();
    v.accuracy = j.at("accuracy_percent").get<double>();
    return v;
}

json breakdown_to_json(const OutlierBreakdown& b) {
    json by_disease = json::array();
    for (const auto& r : b.by_disease) {
        by_disease.push_back(json{{"disease_id", r.disease_id},
                                  {"outlier_count", r.outlier_count},
                                  {"variable_count", r.variable_count},
                                  {"proportion_of_disease_percent", r.proportion_of_disease},
                                  {"share_of_outliers_percent", r.share_of_outliers}});
    }
    json by_category = json::array();
    for (const auto& r : b.by_category) {
        by_category.push_back(
            json{{"category", std::string(category_name(r.category))},
                 {"outlier_count", r.outlier_count},
                 {"variable_count", r.variable_count},
                 {"contribution_percent", r.contribution},
                 {"outlier_mean_accuracy_percent", r.outlier_mean_accuracy},
                 {"category_mean_accuracy_percent", r.category_mean_accuracy}});
    }
    return json{{"outlier_count", b.outlier_count},
                {"variable_count", b.variable_count},
                {"outlier_proportion_percent", b.outlier_proportion},
                {"by_disease", by_disease},
                {"by_category", by_category},
                {"matrix", b.matrix}};
}

OutlierBreakdown breakdown_from_json(const json& j) {
    OutlierBreakdown b;
    b.outlier_count = j.at("outlier_count").get<std::size_t>();
    b.variable_count = j.at("variable_count").get<std::size_t>();
    b.outlier_proportion = j.at("outlier_proportion_percent").get<double>();
    for (const auto& rj : j.at("by_disease")) {
        DiseaseOutlierRow r;
        r.disease_id = rj.at("disease_id").get<std::string>();
        r.outlier_count = rj.at("outlier_count").get<std::size_t>();
        r.variable_count = rj.at("variable_count").get<std::size_t>();
        r.proportion_of_disease = rj.at("proportion_of_disease_percent").get<double>();
        r.share_of_outliers = rj.at("share_of_outliers_percent").get<double>();
        b.by_disease.push_back(std::move(r));
    }
    for (const auto& rj : j.at("by_category")) {
        CategoryOutlierRow r;
        const auto category = category_from_name(rj.at("category").get<std::string>());
        if (!category) throw ParseError("unknown category in breakdown");
        r.category = *category;
        r.outlier_count = rj.at("outlier_count").get<std::size_t>();
        r.variable_count = rj.at("variable_count").get<std::size_t>();
        r.contribution = rj.at("contribution_percent").get<double>();
        r.outlier_mean_accuracy = rj.at("outlier_mean_accuracy_percent").get<double>();
        r.category_mean_accuracy = rj.at("category_mean_accuracy_percent").get<double>();
        b.by_category.push_back(std::move(r));
    }
    b.matrix = j.at("matrix").get<std::vector<std::vector<std::size_t>>>();
    return b;
}

json effect_to_json(const EffectComparison& e) {
    return json{{"outlier_count", e.outlier_count},
                {"rest_count", e.rest_count},
                {"mean_all_percent", e.mean_all},
                {"mean_outliers_percent", e.mean_outliers},
                {"mean_rest_percent", e.mean_rest},
                {"cohens_d", e.cohens_d},
                {"band", e.band},
                {"welch_t", e.welch_t},
                {"welch_df", e.welch_df},
                {"welch_p", e.welch_p},
                {"mann_whitney_u", e.mwu_u},
                {"mann_whitney_p", e.mwu_p},
                {"mean_diff_ci_lo", e.diff_ci_lo},
                {"mean_diff_ci_hi", e.diff_ci_hi},
                {"bootstrap_resamples", kReportBootstrapResamples},
                {"seed", e.seed}};
}

EffectComparison effect_from_json(const json& j) {
    EffectComparison e;
    e.outlier_count = j.at("outlier_count").get<std::size_t>();
    e.rest_count = j.at("rest_count").get<std::size_t>();
    e.mean_all = j.at("mean_all_percent").get<double>();
    e.mean_outliers = j.at("mean_outliers_percent").get<double>();
    e.mean_rest = j.at("mean_rest_percent").get<double>();
    e.cohens_d = j.at("cohens_d").get<double>();
    e.band = j.at("band").get<std::string>();
    e.welch_t = j.at("welch_t").get<double>();
    e.welch_df = j.at("welch_df").get<double>();
    e.welch_p = j.at("welch_p").get<double>();
    e.mwu_u = j.at("mann_whitney_u").get<double>();
    e.mwu_p = j.at("mann_whitney_p").get<double>();
    e.diff_ci_lo = j.at("mean_diff_ci_lo").get<double>();
    e.diff_ci_hi = j.at("mean_diff_ci_hi").get<double>();
    e.seed = j.at("seed").get<std::uint64_t>();
    return e;
}

} // namespace

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    json doc;
    doc["schema_version"] = 1;
    doc["overall"] = json{{"accuracy_percent", report.overall_accuracy},
                          {"disease_sd_percent", report.disease_sd},
                          {"comparisons", report.total_comparisons},
                          {"correct", report.total_correct},
                          {"proportion_correct", report.proportion_correct},
                          {"standard_error", report.standard_error},
                          {"standard_error_percent", report.standard_error * 100.0}};
    json diseases = json::array();
    for (const auto& d : report.diseases) {
        json variables = json::array();
        for (const auto& v : d.variables) variables.push_back(variable_to_json(v));
        diseases.push_back(json{{"disease_id", d.disease_id},
                                {"name", d.name},
                                {"patients", d.patients},
                                {"mean_accuracy_percent", d.mean_accuracy},
                                {"variables", variables}});
    }
    doc["diseases"] = diseases;
    json outliers = json::array();
    for (const auto& v : report.outliers) outliers.push_back(variable_to_json(v));
    doc["outliers"] = outliers;
    doc["outlier_threshold_percent"] = kOutlierThreshold;
    doc["outlier_breakdown"] = breakdown_to_json(report.breakdown);
    doc["effect"] = report.effect ? effect_to_json(*report.effect) : json(nullptr);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    EvalReport report;
    try {
        if (doc.at("schema_version").get<int>() != 1) {
            throw ParseError(path.string() + ": unsupported report schema");
        }
        const json& overall = doc.at("overall");
        report.overall_accuracy = overall.at("accuracy_percent").get<double>();
        report.disease_sd = overall.at("disease_sd_percent").get<double>();
        report.total_comparisons = overall.at("comparisons").get<std::size_t>();
        report.total_correct = overall.at("correct").get<std::size_t>();
        report.proportion_correct = overall.at("proportion_correct").get<double>();
        report.standard_error = overall.at("standard_error").get<double>();
        for (const auto& dj : doc.at("diseases")) {
            DiseaseAccuracy d;
            d.disease_id = dj.at("disease_id").get<std::string>();
            d.name = dj.at("name").get<std::string>();
            d.patients = dj.at("patients").get<std::size_t>();
            d.mean_accuracy = dj.at("mean_accuracy_percent").get<double>();
            for (const auto& vj : dj.at("variables")) d.variables.push_back(variable_from_json(vj));
            report.diseases.push_back(std::move(d));
        }
        for (const auto& vj : doc.at("outliers")) {
            report.outliers.push_back(variable_from_json(vj));
        }
        report.breakdown = breakdown_from_json(doc.at("outlier_breakdown"));
        if (!doc.at("effect").is_null()) report.effect = effect_from_json(doc.at("effect"));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return report;
}

namespace {

void write_csv_file(const std::string& body, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("short write to " + path.string());
}

} // namespace

void write_accuracy_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::string body;
    csv::append_row(body, std::vector<std::string>{"disease_id", "name", "patients", "variables",
                                                   "mean_accuracy_percent"});
    for (const auto& d : report.diseases) {
        csv::append_row(body,
                        std::vector<std::string>{d.disease_id, d.name, std::to_string(d.patients),
                                                 std::to_string(d.variables.size()),
                                                 text::format_double(d.mean_accuracy)});
    }
    csv::append_row(body, std::vector<std::string>{
                              "overall", "Overall (unweighted mean)", "",
                              std::to_string(report.breakdown.variable_count),
                              text::format_double(report.overall_accuracy)});
    write_csv_file(body, path);
}

void write_outlier_csv(const EvalReport& report, const std::filesystem::path& path) {
    const auto& b = report.breakdown;
    std::string body;
    csv::append_row(body, std::vector<std::string>{
                              "panel", "disease_id", "category", "outlier_count",
                              "variable_count", "percent_of_group", "percent_of_outliers",
                              "outlier_mean_accuracy_percent", "category_mean_accuracy_percent"});
    csv::append_row(body, std::vector<std::string>{
                              "share", "", "", std::to_string(b.outlier_count),
                              std::to_string(b.variable_count),
                              text::format_double(b.outlier_proportion), "", "", ""});
    for (const auto& r : b.by_disease) {
        csv::append_row(body, std::vector<std::string>{
                                  "disease", r.disease_id, "", std::to_string(r.outlier_count),
                                  std::to_string(r.variable_count),
                                  text::format_double(r.proportion_of_disease),
                                  text::format_double(r.share_of_outliers), "", ""});
    }
    for (const auto& r : b.by_category) {
        csv::append_row(body, std::vector<std::string>{
                                  "category", "", std::string(category_name(r.category)),
                                  std::to_string(r.outlier_count),
                                  std::to_string(r.variable_count), "",
                                  text::format_double(r.contribution),
                                  text::format_double(r.outlier_mean_accuracy),
                                  text::format_double(r.category_mean_accuracy)});
    }
    for (std::size_t di = 0; di < b.matrix.size(); ++di) {
        for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
            if (b.matrix[di][c] == 0) continue;
            csv::append_row(body, std::vector<std::string>{
                                      "matrix", b.by_disease[di].disease_id,
                                      std::string(category_name(kAllCategories[c])),
                                      std::to_string(b.matrix[di][c]), "", "", "", "", ""});
        }
    }
    write_csv_file(body, path);
}

void write_effect_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::string body;
    csv::append_row(body, std::vector<std::string>{"metric", "value"});
    auto row = [&body](std::string_view metric, const std::string& value) {
        csv::append_row(body, std::vector<std::string>{std::string(metric), value});
    };
    row("available", report.effect ? "true" : "false");
    if (report.effect) {
        const auto& e = *report.effect;
        row("outlier_count", std::to_string(e.outlier_count));
        row("rest_count", std::to_string(e.rest_count));
        row("mean_all_percent", text::format_double(e.mean_all));
        row("mean_outliers_percent", text::format_double(e.mean_outliers));
        row("mean_rest_percent", text::format_double(e.mean_rest));
        row("cohens_d", text::format_double(e.cohens_d));
        row("band", e.band);
        row("welch_t", text::format_double(e.welch_t));
        row("welch_df", text::format_double(e.welch_df));
        row("welch_p", text::format_double(e.welch_p));
        row("mann_whitney_u", text::format_double(e.mwu_u));
        row("mann_whitney_p", text::format_double(e.mwu_p));
        row("mean_diff_ci_lo", text::format_double(e.diff_ci_lo));
        row("mean_diff_ci_hi", text::format_double(e.diff_ci_hi));
        row("bootstrap_resamples", std::to_string(kReportBootstrapResamples));
        row("seed", std::to_string(e.seed));
    }
    write_csv_file(body, path);
}

} // namespace clinistruct
