#include "clinistruct/catalog.hpp"

#include "clinistruct/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace clinistruct {

using nlohmann::json;

namespace {

[[noreturn]] void fail(std::string_view origin, const std::string& where, const std::string& what) {
    throw ValidationError("catalog " + std::string(origin) + ": " + where + ": " + what);
}

const json& require(const json& obj, const char* field, std::string_view origin,
                    const std::string& where) {
    const auto it = obj.find(field);
    if (it == obj.end()) fail(origin, where, std::string("missing field '") + field + "'");
    return *it;
}

std::string require_string(const json& obj, const char* field, std::string_view origin,
                           const std::string& where) {
    const json& v = require(obj, field, origin, where);
    if (!v.is_string() || v.get<std::string>().empty())
        fail(origin, where, std::string("field '") + field + "' must be a non-empty string");
    return v.get<std::string>();
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.'))
            return false;
    return true;
}

VariableSpec parse_variable(const json& jv, const std::string& disease_id, std::string_view origin,
                            const std::string& where) {
    if (!jv.is_object()) fail(origin, where, "variable must be an object");

    VariableSpec v;
    v.disease_id = disease_id;
    v.variable_id = require_string(jv, "variable_id", origin, where);
    if (!is_identifier(v.variable_id))
        fail(origin, where, "variable_id must match [a-z0-9_.]+: '" + v.variable_id + "'");
    const std::string vwhere = where + " (" + v.variable_id + ")";

    v.display = require_string(jv, "display", origin, vwhere);

    const std::string cat = require_string(jv, "category", origin, vwhere);
    const auto category = category_from_name(cat);
    if (!category) fail(origin, vwhere, "unknown category '" + cat + "'");
    v.category = *category;

    const std::string kind = require_string(jv, "kind", origin, vwhere);
    const auto value_kind = value_kind_from_name(kind);
    if (!value_kind) fail(origin, vwhere, "unknown kind '" + kind + "'");
    v.kind = *value_kind;

    const json& jcodes = require(jv, "codes", origin, vwhere);
    if (!jcodes.is_array() || jcodes.empty())
        fail(origin, vwhere, "codes must be a non-empty array");
    for (const auto& jc : jcodes) {
        CodeBinding b;
        b.system = require_string(jc, "system", origin, vwhere + ".codes");
        b.code = require_string(jc, "code", origin, vwhere + ".codes");
        v.codes.push_back(std::move(b));
    }

    const json& jsyn = require(jv, "synonyms", origin, vwhere);
    if (!jsyn.is_array() || jsyn.empty())
        fail(origin, vwhere, "synonyms must be a non-empty array");
    for (const auto& js : jsyn) {
        if (!js.is_string() || js.get<std::string>().empty())
            fail(origin, vwhere, "synonyms entries must be non-empty strings");
        v.synonyms.push_back(js.get<std::string>());
    }
    if (std::find(v.synonyms.begin(), v.synonyms.end(), v.display) == v.synonyms.end())
        v.synonyms.insert(v.synonyms.begin(), v.display);

    if (jv.contains("ambiguity_class")) v.ambiguity_class = jv["ambiguity_class"].get<std::string>();

    if (jv.contains("pool")) {
        const json& jp = jv["pool"];
        if (!jp.is_array() || jp.empty()) fail(origin, vwhere, "pool must be a non-empty array");
        for (const auto& e : jp) {
            if (!e.is_string() || e.get<std::string>().empty())
                fail(origin, vwhere, "pool entries must be non-empty strings");
            v.pool.push_back(e.get<std::string>());
        }
        std::set<std::string> distinct(v.pool.begin(), v.pool.end());
        if (distinct.size() != v.pool.size()) fail(origin, vwhere, "pool entries must be distinct");
    }
    if (jv.contains("weights")) {
        const json& jw = jv["weights"];
        if (!jw.is_array() || jw.size() != v.pool.size())
            fail(origin, vwhere, "weights must parallel the pool");
        for (const auto& e : jw) {
            const double w = e.get<double>();
            if (!(w > 0)) fail(origin, vwhere, "weights must be positive");
            v.pool_weights.push_back(w);
        }
    }

    if (jv.contains("unit")) v.unit = jv["unit"].get<std::string>();
    if (jv.contains("none_probability")) v.none_probability = jv["none_probability"].get<double>();
    if (v.none_probability < 0 || v.none_probability > 1)
        fail(origin, vwhere, "none_probability must be in [0, 1]");
    if (jv.contains("repeat_max")) v.repeat_max = jv["repeat_max"].get<int>();
    if (v.repeat_max < 1 || v.repeat_max > 8)
        fail(origin, vwhere, "repeat_max must be in [1, 8]");

    switch (v.kind) {
    case ValueKind::Numeric:
        if (v.has_pool()) {
            double lo = 0, hi = 0;
            for (std::size_t i = 0; i < v.pool.size(); ++i) {
                const auto num = text::parse_double(v.pool[i]);
                if (!num) fail(origin, vwhere, "numeric pool entry is not a number: '" + v.pool[i] + "'");
                lo = i ? std::min(lo, *num) : *num;
                hi = i ? std::max(hi, *num) : *num;
            }
            v.range_lo = lo;
            v.range_hi = hi;
        } else {
            const json& jr = require(jv, "range", origin, vwhere);
            if (!jr.is_array() || jr.size() != 2)
                fail(origin, vwhere, "range must be [lo, hi]");
            v.range_lo = jr[0].get<double>();
            v.range_hi = jr[1].get<double>();
            if (!(v.range_lo < v.range_hi)) fail(origin, vwhere, "range must satisfy lo < hi");
            if (jv.contains("decimals")) v.decimals = jv["decimals"].get<int>();
            if (v.decimals < 0 || v.decimals > 6)
                fail(origin, vwhere, "decimals must be in [0, 6]");
        }
        break;
    case ValueKind::Coded:
    case ValueKind::FreeText:
        if (!v.has_pool()) fail(origin, vwhere, "coded/free_text variables need a pool");
        break;
    case ValueKind::Date:
        if (v.has_pool()) {
            for (const auto& d : v.pool)
                if (!text::is_iso_date(d))
                    fail(origin, vwhere, "date pool entry is not an ISO date: '" + d + "'");
        } else {
            const json& jr = require(jv, "date_range", origin, vwhere);
            if (!jr.is_array() || jr.size() != 2)
                fail(origin, vwhere, "date_range must be [lo, hi]");
            v.date_lo = jr[0].get<std::string>();
            v.date_hi = jr[1].get<std::string>();
            if (!text::is_iso_date(v.date_lo) || !text::is_iso_date(v.date_hi) ||
                text::day_number(v.date_lo) > text::day_number(v.date_hi))
                fail(origin, vwhere, "date_range must be two ordered ISO dates");
        }
        break;
    case ValueKind::Boolean:
        if (jv.contains("yes_probability")) v.yes_probability = jv["yes_probability"].get<double>();
        if (v.yes_probability < 0 || v.yes_probability > 1)
            fail(origin, vwhere, "yes_probability must be in [0, 1]");
        break;
    }

    if (!v.unit.empty() && v.kind != ValueKind::Numeric)
        fail(origin, vwhere, "only numeric variables may declare a unit");

    return v;
}

void validate_catalog(const Catalog& c, std::string_view origin) {
    if (c.diseases.empty()) fail(origin, "diseases", "catalog has no diseases");

    std::set<std::string> disease_ids;
    std::set<std::string> variable_ids;
    std::set<VariableCategory> categories;
    // code key -> (category, kind, unit, first variable) for cross-disease consistency
    struct CodeUse {
        VariableCategory category;
        ValueKind kind;
        std::string unit;
        std::string variable_id;
    };
    std::map<std::string, CodeUse> code_uses;
    std::map<std::string, VariableCategory> class_categories;
    std::set<std::string> all_codes;

    for (const auto& d : c.diseases) {
        const std::string dwhere = "disease '" + d.disease_id + "'";
        if (!is_identifier(d.disease_id)) fail(origin, dwhere, "disease_id must match [a-z0-9_.]+");
        if (!disease_ids.insert(d.disease_id).second) fail(origin, dwhere, "duplicate disease_id");
        if (d.name.empty()) fail(origin, dwhere, "missing display name");
        if (d.variables.size() < 8 || d.variables.size() > 105)
            fail(origin, dwhere,
                 "variable count " + std::to_string(d.variables.size()) + " outside [8, 105]");

        int mandatory = 0;
        int max_events = 0;
        std::set<std::string> displays;
        std::set<std::string> disease_codes;
        for (const auto& v : d.variables) {
            const std::string vwhere = dwhere + " variable '" + v.variable_id + "'";
            if (!variable_ids.insert(v.variable_id).second)
                fail(origin, vwhere, "duplicate variable_id");
            categories.insert(v.category);
            if (!displays.insert(text::fold(v.display)).second)
                fail(origin, vwhere, "display duplicates another variable of the same disease");
            if (v.none_probability == 0.0) ++mandatory;
            max_events += v.repeat_max;
            for (const auto& b : v.codes) {
                const std::string key = b.key();
                all_codes.insert(key);
                if (!disease_codes.insert(key).second)
                    fail(origin, vwhere, "code " + key + " bound twice within the disease");
                const auto [it, inserted] = code_uses.emplace(
                    key, CodeUse{v.category, v.kind, v.unit, v.variable_id});
                if (!inserted && (it->second.category != v.category || it->second.kind != v.kind ||
                                  it->second.unit != v.unit))
                    fail(origin, vwhere,
                         "code " + key + " is also bound by '" + it->second.variable_id +
                             "' with a different category, kind or unit");
            }
            if (!v.ambiguity_class.empty()) {
                const auto [it, inserted] = class_categories.emplace(v.ambiguity_class, v.category);
                if (!inserted && it->second != v.category)
                    fail(origin, vwhere,
                         "ambiguity class '" + v.ambiguity_class + "' spans multiple categories");
            }
        }
        if (mandatory < 3)
            fail(origin, dwhere, "needs at least 3 always-present variables (none_probability 0)");
        if (max_events > 200)
            fail(origin, dwhere,
                 "worst-case event count " + std::to_string(max_events) + " exceeds 200");
    }

    for (const auto& cat : kAllCategories) {
        if (!categories.contains(cat))
            fail(origin, "categories",
                 "no variable uses category '" + std::string(category_name(cat)) + "'");
    }

    for (const auto& e : c.relations) {
        if (!all_codes.contains(e.from_code))
            fail(origin, "relations", "unknown from_code '" + e.from_code + "'");
        if (!all_codes.contains(e.to_code))
            fail(origin, "relations", "unknown to_code '" + e.to_code + "'");
    }
}

} // namespace

std::string_view relation_name(RelationEdge::Rel r) {
    switch (r) {
    case RelationEdge::Rel::IsA: return "is_a";
    case RelationEdge::Rel::Treats: return "treats";
    case RelationEdge::Rel::Indicates: return "indicates";
    }
    return "is_a";
}

const VariableSpec* DiseaseModule::find_variable(std::string_view variable_id) const {
    for (const auto& v : variables)
        if (v.variable_id == variable_id) return &v;
    return nullptr;
}

const DiseaseModule* Catalog::find_disease(std::string_view disease_id) const {
    for (const auto& d : diseases)
        if (d.disease_id == disease_id) return &d;
    return nullptr;
}

const DiseaseModule& Catalog::disease(std::string_view disease_id) const {
    const DiseaseModule* d = find_disease(disease_id);
    if (!d) throw NotFoundError("catalog: unknown disease '" + std::string(disease_id) + "'");
    return *d;
}

const VariableSpec* Catalog::find_variable(std::string_view variable_id) const {
    for (const auto& d : diseases)
        if (const VariableSpec* v = d.find_variable(variable_id)) return v;
    return nullptr;
}

std::size_t Catalog::total_variables() const {
    std::size_t n = 0;
    for (const auto& d : diseases) n += d.variables.size();
    return n;
}

text::UnitTable Catalog::unit_table() const {
    text::UnitTable t;
    for (const auto& d : diseases)
        for (const auto& v : d.variables)
            if (!v.unit.empty()) t.emplace(text::fold(v.unit), v.unit);
    return t;
}

Catalog parse_catalog_json(std::string_view json_text, std::string_view origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("catalog " + std::string(origin) + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "root", "must be a JSON object");

    Catalog c;
    const json& jver = require(root, "catalog_version", origin, "root");
    if (!jver.is_number_integer() || jver.get<int>() < 1)
        fail(origin, "root", "catalog_version must be a positive integer");
    c.catalog_version = jver.get<int>();

    const json& jdiseases = require(root, "diseases", origin, "root");
    if (!jdiseases.is_array()) fail(origin, "root", "diseases must be an array");

    for (std::size_t di = 0; di < jdiseases.size(); ++di) {
        const json& jd = jdiseases[di];
        const std::string where = "diseases[" + std::to_string(di) + "]";
        DiseaseModule d;
        d.disease_id = require_string(jd, "disease_id", origin, where);
        d.name = require_string(jd, "name", origin, where);
        const json& jvars = require(jd, "variables", origin, where);
        if (!jvars.is_array()) fail(origin, where, "variables must be an array");
        for (std::size_t vi = 0; vi < jvars.size(); ++vi) {
            d.variables.push_back(parse_variable(jvars[vi], d.disease_id, origin,
                                                 where + ".variables[" + std::to_string(vi) + "]"));
        }
        c.diseases.push_back(std::move(d));
    }

    if (root.contains("relations")) {
        const json& jr = root["relations"];
        if (!jr.is_array()) fail(origin, "relations", "must be an array");
        for (const auto& je : jr) {
            RelationEdge e;
            e.from_code = require_string(je, "from", origin, "relations");
            e.to_code = require_string(je, "to", origin, "relations");
            const std::string rel = require_string(je, "rel", origin, "relations");
            if (rel == "is_a") {
                e.rel = RelationEdge::Rel::IsA;
            } else if (rel == "treats") {
                e.rel = RelationEdge::Rel::Treats;
            } else if (rel == "indicates") {
                e.rel = RelationEdge::Rel::Indicates;
            } else {
                fail(origin, "relations", "unknown rel '" + rel + "'");
            }
            c.relations.push_back(std::move(e));
        }
    }

    validate_catalog(c, origin);
    return c;
}

Catalog load_disease_catalog(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("catalog: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_catalog_json(buf.str(), path.string());
}

Catalog default_catalog() { return parse_catalog_json(default_catalog_json(), "<built-in>"); }

} // namespace clinistruct
