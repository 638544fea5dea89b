#include "clinistruct/noise.hpp"

#include "clinistruct/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace clinistruct {

using nlohmann::json;

bool NoiseProfile::is_zero() const {
    return synonym_swap_rate == 0 && typo_rate == 0 && duplicate_conflict_rate == 0 &&
           omission_rate == 0 && format_jitter_rate == 0;
}

double NoiseProfile::effective(double base_rate, const std::string& ambiguity_class) const {
    if (base_rate <= 0) return 0.0;
    if (!ambiguity_class.empty()) {
        if (const auto it = ambiguity_boost.find(ambiguity_class); it != ambiguity_boost.end())
            return std::clamp(base_rate * it->second, 0.0, 1.0);
    }
    return std::clamp(base_rate, 0.0, 1.0);
}

void NoiseProfile::validate() const {
    const auto check_rate = [](double r, const char* name) {
        if (r < 0 || r > 1)
            throw ValidationError(std::string("noise profile: ") + name + " must be in [0, 1]");
    };
    check_rate(synonym_swap_rate, "synonym_swap_rate");
    check_rate(typo_rate, "typo_rate");
    check_rate(duplicate_conflict_rate, "duplicate_conflict_rate");
    check_rate(omission_rate, "omission_rate");
    check_rate(format_jitter_rate, "format_jitter_rate");
    for (const auto& [name, boost] : ambiguity_boost) {
        if (name.empty()) throw ValidationError("noise profile: empty ambiguity class name");
        if (boost < 0)
            throw ValidationError("noise profile: boost for '" + name + "' must be >= 0");
    }
}

NoiseProfile NoiseProfile::zero() { return NoiseProfile{}; }

NoiseProfile NoiseProfile::preset(std::string_view name) {
    if (name == "zero") return zero();
    if (name == "mild") {
        NoiseProfile p;
        p.synonym_swap_rate = 0.05;
        p.typo_rate = 0.03;
        p.duplicate_conflict_rate = 0.02;
        p.omission_rate = 0.01;
        p.format_jitter_rate = 0.10;
        return p;
    }
    if (name == "ambiguity") {
        // Low base rates keep untargeted variables accurate; the boosts
        // concentrate errors on the tagged ambiguity classes.
        NoiseProfile p;
        p.synonym_swap_rate = 0.02;
        p.typo_rate = 0.01;
        p.duplicate_conflict_rate = 0.02;
        p.omission_rate = 0.01;
        p.format_jitter_rate = 0.02;
        p.ambiguity_boost = {
            {"symptom_overlap", 24.0},
            {"medication_overlap", 22.0},
            {"immunization_overlap", 20.0},
        };
        return p;
    }
    throw NotFoundError("noise profile: unknown preset '" + std::string(name) + "'");
}

NoiseProfile NoiseProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read noise profile " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ParseError("noise profile " + path.string() + ": " + ex.what());
    }
    NoiseProfile p;
    if (j.contains("synonym_swap_rate")) p.synonym_swap_rate = j["synonym_swap_rate"].get<double>();
    if (j.contains("typo_rate")) p.typo_rate = j["typo_rate"].get<double>();
    if (j.contains("duplicate_conflict_rate"))
        p.duplicate_conflict_rate = j["duplicate_conflict_rate"].get<double>();
    if (j.contains("omission_rate")) p.omission_rate = j["omission_rate"].get<double>();
    if (j.contains("format_jitter_rate")) p.format_jitter_rate = j["format_jitter_rate"].get<double>();
    if (j.contains("ambiguity_boost"))
        p.ambiguity_boost = j["ambiguity_boost"].get<std::map<std::string, double>>();
    p.validate();
    return p;
}

} // namespace clinistruct
