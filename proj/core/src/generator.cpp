#include "clinistruct/generator.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/parallel.hpp"
#include "clinistruct/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

namespace clinistruct {

namespace {

constexpr std::array<const char*, 16> kFemaleNames = {
    "Mary",  "Linda",    "Susan",  "Karen",   "Donna",   "Carol",   "Sandra",  "Ruth",
    "Sharon", "Michelle", "Laura", "Sarah", "Kimberly", "Deborah", "Jessica", "Cynthia"};

constexpr std::array<const char*, 16> kMaleNames = {
    "James",   "John",        "Robert", "Michael", "William", "David",   "Richard", "Joseph",
    "Thomas",  "Charles", "Christopher", "Daniel", "Matthew", "Anthony", "Mark",    "Donald"};

constexpr std::array<const char*, 20> kFamilyNames = {
    "Smith",     "Johnson",  "Williams", "Brown", "Jones",   "Garcia",   "Miller",
    "Davis",     "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson",
    "Anderson",  "Taylor",   "Moore",    "Jackson", "Martin", "Thompson"};

constexpr std::array<const char*, 10> kStreets = {
    "Maple Street",   "Oak Avenue",     "Cedar Lane",      "Elm Drive",       "Birch Road",
    "Willow Court",   "Aspen Way",      "Chestnut Boulevard", "Juniper Terrace", "Sycamore Close"};

constexpr std::array<const char*, 10> kCities = {
    "Springfield", "Riverton", "Lakewood", "Fairview", "Greenville",
    "Bristol",     "Clayton",  "Milton",   "Dayton",   "Ashland"};

// Clinical events live in 2000..2024; birth dates in 1930..1999. The windows
// are disjoint so a birth date can never appear as a clinical date.
const std::int64_t kClinicalDayLo = text::day_number("2000-01-01");
const std::int64_t kClinicalDayHi = text::day_number("2024-12-31");
const std::int64_t kBirthDayLo = text::day_number("1930-01-01");
const std::int64_t kBirthDayHi = text::day_number("1999-12-31");

/// Ids are encoded with the letters a..p (one per nibble) instead of hex so
/// that they contain no digits; digit-bearing ids could collide with the
/// compact birth-date strings the anonymizer must hunt down.
std::string letter_id(char prefix, std::uint64_t bits) {
    std::string out(1, prefix);
    for (int i = 60; i >= 0; i -= 4) out.push_back(static_cast<char>('a' + ((bits >> i) & 0xf)));
    return out;
}

std::string draw_time_of_day(Rng& rng) {
    char buf[10];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", static_cast<int>(7 + rng.below(12)),
                  static_cast<int>(rng.below(60)), static_cast<int>(rng.below(60)));
    return std::string(buf);
}

std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
    double total = 0;
    for (const double w : weights) total += w;
    double x = rng.unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        x -= weights[i];
        if (x < 0) return i;
    }
    return weights.size() - 1;
}

Value draw_pool_value(const VariableSpec& v, std::size_t slot) {
    const std::string& raw = v.pool[slot];
    switch (v.kind) {
    case ValueKind::Numeric: return Value::numeric(*text::parse_double(raw), v.unit);
    case ValueKind::Coded: return Value::coded(raw);
    case ValueKind::Date: return Value::date(raw);
    case ValueKind::FreeText: return Value::free_text(raw);
    case ValueKind::Boolean: break;
    }
    throw ValidationError("pool draw for boolean variable " + v.variable_id);
}

Value draw_value(const VariableSpec& v, Rng& rng) {
    if (v.kind == ValueKind::Boolean) return Value::boolean(rng.chance(v.yes_probability));
    if (v.has_pool()) {
        const std::size_t slot = v.pool_weights.empty() ? rng.pick(v.pool.size())
                                                        : weighted_pick(rng, v.pool_weights);
        return draw_pool_value(v, slot);
    }
    if (v.kind == ValueKind::Numeric) {
        const double scale = std::pow(10.0, v.decimals);
        const std::int64_t lo = static_cast<std::int64_t>(std::llround(v.range_lo * scale));
        const std::int64_t hi = static_cast<std::int64_t>(std::llround(v.range_hi * scale));
        return Value::numeric(static_cast<double>(rng.range(lo, hi)) / scale, v.unit);
    }
    if (v.kind == ValueKind::Date) {
        const std::int64_t day = rng.range(text::day_number(v.date_lo), text::day_number(v.date_hi));
        return Value::date(text::date_from_day_number(day));
    }
    throw ValidationError("variable " + v.variable_id + " has no value model");
}

std::vector<std::int64_t> draw_distinct_days(Rng& rng, std::int64_t lo, std::int64_t hi, int n) {
    std::set<std::int64_t> days;
    while (static_cast<int>(days.size()) < n) days.insert(rng.range(lo, hi));
    return {days.begin(), days.end()};
}

} // namespace

PatientRecord generate_patient(const DiseaseModule& module, std::size_t index, std::uint64_t seed,
                               const text::UnitTable& units) {
    const std::uint64_t sub = derive_seed(seed, "patient", module.disease_id, index);
    Rng rng(sub);

    PatientRecord r;
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-p%04zu", index);
    r.patient_id = module.disease_id + suffix;
    r.disease_id = module.disease_id;

    // Demographics. Sex is fixed for the sex-specific modules.
    if (module.disease_id == "prostate_cancer") {
        r.demographics.sex = "M";
    } else if (module.disease_id == "contraceptives" || module.disease_id == "female_reproduction") {
        r.demographics.sex = "F";
    } else {
        r.demographics.sex = rng.chance(0.5) ? "F" : "M";
    }
    if (r.demographics.sex == "F") {
        r.demographics.given_name = kFemaleNames[rng.pick(kFemaleNames.size())];
    } else {
        r.demographics.given_name = kMaleNames[rng.pick(kMaleNames.size())];
    }
    r.demographics.family_name = kFamilyNames[rng.pick(kFamilyNames.size())];
    r.demographics.birth_date = text::date_from_day_number(rng.range(kBirthDayLo, kBirthDayHi));
    r.demographics.street =
        std::to_string(100 + rng.below(900)) + " " + kStreets[rng.pick(kStreets.size())];
    r.demographics.city = kCities[rng.pick(kCities.size())];

    for (const auto& v : module.variables) {
        if (rng.chance(v.none_probability)) {
            r.truth.emplace(v.variable_id, kMissingSentinel);
            continue;
        }
        const int n_events = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(v.repeat_max)));

        std::vector<ClinicalEvent> drawn;
        if (v.kind == ValueKind::Date) {
            // The event timestamp follows the date value itself, so multiple
            // events stay ordered by drawing distinct value dates.
            std::set<std::string> dates;
            while (static_cast<int>(dates.size()) < n_events) {
                Value val = draw_value(v, rng);
                dates.insert(val.text);
            }
            for (const auto& d : dates) {
                ClinicalEvent e;
                e.value = Value::date(d);
                e.timestamp = d + "T" + draw_time_of_day(rng);
                drawn.push_back(std::move(e));
            }
        } else {
            const auto days = draw_distinct_days(rng, kClinicalDayLo, kClinicalDayHi, n_events);
            for (const auto day : days) {
                ClinicalEvent e;
                e.value = draw_value(v, rng);
                e.timestamp = text::date_from_day_number(day) + "T" + draw_time_of_day(rng);
                drawn.push_back(std::move(e));
            }
        }

        std::vector<std::string> event_ids;
        for (std::size_t k = 0; k < drawn.size(); ++k) {
            ClinicalEvent& e = drawn[k];
            e.event_id = letter_id('E', derive_seed(sub, "event", v.variable_id, k));
            e.patient_id = r.patient_id;
            e.variable_id = v.variable_id;
            e.category = v.category;
            e.code = v.codes.front();
            e.display = v.display;
            event_ids.push_back(e.event_id);
            r.events.push_back(std::move(e));
        }
        // Truth is the value of the latest event; the conflict-resolution
        // currency rule recovers exactly this on the extraction side.
        r.truth.emplace(v.variable_id,
                        text::canonical_value_text(r.events.back().value.to_text(), units));
    }

    std::sort(r.events.begin(), r.events.end(), [](const ClinicalEvent& a, const ClinicalEvent& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.event_id < b.event_id;
    });
    return r;
}

std::vector<PatientRecord> generate_corpus(const Catalog& catalog, std::size_t patients_per_disease,
                                           std::uint64_t seed, int jobs) {
    const text::UnitTable units = catalog.unit_table();
    const std::size_t total = catalog.diseases.size() * patients_per_disease;
    std::vector<PatientRecord> records(total);
    parallel_for(total, jobs, [&](std::size_t i) {
        const std::size_t d = i / patients_per_disease;
        const std::size_t index = i % patients_per_disease;
        records[i] = generate_patient(catalog.diseases[d], index, seed, units);
    });
    return records;
}

GroundTruthLedger build_ledger(const std::vector<PatientRecord>& records) {
    GroundTruthLedger ledger;
    for (const auto& r : records) {
        std::map<std::string, std::vector<std::string>> event_ids;
        for (const auto& e : r.events) event_ids[e.variable_id].push_back(e.event_id);
        for (const auto& [variable_id, value] : r.truth) {
            LedgerEntry entry;
            entry.patient_id = r.patient_id;
            entry.disease_id = r.disease_id;
            entry.variable_id = variable_id;
            entry.true_value = value;
            if (const auto it = event_ids.find(variable_id); it != event_ids.end())
                entry.event_ids = it->second;
            ledger.entries.push_back(std::move(entry));
        }
    }
    std::sort(ledger.entries.begin(), ledger.entries.end(),
              [](const LedgerEntry& a, const LedgerEntry& b) {
                  return std::tie(a.disease_id, a.patient_id, a.variable_id) <
                         std::tie(b.disease_id, b.patient_id, b.variable_id);
              });
    return ledger;
}

} // namespace clinistruct
