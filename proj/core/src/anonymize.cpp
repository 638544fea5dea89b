#include "clinistruct/anonymize.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>

namespace clinistruct {

using nlohmann::json;

const std::string& IdentityMap::pseudonym(const std::string& raw_id) const {
    const auto it = forward.find(raw_id);
    if (it == forward.end()) throw NotFoundError("no pseudonym for patient " + raw_id);
    return it->second;
}

std::map<std::string, std::string> IdentityMap::reverse() const {
    std::map<std::string, std::string> out;
    for (const auto& [raw, pseud] : forward) {
        if (!out.emplace(pseud, raw).second) {
            throw ValidationError("pseudonym " + pseud + " maps to several patients");
        }
    }
    return out;
}

IdentityMap build_identity_map(const std::vector<PatientRecord>& records, std::uint64_t seed) {
    std::vector<std::pair<std::uint64_t, std::string>> ranked;
    ranked.reserve(records.size());
    for (const auto& r : records) {
        ranked.emplace_back(derive_seed(seed, "pseudonym", r.patient_id), r.patient_id);
    }
    std::sort(ranked.begin(), ranked.end());

    IdentityMap map;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (!map.forward.emplace(ranked[i].second, "P_" + std::to_string(i + 1)).second) {
            throw ValidationError("duplicate patient id " + ranked[i].second);
        }
    }
    return map;
}

void write_identity_map(const IdentityMap& map, const std::filesystem::path& path) {
    json patients = json::array();
    for (const auto& [raw, pseud] : map.forward) {
        patients.push_back(json{{"patient_id", raw}, {"pseudonym", pseud}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << json{{"patients", patients}}.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

IdentityMap read_identity_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    IdentityMap map;
    for (const auto& entry : doc.at("patients")) {
        map.forward.emplace(entry.at("patient_id").get<std::string>(),
                            entry.at("pseudonym").get<std::string>());
    }
    return map;
}

// ---- PiiScrubber -----------------------------------------------------------

PiiScrubber::PiiScrubber(const std::vector<PatientRecord>& records, const IdentityMap& ids) {
    nodes_.emplace_back();
    for (const auto& r : records) {
        const Demographics& d = r.demographics;
        add_pattern(r.patient_id, ids.pseudonym(r.patient_id));
        add_pattern(d.full_name(), std::string(kNameMarker));
        add_pattern(d.hl7_name(), std::string(kNameMarker));
        add_pattern(d.given_name, std::string(kNameMarker));
        add_pattern(d.family_name, std::string(kNameMarker));
        add_pattern(d.address(), std::string(kAddressMarker));
        add_pattern(d.street, std::string(kAddressMarker));
        add_pattern(d.birth_date, std::string(kDobMarker));
        add_pattern(text::iso_to_hl7_timestamp(d.birth_date), std::string(kDobMarker));
        add_pattern(text::iso_date_to_dotted(d.birth_date), std::string(kDobMarker));
    }
    compile();
}

void PiiScrubber::add_pattern(const std::string& token, std::string replacement) {
    if (token.empty()) throw ValidationError("empty scrub pattern");
    int state = 0;
    for (const char c : token) {
        const auto it = nodes_[state].next.find(c);
        if (it == nodes_[state].next.end()) {
            nodes_.emplace_back();
            state = nodes_[state].next[c] = static_cast<int>(nodes_.size()) - 1;
        } else {
            state = it->second;
        }
    }
    if (nodes_[state].pattern >= 0) return; // same token registered twice
    nodes_[state].pattern = static_cast<int>(patterns_.size());
    patterns_.emplace_back(token, std::move(replacement));
}

void PiiScrubber::compile() {
    std::deque<int> queue;
    for (const auto& [c, child] : nodes_[0].next) {
        nodes_[child].fail = 0;
        queue.push_back(child);
    }
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& [c, v] : nodes_[u].next) {
            nodes_[v].fail = step(nodes_[u].fail, c);
            const int f = nodes_[v].fail;
            nodes_[v].out = nodes_[f].pattern >= 0 ? f : nodes_[f].out;
            queue.push_back(v);
        }
    }
}

int PiiScrubber::step(int state, char c) const {
    for (;;) {
        const auto it = nodes_[state].next.find(c);
        if (it != nodes_[state].next.end()) return it->second;
        if (state == 0) return 0;
        state = nodes_[state].fail;
    }
}

std::vector<PiiScrubber::Match> PiiScrubber::collect(std::string_view body) const {
    std::vector<Match> matches;
    int state = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        state = step(state, body[i]);
        for (int s = state; s != 0; s = nodes_[s].out) {
            const int p = nodes_[s].pattern;
            if (p >= 0) {
                const std::size_t len = patterns_[p].first.size();
                matches.push_back(Match{i + 1 - len, len, p});
            }
        }
    }
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.length > b.length;
    });
    return matches;
}

std::string PiiScrubber::scrub(std::string_view body) const {
    const std::vector<Match> matches = collect(body);
    std::string out;
    out.reserve(body.size());
    std::size_t cursor = 0;
    for (const Match& m : matches) {
        if (m.start < cursor) continue; // subsumed by an earlier, longer match
        out.append(body.substr(cursor, m.start - cursor));
        out.append(patterns_[m.pattern].second);
        cursor = m.start + m.length;
    }
    out.append(body.substr(cursor));
    return out;
}

std::optional<std::string> PiiScrubber::find_identifier(std::string_view body) const {
    int state = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        state = step(state, body[i]);
        const int s = nodes_[state].pattern >= 0 ? state : nodes_[state].out;
        if (s != 0 && nodes_[s].pattern >= 0) return patterns_[nodes_[s].pattern].first;
    }
    return std::nullopt;
}

} // namespace clinistruct
