#pragma once

#include "clinistruct/patient.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clinistruct {

/// Raw patient id -> stable pseudonym ("P_1" .. "P_N"). Pseudonyms are
/// assigned by rank of a salted hash, so they leak neither generation order
/// nor disease grouping.
struct IdentityMap {
    std::map<std::string, std::string> forward;

    const std::string& pseudonym(const std::string& raw_id) const; ///< throws NotFoundError
    std::map<std::string, std::string> reverse() const;
};

IdentityMap build_identity_map(const std::vector<PatientRecord>& records, std::uint64_t seed);

/// The map is the only artifact linking pseudonyms back to raw ids; the
/// pipeline keeps it under a private/ directory away from the shareable tree.
void write_identity_map(const IdentityMap& map, const std::filesystem::path& path);
IdentityMap read_identity_map(const std::filesystem::path& path);

/// Multi-pattern replacement of direct identifiers, built once per corpus and
/// applied to every document (Aho-Corasick, leftmost-longest match).
///
/// Patterns per patient: raw id (replaced by the pseudonym), full and
/// HL7-ordered names, bare given/family names, street, full address, and the
/// birth date in ISO, compact-HL7 and dotted forms (replaced by tagged
/// redaction markers).
class PiiScrubber {
public:
    PiiScrubber(const std::vector<PatientRecord>& records, const IdentityMap& ids);

    std::string scrub(std::string_view body) const;

    /// First identifier still present, or nullopt when the body is clean.
    std::optional<std::string> find_identifier(std::string_view body) const;

    std::size_t pattern_count() const { return patterns_.size(); }

    static constexpr std::string_view kNameMarker = "[REDACTED-NAME]";
    static constexpr std::string_view kAddressMarker = "[REDACTED-ADDRESS]";
    static constexpr std::string_view kDobMarker = "[REDACTED-DOB]";

private:
    struct Node {
        std::map<char, int> next;
        int fail = 0;
        int out = 0;      ///< nearest suffix state that ends a pattern (0 = none)
        int pattern = -1; ///< pattern ending at this state
    };

    struct Match {
        std::size_t start = 0;
        std::size_t length = 0;
        int pattern = -1;
    };

    void add_pattern(const std::string& token, std::string replacement);
    void compile();
    int step(int state, char c) const;
    std::vector<Match> collect(std::string_view body) const;

    std::vector<std::pair<std::string, std::string>> patterns_; ///< token -> replacement
    std::vector<Node> nodes_;
};

} // namespace clinistruct
