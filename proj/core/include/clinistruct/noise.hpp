#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace clinistruct {

/// Event-level corruption rates applied when documents are rendered.
///
/// Channels:
///  - synonym_swap: replace the surface form with a registered synonym; when
///    the chosen synonym is shared by several concepts of the disease the
///    code is dropped from that occurrence, leaving only the ambiguous text.
///  - typo: one-character edit of the surface form; codes and values are
///    never touched.
///  - duplicate_conflict: an event is copied into a second document with a
///    different value and a later timestamp.
///  - omission: an occurrence disappears from a document.
///  - format_jitter: dotted dates and re-cased units instead of the
///    canonical spellings.
///
/// ambiguity_boost multiplies every channel rate for variables tagged with
/// the given ambiguity class (rates are clamped to [0, 1]).
struct NoiseProfile {
    double synonym_swap_rate = 0.0;
    double typo_rate = 0.0;
    double duplicate_conflict_rate = 0.0;
    double omission_rate = 0.0;
    double format_jitter_rate = 0.0;
    std::map<std::string, double> ambiguity_boost;

    bool is_zero() const;

    /// Channel rate for a variable of the given ambiguity class ("" = none).
    double effective(double base_rate, const std::string& ambiguity_class) const;

    /// Throws ValidationError when a rate is outside [0, 1] or a boost is
    /// negative.
    void validate() const;

    static NoiseProfile zero();
    /// Named presets: "zero", "mild", "ambiguity".
    static NoiseProfile preset(std::string_view name);
    static NoiseProfile load(const std::filesystem::path& path);
};

} // namespace clinistruct
