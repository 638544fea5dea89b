#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace clinistruct {

/// Deterministic pseudo-random stream (splitmix64).
///
/// The standard <random> engines are portable but the distributions are not;
/// every draw here is spelled out so that a given seed produces the same
/// bytes on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Debiased via rejection sampling on the top of the range.
        const std::uint64_t threshold = -n % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform integer in [lo, hi] (inclusive).
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// True with probability p.
    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return unit() < p;
    }

    /// Index into a container of the given size. size must be > 0.
    std::size_t pick(std::size_t size) { return static_cast<std::size_t>(below(size)); }

private:
    std::uint64_t state_;
};

/// FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail {

struct SeedMixer {
    std::uint64_t h = 0xcbf29ce484222325ull;

    void mix_word(std::uint64_t v) {
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        h = fnv1a64(std::string_view(buf, 8), h);
    }

    void mix(std::string_view s) {
        h = fnv1a64(s, h);
        h = fnv1a64(std::string_view("\xff", 1), h); // separator so ("ab","c") != ("a","bc")
    }

    void mix(const char* s) { mix(std::string_view(s)); }
    void mix(const std::string& s) { mix(std::string_view(s)); }

    template <typename T, std::enable_if_t<std::is_integral_v<T>, int> = 0>
    void mix(T v) {
        mix_word(static_cast<std::uint64_t>(v));
    }
};

} // namespace detail

/// Stable sub-seed derived from a base seed and a tuple of labels.
/// Used everywhere a per-entity stream is needed (per patient, per document,
/// per noise channel) so that entities are independent of iteration order.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, const Parts&... parts) {
    detail::SeedMixer m;
    m.mix(base);
    (m.mix(parts), ...);
    // One splitmix64 scramble so nearby inputs do not give nearby states.
    return Rng(m.h).next();
}

} // namespace clinistruct
