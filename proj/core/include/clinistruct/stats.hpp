#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace clinistruct::stats {

double mean(std::span<const double> xs);

/// Bessel-corrected sample variance; needs at least two observations.
double sample_variance(std::span<const double> xs);

/// Binomial standard error sqrt(p (1-p) / n) of a proportion.
double standard_error_proportion(double p, std::size_t n);

/// Pooled-SD standardized mean difference (a minus b).
double cohens_d(std::span<const double> a, std::span<const double> b);

/// Band label for |d|: "small" below 0.3, "small-to-medium" below 0.5,
/// "medium" below 0.8, "large" otherwise.
std::string_view effect_size_band(double d);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite df.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct MannWhitneyResult {
    double u1 = 0.0;
    double u2 = 0.0;
    double u = 0.0; ///< min(u1, u2), the reported statistic
    double p_two_sided = 1.0;
    bool exact = false; ///< exact enumeration vs normal approximation
};

/// Two-sided Mann-Whitney U with midranks. Exact enumeration of group
/// labelings when n1*n2 <= 64, otherwise the tie-corrected normal
/// approximation with continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct BootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
    double point = 0.0;
};

/// Percentile bootstrap CI for the mean; fully deterministic in the seed
/// (each resample draws from its own derived stream).
BootstrapCi bootstrap_mean_ci(std::span<const double> xs, std::size_t resamples,
                              double confidence, std::uint64_t seed);

/// Percentile bootstrap CI for mean(a) - mean(b), resampling both sides.
BootstrapCi bootstrap_mean_diff_ci(std::span<const double> a, std::span<const double> b,
                                   std::size_t resamples, double confidence, std::uint64_t seed);

} // namespace clinistruct::stats
