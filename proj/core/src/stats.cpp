#include "clinistruct/stats.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace clinistruct::stats {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require_nonempty(std::span<const double> xs, const char* who) {
    if (xs.empty()) throw ValidationError(std::string(who) + ": empty sample");
}

/// Midranks of the pooled sample, in pooled order (a first, then b).
std::vector<double> midranks(std::span<const double> a, std::span<const double> b) {
    struct Item {
        double value;
        std::size_t index;
    };
    std::vector<Item> items;
    items.reserve(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); ++i) items.push_back(Item{a[i], i});
    for (std::size_t i = 0; i < b.size(); ++i) items.push_back(Item{b[i], a.size() + i});
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return x.value < y.value; });

    std::vector<double> ranks(items.size());
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].value == items[i].value) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[items[k].index] = rank;
        i = j;
    }
    return ranks;
}

} // namespace

double mean(std::span<const double> xs) {
    require_nonempty(xs, "mean");
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw ValidationError("sample_variance: need at least two observations");
    const double m = mean(xs);
    double sum = 0.0;
    for (const double x : xs) sum += (x - m) * (x - m);
    return sum / static_cast<double>(xs.size() - 1);
}

double standard_error_proportion(double p, std::size_t n) {
    if (p < 0.0 || p > 1.0) throw ValidationError("standard_error_proportion: p outside [0, 1]");
    if (n == 0) throw ValidationError("standard_error_proportion: n must be positive");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
    const double va = sample_variance(a);
    const double vb = sample_variance(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
    const double diff = mean(a) - mean(b);
    if (pooled == 0.0) {
        if (diff == 0.0) return 0.0;
        throw ValidationError("cohens_d: zero pooled variance with unequal means");
    }
    return diff / pooled;
}

std::string_view effect_size_band(double d) {
    const double m = std::fabs(d);
    if (m < 0.3) return "small";
    if (m < 0.5) return "small-to-medium";
    if (m < 0.8) return "medium";
    return "large";
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    const double va = sample_variance(a);
    const double vb = sample_variance(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double diff = mean(a) - mean(b);
    const double se2 = va / na + vb / nb;

    TTestResult r;
    if (se2 == 0.0) {
        // Degenerate constant samples: identical means are a perfect null,
        // different means are an unambiguous separation.
        r.t = 0.0;
        r.df = na + nb - 2.0;
        r.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.t = diff / std::sqrt(se2);
    const double da = (va / na) * (va / na) / (na - 1.0);
    const double db = (vb / nb) * (vb / nb) / (nb - 1.0);
    r.df = se2 * se2 / (da + db);
    const boost::math::students_t_distribution<double> dist(r.df);
    r.p_two_sided = 2.0 * boost::math::cdf(dist, -std::fabs(r.t));
    return r;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, "mann_whitney_u");
    require_nonempty(b, "mann_whitney_u");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;
    const std::vector<double> ranks = midranks(a, b);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double products = static_cast<double>(n1) * static_cast<double>(n2);

    MannWhitneyResult r;
    r.u1 = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
    r.u2 = products - r.u1;
    r.u = std::min(r.u1, r.u2);

    if (n1 * n2 <= 64) {
        // Exact null distribution of U1 over all group labelings of the
        // pooled sample, ties included.
        r.exact = true;
        std::vector<std::size_t> pick(n1);
        for (std::size_t i = 0; i < n1; ++i) pick[i] = i;
        std::size_t total = 0;
        std::size_t low = 0;
        std::size_t high = 0;
        const double eps = 1e-9;
        for (;;) {
            double rs = 0.0;
            for (const std::size_t idx : pick) rs += ranks[idx];
            const double u1 = rs - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
            ++total;
            if (u1 <= r.u + eps) ++low;
            if (u1 >= products - r.u - eps) ++high;

            // next combination
            std::size_t k = n1;
            while (k > 0 && pick[k - 1] == n - n1 + k - 1) --k;
            if (k == 0) break;
            ++pick[k - 1];
            for (std::size_t j = k; j < n1; ++j) pick[j] = pick[j - 1] + 1;
        }
        // An observation at the distribution center makes the two tails
        // cover everything; otherwise they are disjoint.
        if (std::fabs((products - r.u) - r.u) <= eps) {
            r.p_two_sided = 1.0;
        } else {
            r.p_two_sided = std::min(1.0, static_cast<double>(low + high) /
                                              static_cast<double>(total));
        }
        return r;
    }

    std::map<double, std::size_t> tie_groups;
    for (const double rank : ranks) ++tie_groups[rank];
    double tie_term = 0.0;
    for (const auto& [rank, t] : tie_groups) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double nd = static_cast<double>(n);
    const double sigma2 =
        products / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    r.exact = false;
    if (sigma2 <= 0.0) {
        r.p_two_sided = 1.0;
        return r;
    }
    const double mu = products / 2.0;
    const double z = (r.u - mu + 0.5) / std::sqrt(sigma2);
    r.p_two_sided = std::min(1.0, 2.0 * normal_cdf(z));
    return r;
}

namespace {

BootstrapCi percentile_ci(std::vector<double> samples, double point, double confidence) {
    if (samples.empty()) throw ValidationError("bootstrap: no resamples");
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw ValidationError("bootstrap: confidence outside (0, 1)");
    }
    std::sort(samples.begin(), samples.end());
    const auto at_quantile = [&](double q) {
        const double pos = q * static_cast<double>(samples.size());
        auto idx = static_cast<std::size_t>(std::ceil(pos));
        idx = idx == 0 ? 0 : idx - 1;
        idx = std::min(idx, samples.size() - 1);
        return samples[idx];
    };
    const double alpha = 1.0 - confidence;
    BootstrapCi ci;
    ci.lo = at_quantile(alpha / 2.0);
    ci.hi = at_quantile(1.0 - alpha / 2.0);
    ci.point = point;
    return ci;
}

double resample_mean(std::span<const double> xs, Rng& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += xs[rng.pick(xs.size())];
    return sum / static_cast<double>(xs.size());
}

} // namespace

BootstrapCi bootstrap_mean_ci(std::span<const double> xs, std::size_t resamples,
                              double confidence, std::uint64_t seed) {
    require_nonempty(xs, "bootstrap_mean_ci");
    std::vector<double> samples;
    samples.reserve(resamples);
    for (std::size_t i = 0; i < resamples; ++i) {
        Rng rng(derive_seed(seed, "bootstrap", i));
        samples.push_back(resample_mean(xs, rng));
    }
    return percentile_ci(std::move(samples), mean(xs), confidence);
}

BootstrapCi bootstrap_mean_diff_ci(std::span<const double> a, std::span<const double> b,
                                   std::size_t resamples, double confidence, std::uint64_t seed) {
    require_nonempty(a, "bootstrap_mean_diff_ci");
    require_nonempty(b, "bootstrap_mean_diff_ci");
    std::vector<double> samples;
    samples.reserve(resamples);
    for (std::size_t i = 0; i < resamples; ++i) {
        Rng ra(derive_seed(seed, "bootstrap-a", i));
        Rng rb(derive_seed(seed, "bootstrap-b", i));
        samples.push_back(resample_mean(a, ra) - resample_mean(b, rb));
    }
    return percentile_ci(std::move(samples), mean(a) - mean(b), confidence);
}

} // namespace clinistruct::stats
