#include "clinistruct/stats.hpp"

#include "clinistruct/errors.hpp"
#include "clinistruct/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

using namespace clinistruct;
using namespace clinistruct::stats;

namespace {

/// Exact two-sided Mann-Whitney p by brute-force enumeration of all
/// C(n1+n2, n1) group labelings, midranks throughout. Independent of the
/// library implementation: ranks are computed from scratch here.
double enumerated_mwu_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    const std::size_t n1 = a.size();

    // Midranks of the pooled sample.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = mid;
        i = j;
    }

    const auto u_of = [&](const std::vector<std::size_t>& members) {
        double r1 = 0.0;
        for (const auto i : members) r1 += rank[i];
        const double u1 = r1 - static_cast<double>(n1 * (n1 + 1)) / 2.0;
        const double u2 = static_cast<double>(n1 * (b.size())) - u1;
        return std::min(u1, u2);
    };

    std::vector<std::size_t> observed(n1);
    for (std::size_t i = 0; i < n1; ++i) observed[i] = i;
    const double u_obs = u_of(observed);

    std::size_t total = 0;
    std::size_t extreme = 0;
    std::vector<std::size_t> pick(n1);
    const auto recurse = [&](auto&& self, std::size_t next, std::size_t depth) -> void {
        if (depth == n1) {
            ++total;
            if (u_of(pick) <= u_obs + 1e-12) ++extreme;
            return;
        }
        for (std::size_t i = next; i + (n1 - depth) <= n; ++i) {
            pick[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    recurse(recurse, 0, 0);
    return static_cast<double>(extreme) / static_cast<double>(total);
}

} // namespace

TEST_CASE("mean and sample variance basics") {
    const std::array<double, 4> xs = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean(xs) == doctest::Approx(2.5));
    CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(mean(std::span<const double>{}), ValidationError);
    const std::array<double, 1> one = {7.0};
    CHECK_THROWS_AS(sample_variance(one), ValidationError);
    const std::array<double, 3> flat = {5.0, 5.0, 5.0};
    CHECK(sample_variance(flat) == 0.0);
}

TEST_CASE("standard error of a proportion matches the closed form") {
    // sqrt(0.95 * 0.05 / 1000) = 0.0068920...; the published figure rounds
    // to 0.0069 at four decimals.
    const double se = standard_error_proportion(0.95, 1000);
    CHECK(se == doctest::Approx(0.0068920).epsilon(1e-4));
    CHECK(std::round(se * 1e4) / 1e4 == doctest::Approx(0.0069));

    CHECK(standard_error_proportion(0.0, 10) == 0.0);
    CHECK(standard_error_proportion(1.0, 10) == 0.0);
    CHECK(standard_error_proportion(0.5, 4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(standard_error_proportion(-0.1, 10), ValidationError);
    CHECK_THROWS_AS(standard_error_proportion(1.1, 10), ValidationError);
    CHECK_THROWS_AS(standard_error_proportion(0.5, 0), ValidationError);
}

TEST_CASE("standard error is bounded by 0.5 / sqrt(n)") {
    Rng rng(404);
    for (int i = 0; i < 500; ++i) {
        const double p = rng.unit();
        const std::size_t n = 1 + rng.below(10000);
        CHECK(standard_error_proportion(p, n) <=
              0.5 / std::sqrt(static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("cohens_d matches the hand-computed fixture") {
    const std::array<double, 2> a = {70.0, 80.0};
    const std::array<double, 2> b = {85.0, 95.0};
    // Pooled SD = sqrt(50), diff = -15 => d = -15/sqrt(50) = -2.1213203...
    CHECK(cohens_d(a, b) == doctest::Approx(-2.1213203).epsilon(1e-4));
    CHECK(cohens_d(b, a) == doctest::Approx(2.1213203).epsilon(1e-4));

    const std::array<double, 3> same = {4.0, 5.0, 6.0};
    CHECK(cohens_d(same, same) == 0.0);

    const std::array<double, 2> flat1 = {1.0, 1.0};
    const std::array<double, 2> flat2 = {2.0, 2.0};
    CHECK_THROWS_AS(cohens_d(flat1, flat2), ValidationError);
}

TEST_CASE("effect size bands change exactly at 0.3, 0.5 and 0.8") {
    struct Fixture {
        double d;
        std::string_view band;
    };
    const Fixture table[] = {
        {0.0, "small"},       {0.29999, "small"},
        {0.3, "small-to-medium"}, {0.49999, "small-to-medium"},
        {0.5, "medium"},      {0.79999, "medium"},
        {0.8, "large"},       {2.5, "large"},
        {-0.29999, "small"},  {-0.3, "small-to-medium"},
        {-0.5, "medium"},     {-0.8, "large"},
    };
    for (const auto& row : table) {
        CHECK(effect_size_band(row.d) == row.band);
    }
}

TEST_CASE("welch t-test on identical samples: t = 0, p = 1") {
    const std::array<double, 5> xs = {3.0, 1.0, 4.0, 1.0, 5.0};
    const TTestResult r = welch_t_test(xs, xs);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p_two_sided == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("welch t-test flags a clear separation") {
    const std::array<double, 4> lo = {1.0, 2.0, 1.5, 1.8};
    const std::array<double, 4> hi = {10.0, 11.0, 10.5, 10.8};
    const TTestResult r = welch_t_test(lo, hi);
    CHECK(r.t < -10.0);
    CHECK(r.p_two_sided < 1e-4);
    CHECK(r.df > 0.0);
    // Sign flips with the argument order, p stays put.
    const TTestResult rr = welch_t_test(hi, lo);
    CHECK(rr.t == doctest::Approx(-r.t));
    CHECK(rr.p_two_sided == doctest::Approx(r.p_two_sided));
}

TEST_CASE("mann-whitney {1,2} vs {3,4}: exact p = 1/3") {
    const std::array<double, 2> a = {1.0, 2.0};
    const std::array<double, 2> b = {3.0, 4.0};
    const MannWhitneyResult r = mann_whitney_u(a, b);
    CHECK(r.exact);
    CHECK(r.u == doctest::Approx(0.0));
    CHECK(r.p_two_sided == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("exact mann-whitney equals brute-force enumeration for n1*n2 <= 16") {
    Rng rng(2024);
    std::size_t cases = 0;
    for (std::size_t n1 = 1; n1 <= 4; ++n1) {
        for (std::size_t n2 = 1; n2 <= 4; ++n2) {
            for (int rep = 0; rep < 12; ++rep) {
                std::vector<double> a(n1);
                std::vector<double> b(n2);
                // Small integer support forces plenty of ties.
                for (auto& x : a) x = static_cast<double>(rng.below(5));
                for (auto& x : b) x = static_cast<double>(rng.below(5));
                const MannWhitneyResult r = mann_whitney_u(a, b);
                REQUIRE(r.exact);
                const double expected = enumerated_mwu_p(a, b);
                CHECK(r.p_two_sided == doctest::Approx(expected).epsilon(1e-12));
                CHECK(r.u == doctest::Approx(std::min(r.u1, r.u2)));
                CHECK(r.u1 + r.u2 == doctest::Approx(static_cast<double>(n1 * n2)));
                ++cases;
            }
        }
    }
    CHECK(cases == 16 * 12);
}

TEST_CASE("large-sample mann-whitney switches to the normal approximation") {
    std::vector<double> a(40);
    std::vector<double> b(40);
    Rng rng(7);
    for (auto& x : a) x = static_cast<double>(rng.below(1000));
    for (auto& x : b) x = static_cast<double>(rng.below(1000)) + 100.0;
    const MannWhitneyResult r = mann_whitney_u(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p_two_sided > 0.0);
    CHECK(r.p_two_sided <= 1.0);
}

TEST_CASE("bootstrap_mean_ci is deterministic and brackets the mean") {
    std::vector<double> xs;
    Rng rng(99);
    for (int i = 0; i < 60; ++i) xs.push_back(static_cast<double>(rng.below(100)));

    const BootstrapCi a = bootstrap_mean_ci(xs, 2000, 0.95, 31337);
    const BootstrapCi b = bootstrap_mean_ci(xs, 2000, 0.95, 31337);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.point == doctest::Approx(mean(xs)));
    CHECK(a.lo <= a.point);
    CHECK(a.point <= a.hi);

    const BootstrapCi c = bootstrap_mean_ci(xs, 2000, 0.95, 31338);
    CHECK((a.lo != c.lo || a.hi != c.hi)); // seed matters

    const BootstrapCi wide = bootstrap_mean_ci(xs, 2000, 0.99, 31337);
    CHECK(wide.hi - wide.lo >= a.hi - a.lo); // higher confidence widens
}

TEST_CASE("bootstrap of a constant sample collapses to a point") {
    const std::array<double, 10> flat = {2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
    const BootstrapCi ci = bootstrap_mean_ci(flat, 500, 0.95, 1);
    CHECK(ci.lo == 2.0);
    CHECK(ci.hi == 2.0);
    CHECK(ci.point == 2.0);
}

TEST_CASE("bootstrap_mean_diff_ci covers an obvious gap and rejects bad input") {
    const std::array<double, 6> a = {10.0, 11.0, 12.0, 10.5, 11.5, 12.5};
    const std::array<double, 6> b = {1.0, 2.0, 1.5, 2.5, 1.2, 2.2};
    const BootstrapCi ci = bootstrap_mean_diff_ci(a, b, 2000, 0.95, 5);
    CHECK(ci.point == doctest::Approx(mean(a) - mean(b)));
    CHECK(ci.lo > 5.0);
    CHECK(ci.hi < 12.0);
    CHECK(ci.lo <= ci.hi);

    CHECK_THROWS_AS(bootstrap_mean_ci(a, 0, 0.95, 1), ValidationError);
    CHECK_THROWS_AS(bootstrap_mean_ci(a, 100, 1.5, 1), ValidationError);
}

TEST_CASE("bootstrap coverage of Bernoulli(0.9) with n=200 sits near nominal") {
    // 500 simulated datasets; each gets a 95% percentile CI from 1000
    // resamples. Coverage of the true mean 0.9 should land close to 0.95
    // (percentile intervals on a skewed Bernoulli mean run slightly under).
    const double p_true = 0.9;
    const std::size_t n = 200;
    const int reps = 500;
    int covered = 0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(derive_seed(20240817, "coverage", rep));
        std::vector<double> sample(n);
        for (auto& x : sample) x = rng.chance(p_true) ? 1.0 : 0.0;
        const BootstrapCi ci =
            bootstrap_mean_ci(sample, 1000, 0.95, derive_seed(20240817, "ci", rep));
        if (ci.lo <= p_true && p_true <= ci.hi) ++covered;
    }
    const double coverage = static_cast<double>(covered) / reps;
    CHECK(coverage >= 0.93);
    CHECK(coverage <= 0.97);
}
