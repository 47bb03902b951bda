#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "frontlab/rng.hpp"

using namespace frontlab;

TEST_CASE("derive_seed is injective over a large index range") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(derive_seed(12345, i));
    CHECK(seen.size() == 1000000);
}

TEST_CASE("derive_seed is a pure function") {
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(7, 4));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("derived seeds spread over the low 16 bits") {
    // chi-square over 256 buckets of the low byte; 1% critical value for
    // df=255 is ~310.5
    std::vector<double> counts(256, 0.0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) counts[derive_seed(99, i) & 0xff] += 1.0;
    const double expected = n / 256.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 310.5);
}

TEST_CASE("same seed gives identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0,1) and has the right moments") {
    Rng rng(1);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(std::fabs(sum / n - 0.5) < 0.003);
    CHECK(std::fabs(sum2 / n - 1.0 / 3.0) < 0.003);
}

TEST_CASE("normal moments") {
    Rng rng(2);
    double s1 = 0, s2 = 0, s4 = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.normal();
        s1 += g;
        s2 += g * g;
        s4 += g * g * g * g;
    }
    CHECK(std::fabs(s1 / n) < 0.01);
    CHECK(std::fabs(s2 / n - 1.0) < 0.01);
    CHECK(std::fabs(s4 / n - 3.0) < 0.06);
}

TEST_CASE("poisson mean and variance") {
    Rng rng(3);
    for (double mean : {0.5, 8.0, 120.0}) {
        double s1 = 0, s2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            s1 += k;
            s2 += k * k;
        }
        const double m = s1 / n;
        const double v = s2 / n - m * m;
        CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n) + 1e-9);
        CHECK(std::fabs(v - mean) < 0.05 * mean + 0.05);
    }
}

TEST_CASE("binomial sampler is exactly binomial (chi-square, small n)") {
    // n=6, p=0.3: compare observed against exact pmf; df=6, 1% critical 16.81
    Rng rng(4);
    const int n_draws = 300000;
    std::vector<double> obs(7, 0.0);
    for (int i = 0; i < n_draws; ++i) obs[rng.binomial(6, 0.3)] += 1.0;
    auto pmf = [](int k) {
        const double comb[] = {1, 6, 15, 20, 15, 6, 1};
        return comb[k] * std::pow(0.3, k) * std::pow(0.7, 6 - k);
    };
    double chi2 = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const double e = n_draws * pmf(k);
        chi2 += (obs[k] - e) * (obs[k] - e) / e;
    }
    CHECK(chi2 < 16.81);
}

TEST_CASE("binomial BTRS regime matches moments") {
    Rng rng(5);
    const std::uint64_t n = 500000;
    const double p = 0.37;
    double s1 = 0, s2 = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const double k = static_cast<double>(rng.binomial(n, p));
        s1 += k;
        s2 += k * k;
    }
    const double m = s1 / draws;
    const double v = s2 / draws - m * m;
    const double mean = n * p, var = n * p * (1 - p);
    CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(var / draws));
    CHECK(std::fabs(v / var - 1.0) < 0.05);
}

TEST_CASE("binomial edge cases") {
    Rng rng(6);
    CHECK(rng.binomial(0, 0.5) == 0);
    CHECK(rng.binomial(10, 0.0) == 0);
    CHECK(rng.binomial(10, 1.0) == 10);
    CHECK_THROWS(rng.binomial(10, 1.5));
}
