#include <doctest.h>

#include <cmath>
#include <vector>

#include "frontlab/rng.hpp"
#include "frontlab/stats.hpp"

using namespace frontlab;

TEST_CASE("least squares recovers an exact line") {
    std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> y = {1, 3, 5, 7, 9};
    auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.slope_se == doctest::Approx(0.0));
}

TEST_CASE("survival table counts exceedances") {
    std::vector<double> sample = {1, 2, 3, 4, 5};
    std::vector<double> thr = {0.5, 2.5, 5.0};
    auto t = survival_on_grid(sample, thr);
    CHECK(t.count[0] == 5);
    CHECK(t.count[1] == 3);
    CHECK(t.count[2] == 0);
}

TEST_CASE("ks statistic of identical samples is zero") {
    std::vector<double> a = {1, 2, 3, 4};
    CHECK(ks_two_sample(a, a) == doctest::Approx(0.0));
}

TEST_CASE("ks statistic of disjoint samples is one") {
    std::vector<double> a = {1, 2}, b = {10, 11};
    CHECK(ks_two_sample(a, b) == doctest::Approx(1.0));
}

TEST_CASE("ks self-test: same-distribution samples pass at 1% most of the time") {
    int rejections = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(77, r));
        std::vector<double> a(2000), b(2000);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        if (ks_two_sample(a, b) >= ks_two_sample_critical(a.size(), b.size(), 0.01)) ++rejections;
    }
    CHECK(rejections <= 5);  // nominal 1 of 100
}

TEST_CASE("cumulants of a deterministic linear sequence") {
    // increments of a linear trace are constant: k1 = slope, k2=k3=k4=0
    std::vector<double> incs(40, 0.7);
    auto cs = sample_cumulants(incs);
    CHECK(cs.k1 == doctest::Approx(0.7));
    CHECK(cs.k2 == doctest::Approx(0.0));
    CHECK(cs.k3 == doctest::Approx(0.0));
    CHECK(cs.k4 == doctest::Approx(0.0));
}

TEST_CASE("cumulants of gaussian data: k2 near sigma^2, k3 and k4 near zero") {
    Rng rng(8);
    const double sigma = 1.7;
    std::vector<double> data(4000);
    for (auto& v : data) v = sigma * rng.normal();
    auto cs = sample_cumulants(data);
    CHECK(std::fabs(cs.k2 - sigma * sigma) < 3.0 * cs.se2);
    CHECK(std::fabs(cs.k3) < 4.0 * cs.se3);
    CHECK(std::fabs(cs.k4) < 4.0 * cs.se4);
    CHECK(cs.se2 > 0.0);
}

TEST_CASE("bootstrap slope error is positive and modest for a clean power law") {
    Rng rng(9);
    std::vector<double> sample(20000);
    for (auto& v : sample) v = 1.0 / rng.uniform_pos();  // Pareto(1): P(X>x)=1/x
    auto thr = log_spaced(2.0, 20.0, 10);
    Rng boot(10);
    const double se = bootstrap_tail_slope_se(sample, thr, boot);
    CHECK(se > 0.0);
    CHECK(se < 0.2);
}

TEST_CASE("log_spaced endpoints") {
    auto g = log_spaced(2.0, 32.0, 5);
    CHECK(g.front() == doctest::Approx(2.0));
    CHECK(g.back() == doctest::Approx(32.0));
    CHECK(g[1] / g[0] == doctest::Approx(2.0));
}
