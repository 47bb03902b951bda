#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "frontlab/quadrature.hpp"
#include "frontlab/rng.hpp"
#include "frontlab/theta.hpp"

using namespace frontlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

// independent Fourier evaluation used as the cross-representation oracle
double theta_fourier_oracle(double x, double t) {
    double s = 0.5;
    for (int n = 1; n < 300; ++n) {
        const double d = std::exp(-0.5 * kPi * kPi * n * n * t);
        if (d < 1e-20) break;
        s += d * std::cos(kPi * n * x);
    }
    return s;
}

double theta_gaussian_oracle(double x, double t) {
    double s = 0.0;
    for (int n = -60; n <= 60; ++n) s += std::exp(-(x - 2.0 * n) * (x - 2.0 * n) / (2.0 * t));
    return s / std::sqrt(2.0 * kPi * t);
}
}  // namespace

TEST_CASE("theta frozen values") {
    // (2 pi 0.01)^{-1/2}; all other Gaussian terms < 1e-80
    CHECK(theta(0.0, 0.01) == doctest::Approx(3.9894228040143268).epsilon(1e-12));
    // 1/2 - e^{-pi^2/2} + e^{-2 pi^2} - ...
    const double expected = 0.5 - std::exp(-kPi * kPi / 2.0) + std::exp(-2.0 * kPi * kPi) -
                            std::exp(-4.5 * kPi * kPi);
    CHECK(theta(1.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(theta(1.0, 1.0) == doctest::Approx(0.4928082).epsilon(1e-6));
    // all exponential terms vanish
    for (double x : {0.0, 0.3, 1.0, 1.7}) CHECK(theta(x, 50.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("theta domain error") {
    CHECK_THROWS_AS(theta(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(theta(0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(theta_dx(0.0, 0.0), std::domain_error);
}

TEST_CASE("theta representations agree on the acceptance grid") {
    double max_diff = 0.0;
    for (int i = 0; i < 41; ++i) {
        const double x = 2.0 * i / 40.0;
        for (int j = 0; j < 41; ++j) {
            const double t = 0.05 + (5.0 - 0.05) * j / 40.0;
            max_diff = std::max(max_diff,
                                std::fabs(theta_fourier_oracle(x, t) - theta_gaussian_oracle(x, t)));
            // the production evaluator must match both
            CHECK(theta(x, t) == doctest::Approx(theta_fourier_oracle(x, t)).epsilon(5e-11));
        }
    }
    CHECK(max_diff < 1e-10);
}

TEST_CASE("theta is 2-periodic and even in x") {
    for (double t : {0.1, 0.7, 2.0}) {
        for (double x : {0.13, 0.5, 0.91}) {
            CHECK(theta(x, t) == doctest::Approx(theta(x + 2.0, t)).epsilon(1e-12));
            CHECK(theta(x, t) == doctest::Approx(theta(-x, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("theta solves the heat equation (finite differences)") {
    const double hx = 1e-4, ht = 1e-6;
    for (double x : {0.2, 0.6, 1.3}) {
        for (double t : {0.2, 0.8, 2.0}) {
            const double ut = (theta(x, t + ht) - theta(x, t - ht)) / (2.0 * ht);
            const double uxx =
                (theta(x + hx, t) - 2.0 * theta(x, t) + theta(x - hx, t)) / (hx * hx);
            CHECK(std::fabs(ut - 0.5 * uxx) < 1e-6);
        }
    }
}

TEST_CASE("theta_dx vanishes at integer x") {
    for (double t : {0.05, 0.5, 3.0}) {
        CHECK(theta_dx(0.0, t) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(std::fabs(theta_dx(1.0, t)) < 1e-12);
    }
}

TEST_CASE("theta_dx matches central differences of theta") {
    const double h = 1e-6;
    for (double x : {0.3, 0.77, 1.4}) {
        for (double t : {0.1, 0.7, 2.5}) {
            const double fd = (theta(x + h, t) - theta(x - h, t)) / (2.0 * h);
            CHECK(theta_dx(x, t) == doctest::Approx(fd).epsilon(1e-8));
        }
    }
    // spec spot check at (0.3, 0.7)
    const double fd = (theta(0.3 + 1e-6, 0.7) - theta(0.3 - 1e-6, 0.7)) / 2e-6;
    CHECK(std::fabs(theta_dx(0.3, 0.7) - fd) < 1e-8);
}

TEST_CASE("theta_bar endpoints and frozen value") {
    CHECK(theta_bar(0.0) == 0.0);
    CHECK(theta_bar(100.0) == doctest::Approx(1.0).epsilon(1e-14));
    const double expected = 1.0 - 4.0 * std::exp(-1.5 * kPi * kPi) + 9.0 * std::exp(-4.0 * kPi * kPi);
    CHECK(theta_bar(1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(theta_bar(1.0) == doctest::Approx(0.99999851).epsilon(1e-8));
    CHECK_THROWS_AS(theta_bar(-0.1), std::domain_error);
}

TEST_CASE("theta_bar is nondecreasing and within [0,1] on a grid") {
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double t = 0.01 * i;
        const double v = theta_bar(t);
        CHECK(v >= prev - 1e-13);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("theta_bar_dt matches finite differences across the crossover") {
    for (double t : {0.05, 0.2, 0.45, 0.55, 1.0, 2.0}) {
        const double h = 1e-6;
        const double fd = (theta_bar(t + h) - theta_bar(t - h)) / (2.0 * h);
        CHECK(theta_bar_dt(t) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("error_term frozen value and monotonicity") {
    const double expected = kPi * kPi * (4.0 * std::exp(-1.5 * kPi * kPi) +
                                         9.0 * std::exp(-4.0 * kPi * kPi) +
                                         16.0 * std::exp(-7.5 * kPi * kPi));
    CHECK(error_term(1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(error_term(1.0) == doctest::Approx(1.466e-5).epsilon(1e-3));
    double prev = error_term(0.05);
    for (double t : {0.1, 0.3, 0.5, 1.0, 2.0, 5.0}) {
        const double v = error_term(t);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(error_term(0.0), std::domain_error);
}

TEST_CASE("killed density: symmetry, boundary zeros, positivity") {
    IntervalKernel k(4.0);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(0.0, 4.0);
        const double y = rng.uniform(0.0, 4.0);
        const double t = rng.uniform(0.05, 6.0);
        const double pxy = killed_density(k, x, y, t);
        CHECK(pxy >= 0.0);
        CHECK(pxy == doctest::Approx(killed_density(k, y, x, t)).epsilon(1e-10));
    }
    CHECK(killed_density(k, 0.0, 1.0, 1.0) == 0.0);
    CHECK(killed_density(k, 4.0, 1.0, 1.0) == 0.0);
    CHECK(killed_density(k, 1.0, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(killed_density(k, -0.1, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(killed_density(k, 0.5, 1.0, 0.0), std::domain_error);
}

TEST_CASE("killed density is a sub-probability kernel") {
    IntervalKernel k(5.0);
    for (double x : {0.5, 2.5, 4.9}) {
        for (double t : {0.1, 1.0, 10.0}) {
            auto q = integrate([&](double y) { return killed_density(k, x, y, t); }, 0.0, 5.0,
                               1e-11, 1e-11);
            CHECK(q.value <= 1.0 + 1e-9);
            CHECK(q.value >= 0.0);
        }
    }
}

TEST_CASE("green function identity for random widths") {
    // int_0^inf p_t^a(x,y) dt = 2 (x ^ y)(a - (x v y)) / a
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const double a = rng.uniform(kPi, 9.0);
        const double x = rng.uniform(0.05 * a, 0.95 * a);
        const double y = rng.uniform(0.05 * a, 0.95 * a);
        IntervalKernel k(a);
        // adaptive quadrature over [0, T] plus the sine-series tail
        const double T = 3.0 * a * a;
        auto q = integrate([&](double t) { return killed_density(k, x, y, t); }, 1e-14, T, 1e-10,
                           1e-10);
        double tail = 0.0;
        for (int n = 1; n < 60; ++n) {
            const double lam = 0.5 * kPi * kPi * n * n / (a * a);
            tail += 2.0 / a * std::exp(-lam * T) / lam * std::sin(kPi * n * x / a) *
                    std::sin(kPi * n * y / a);
        }
        const double target = 2.0 / a * std::min(x, y) * (a - std::max(x, y));
        CHECK(q.value + tail == doctest::Approx(target).epsilon(2e-6));
    }
}

TEST_CASE("green function spot value on the unit interval (via scaling)") {
    // IntervalKernel requires a >= pi; reach a=1 through Brownian scaling:
    // p^1_t(x,y) = a p^a_{a^2 t}(a x, a y) with a = pi.
    const double a = kPi;
    IntervalKernel k(a);
    const double x = 0.25, y = 0.75;
    const double T = 3.0;
    auto q = integrate(
        [&](double t) { return a * killed_density(k, a * x, a * y, a * a * t); }, 1e-14, T, 1e-10,
        1e-10);
    double tail = 0.0;
    for (int n = 1; n < 60; ++n) {
        const double lam = 0.5 * kPi * kPi * n * n;
        tail += 2.0 * std::exp(-lam * T) / lam * std::sin(kPi * n * x) * std::sin(kPi * n * y);
    }
    CHECK(q.value + tail == doctest::Approx(0.125).epsilon(1e-7));
}

TEST_CASE("chapman-kolmogorov") {
    IntervalKernel k(4.5);
    Rng rng(13);
    for (int rep = 0; rep < 5; ++rep) {
        const double x = rng.uniform(0.3, 4.2);
        const double y = rng.uniform(0.3, 4.2);
        const double t = rng.uniform(0.4, 3.0);
        const double s = t * rng.uniform(0.2, 0.8);
        auto q = integrate(
            [&](double z) { return killed_density(k, x, z, s) * killed_density(k, z, y, t - s); },
            0.0, 4.5, 1e-11, 1e-11);
        CHECK(q.value == doctest::Approx(killed_density(k, x, y, t)).epsilon(1e-8));
    }
}

TEST_CASE("bbm weighted density ratio and martingale reproduction") {
    Rng rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        const double a = rng.uniform(kPi, 12.0);
        IntervalKernel k(a);
        const double x = rng.uniform(0.1 * a, 0.9 * a);
        const double y = rng.uniform(0.1 * a, 0.9 * a);
        const double t = rng.uniform(0.1, 2.0) * a * a / 10.0;
        const double ratio = std::exp(k.mu * (x - y) + kPi * kPi * t / (2.0 * a * a));
        const double p = killed_density(k, x, y, t);
        if (p > 1e-300)
            CHECK(bbm_weighted_density(k, x, y, t) / p == doctest::Approx(ratio).epsilon(1e-10));
        // w_Z(y) = a sin(pi y/a) e^{mu(y-a)} reproduces under the kernel
        auto w_z = [&](double u) { return a * std::sin(kPi * u / a) * std::exp(k.mu * (u - a)); };
        auto q = integrate([&](double u) { return bbm_weighted_density(k, x, u, t) * w_z(u); },
                           0.0, a, 1e-11, 1e-11);
        CHECK(q.value == doctest::Approx(w_z(x)).epsilon(1e-7));
    }
}

TEST_CASE("bbm weighted density spot composition") {
    IntervalKernel k(10.0);
    const double p = killed_density(k, 5.0, 5.0, 1.0);
    CHECK(bbm_weighted_density(k, 5.0, 5.0, 1.0) ==
          doctest::Approx(p * std::exp(kPi * kPi / 200.0)).epsilon(1e-12));
}

TEST_CASE("exit density: zero at the absorbing end, scaling, integral") {
    IntervalKernel k(4.0);
    for (double t : {0.2, 1.0, 5.0}) CHECK(exit_density(k, 0.0, t) == doctest::Approx(0.0));
    // Brownian scaling r^a_{a^2 t}(a x) a^2 = r^1_t(x); compare two widths
    IntervalKernel k2(8.0);
    for (double x : {0.2, 0.5, 0.8}) {
        for (double t : {0.3, 1.2}) {
            const double lhs = exit_density(k, 4.0 * x, 16.0 * t) * 16.0;
            const double rhs = exit_density(k2, 8.0 * x, 64.0 * t) * 64.0;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
    // int_0^inf r_t^a(x) dt = x/a (probability of exiting on the right)
    for (double x : {1.0, 2.0, 3.5}) {
        auto q = integrate([&](double t) { return exit_density(k, x, t); }, 1e-12, 16.0 * 6.0,
                           1e-10, 1e-10);
        CHECK(q.value == doctest::Approx(x / 4.0).epsilon(1e-5));
    }
}

TEST_CASE("exit integrals: I value, zero start, scaling identity") {
    // I^1(0.5, [2,3]) ~ pi sin(pi/2): use a = pi and the scaling relation
    const double a = kPi;
    IntervalKernel k(a);
    TimeSet s({{2.0 * a * a, 3.0 * a * a}});
    auto res = exit_integrals(k, 0.5 * a, s);
    CHECK(res.i_value == doctest::Approx(kPi).epsilon(1e-9));

    auto zero = exit_integrals(k, 0.0, s);
    CHECK(zero.i_value == doctest::Approx(0.0));

    // scaling identity across widths
    IntervalKernel kb(2.0 * a);
    TimeSet sb({{2.0 * 4.0 * a * a, 3.0 * 4.0 * a * a}});
    auto scaled = exit_integrals(kb, 0.5 * 2.0 * a, sb);
    CHECK(scaled.i_value == doctest::Approx(res.i_value).epsilon(1e-9));

    // J scaling: J^a = a J^1(x/a, y/a, S/a^2)
    auto with_j = exit_integrals(k, 0.5 * a, s, 0.25 * a);
    auto with_jb = exit_integrals(kb, a, sb, 0.5 * a);
    REQUIRE(with_j.j_value.has_value());
    REQUIRE(with_jb.j_value.has_value());
    CHECK(*with_jb.j_value == doctest::Approx(2.0 * *with_j.j_value).epsilon(1e-8));
}

TEST_CASE("exit integrals: I deviation obeys the error-term bound") {
    const double a = kPi;
    IntervalKernel k(a);
    for (double x : {0.2, 0.5, 0.8}) {
        for (double lo : {1.0, 2.0}) {
            TimeSet s({{lo * a * a, (lo + 1.0) * a * a}});
            auto res = exit_integrals(k, x * a, s);
            const double dev = std::fabs(res.i_value - kPi * std::sin(kPi * x));
            const double bound = kPi * error_term(lo) * std::sin(kPi * x);
            CHECK(dev <= bound * 1.5 + 1e-12);
        }
    }
}

TEST_CASE("time sets reject unbounded or unsorted intervals") {
    CHECK_THROWS_AS(TimeSet({{0.0, std::numeric_limits<double>::infinity()}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TimeSet({{2.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TimeSet({{0.0, 2.0}, {1.0, 3.0}}), std::invalid_argument);
}

TEST_CASE("taboo stationary density normalises and taboo density integrates to 1") {
    IntervalKernel k(kPi);
    auto q = integrate([&](double y) { return taboo_stationary(k, y); }, 0.0, kPi, 1e-12, 1e-12);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : {0.3, 1.5, 2.8}) {
        for (double t : {0.5, 2.0}) {
            auto m = integrate([&](double y) { return taboo_density(k, x, y, t); }, 1e-9,
                               kPi - 1e-9, 1e-11, 1e-11);
            CHECK(m.value == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("taboo stationarity under one transition step") {
    IntervalKernel k(kPi);
    const double t = 0.5 * kPi * kPi;  // t/a^2 = 0.5
    for (double y : {0.4, 1.0, 2.0, 2.9}) {
        auto q = integrate(
            [&](double x) { return taboo_stationary(k, x) * taboo_density(k, x, y, t); }, 1e-10,
            kPi - 1e-10, 1e-12, 1e-12);
        CHECK(q.value == doctest::Approx(taboo_stationary(k, y)).epsilon(1e-8));
    }
}

TEST_CASE("taboo density converges to the stationary density uniformly") {
    IntervalKernel k(6.0);
    const double t = 3.0 * 36.0;  // t/a^2 = 3
    const double e = error_term(3.0);
    for (double x : {0.5, 3.0, 5.5}) {
        for (double y : {0.7, 2.5, 4.8}) {
            const double p = taboo_density(k, x, y, t);
            const double st = taboo_stationary(k, y);
            CHECK(std::fabs(p - st) <= 1.5 * e * st + 1e-14);
        }
    }
    CHECK_THROWS_AS(taboo_density(k, 0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(taboo_density(k, 6.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("killed density estimate against the error term (sup-norm)") {
    IntervalKernel k(5.0);
    const double a = 5.0;
    for (double u : {0.6, 1.0, 2.0}) {
        const double t = u * a * a;
        const double e = error_term(u);
        double worst = 0.0;
        for (double x : {0.5, 1.5, 2.5, 3.5, 4.5}) {
            for (double y : {0.7, 1.7, 2.7, 4.3}) {
                const double lhs =
                    std::exp(kPi * kPi * t / (2.0 * a * a)) * killed_density(k, x, y, t);
                const double main = 2.0 / a * std::sin(kPi * x / a) * std::sin(kPi * y / a);
                worst = std::max(worst, std::fabs(lhs - main) / (main * e));
            }
        }
        CHECK(worst <= 1.0 + 1e-6);
    }
}

TEST_CASE("interval kernel invariants") {
    IntervalKernel k(7.0);
    CHECK(k.mu == doctest::Approx(std::sqrt(1.0 - kPi * kPi / 49.0)).epsilon(1e-15));
    CHECK(1.0 - k.mu >= 0.0);
    CHECK(1.0 - k.mu <= kPi * kPi / (2.0 * k.mu * 49.0));
    CHECK_THROWS_AS(IntervalKernel(3.0), std::invalid_argument);  // below pi
}

TEST_CASE("barrier function endpoints and monotonicity") {
    CHECK(barrier_fn(2.0, 0.0) == 0.0);
    CHECK(barrier_fn(2.0, -1.0) == 0.0);
    CHECK(barrier_fn(2.0, 50.0) == doctest::Approx(2.0).epsilon(1e-12));
    for (double t : {0.1, 0.5, 1.0, 3.0}) CHECK(barrier_fn(0.0, t) == doctest::Approx(0.0));
    CHECK_THROWS_AS(barrier_fn(-0.5, 1.0), std::domain_error);

    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = barrier_fn(1.5, 0.05 * i);
        CHECK(v >= prev - 1e-13);
        prev = v;
    }
}

TEST_CASE("barrier function reaches (1-delta) of its limit and stays there") {
    for (double delta_target : {0.1, 0.01}) {
        for (double shift : {0.5, 2.0, 5.0}) {
            double t0 = 0.0;
            for (double t = 0.05; t < 20.0; t += 0.05) {
                if (barrier_fn(shift, t) >= (1.0 - delta_target) * shift) {
                    t0 = t;
                    break;
                }
            }
            CHECK(t0 > 0.0);
            CHECK(barrier_fn(shift, t0 + 1.0) >= (1.0 - delta_target) * shift);
            CHECK(barrier_fn(shift, t0 + 5.0) >= (1.0 - delta_target) * shift);
        }
    }
}

TEST_CASE("barrier derivative matches finite differences") {
    for (double delta : {0.3, 1.0}) {
        for (double t : {0.1, 0.4, 0.8, 2.0}) {
            const double h = 1e-6;
            const double fd = (barrier_fn(delta, t + h) - barrier_fn(delta, t - h)) / (2.0 * h);
            CHECK(barrier_fn_dt(delta, t) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}
