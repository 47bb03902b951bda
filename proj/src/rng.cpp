#include "frontlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace frontlab {

double Rng::normal() {
    // Marsaglia polar method with one cached deviate.
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

double Rng::exponential(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::uint64_t Rng::poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) throw std::invalid_argument("poisson: bad mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
}

std::uint64_t Rng::poisson_inversion(double mean) {
    // Sequential search through the CDF.
    const double L = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > L) {
        prod *= uniform();
        ++k;
        if (k > 10000) throw std::runtime_error("poisson_inversion: runaway loop");
    }
    return k;
}

std::uint64_t Rng::poisson_ptrs(double mean) {
    // Hoermann's PTRS transformed-rejection sampler; exact for mean >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double lmean = std::log(mean);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (kf < 0.0) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (us < 0.013 && v > us) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * lmean - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

std::uint64_t Rng::binomial(std::uint64_t n, double p) {
    if (p < 0.0 || p > 1.0 || !std::isfinite(p)) throw std::invalid_argument("binomial: bad p");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;
    const double nq = static_cast<double>(n) * q;
    std::uint64_t k = nq < 30.0 ? binomial_inversion(n, q) : binomial_btrs(n, q);
    return flip ? n - k : k;
}

std::uint64_t Rng::binomial_inversion(std::uint64_t n, double p) {
    // CDF recurrence; requires n*p modest. p <= 1/2 here.
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::pow(q, static_cast<double>(n));
    double u = uniform();
    double cdf = f;
    std::uint64_t k = 0;
    while (u > cdf) {
        ++k;
        if (k > n) return n;  // guards accumulated roundoff in the far tail
        f *= s * (static_cast<double>(n - k + 1) / static_cast<double>(k));
        cdf += f;
    }
    return k;
}

std::uint64_t Rng::binomial_btrs(std::uint64_t n, double p) {
    // Hoermann's BTRS transformed-rejection sampler; exact for n*p >= 10, p <= 1/2.
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + c);
        if (kf < 0.0 || kf > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        v = std::log(v * alpha / (a / (us * us) + b));
        double k = kf;
        double h = (std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0)) -
                   (std::lgamma(k + 1.0) + std::lgamma(nd - k + 1.0));
        if (v <= h + (k - m) * lpq) return static_cast<std::uint64_t>(kf);
    }
}

}  // namespace frontlab
