#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace frontlab {

class Rng;

// Raised when a requested estimate has no statistical power (empty samples,
// vanished tail mass, too few increments).
struct StatisticalPowerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // from the residual variance
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Bootstrap standard error of the tail-fit slope: resamples the raw sample,
// rebuilds the empirical survival at the given thresholds, refits.
double bootstrap_tail_slope_se(std::span<const double> sample,
                               std::span<const double> thresholds, Rng& rng, int resamples = 200);

struct SurvivalTable {
    std::vector<double> threshold;
    std::vector<double> survival;  // empirical P(X > threshold)
    std::vector<std::uint64_t> count;
};

SurvivalTable survival_on_grid(std::span<const double> sample, std::span<const double> thresholds);

std::vector<double> log_spaced(double lo, double hi, int n);

// Two-sample Kolmogorov-Smirnov statistic (inputs need not be sorted).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical value for the two-sample KS test: c(alpha)*sqrt((n+m)/(n*m)).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

struct CumulantSet {
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
    double se1 = 0, se2 = 0, se3 = 0, se4 = 0;
    std::size_t n = 0;
};

// Unbiased sample cumulants (k-statistics) with jackknife standard errors.
CumulantSet sample_cumulants(std::span<const double> data);

struct Summary {
    double mean = 0, var = 0, se = 0;
    std::size_t n = 0;
};

Summary summarize(std::span<const double> data);

}  // namespace frontlab
