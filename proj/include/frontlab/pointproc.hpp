#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace frontlab {

class Rng;

struct PointConfiguration {
    std::vector<double> atoms;
    double w_lo = 0.0;
    double w_hi = 0.0;
};

// Decoration: a finite configuration relative to its rightmost atom at 0.
//   single        {0}
//   fixed         a fixed offset list (rightmost must be 0 when normalized)
//   uniform_cloud {0} plus k atoms uniform in [-extent, 0]
//   heavy_cluster {0} plus ceil(1/U) - 1 atoms at -1 (infinite expected
//                 count: a proxy for E<D, e^x> = infinity)
struct DecorationSpec {
    enum class Kind { Single, Fixed, UniformCloud, HeavyCluster };
    Kind kind = Kind::Single;
    std::vector<double> offsets;  // Fixed
    int cloud_size = 0;           // UniformCloud
    double extent = 0.0;          // spatial reach below 0
    std::uint64_t heavy_cap = 100000;  // truncation for the heavy cluster
    bool normalized = true;       // rightmost atom exactly 0

    static DecorationSpec single();
    static DecorationSpec fixed(std::vector<double> offsets);
    static DecorationSpec uniform_cloud(int k, double extent);
    static DecorationSpec heavy_cluster();

    double e_max() const;  // bound on how far below 0 the decoration reaches
    void sample(Rng& rng, std::vector<double>& out) const;
    void validate() const;
};

// Decorated Poisson point process: Poisson atoms with intensity e^{-x} dx on
// [w_lo - E_max, inf), each replaced by an independent decoration; atoms
// outside the window are dropped.
PointConfiguration sample_dppp(const DecorationSpec& dec, double w_lo, double w_hi,
                               std::uint64_t seed);

std::vector<PointConfiguration> sample_dppp_batch(const DecorationSpec& dec, double w_lo,
                                                  double w_hi, std::size_t count,
                                                  std::uint64_t seed, int workers = 1);

// T_alpha z1 + T_beta z2 restricted to the common window; requires
// e^alpha + e^beta = 1 (within 1e-12).
PointConfiguration superpose(const PointConfiguration& z1, const PointConfiguration& z2,
                             double alpha, double beta);

// Bounded nonnegative test function with compact support: sum of scaled
// indicator steps and triangular bumps so closed forms exist for calibration.
struct TestFn {
    struct Step {
        double lo, hi, height;
    };
    struct Bump {  // triangle on [lo,hi] peaking at height in the middle
        double lo, hi, height;
    };
    std::vector<Step> steps;
    std::vector<Bump> bumps;

    double operator()(double x) const;
    double support_lo() const;
    double support_hi() const;
    TestFn shifted(double x) const;  // f(. + x)

    static TestFn step(double lo, double hi, double height = 1.0);
    static TestFn triangle(double lo, double hi, double height = 1.0);
};

struct CumulantMc {
    double value = 0.0;
    double se = 0.0;  // delta-method standard error
    std::size_t n = 0;
};

// K(f) = -log mean exp(-<Z,f>).
CumulantMc empirical_cumulant(std::span<const PointConfiguration> samples, const TestFn& f);

struct ShiftTestResult {
    double lhs = 0.0;  // K(f(. + x))
    double rhs = 0.0;  // e^x K(f)
    double z = 0.0;    // studentized difference (correlation-aware)
};

ShiftTestResult exp_shift_test(std::span<const PointConfiguration> samples, const TestFn& f,
                               double x);

double rightmost(const PointConfiguration& config);

struct IntensityProfile {
    std::vector<double> bin_center;
    std::vector<double> mean_count;
    std::vector<double> se;
    double slope = 0.0;     // fitted slope of log mean-count
    double slope_se = 0.0;
    double level = 0.0;     // intercept at x = 0 (log scale)
};

IntensityProfile intensity_profile(std::span<const PointConfiguration> samples, double lo,
                                   double hi, int bins);

}  // namespace frontlab
