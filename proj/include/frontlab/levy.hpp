#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "frontlab/stats.hpp"

namespace frontlab {

// Jump measure of the front limit: pushforward of x^{-2} dx (x>0) under
// x -> log(1+x); tail 1/(e^y - 1), density e^y / (e^y - 1)^2.
double levy_tail(double y);
double levy_density(double y);

struct LevySpec {
    double drift_c = 0.0;                        // free parameter (unknown in the limit law)
    double intensity_scale = 9.869604401089358;  // pi^2
    double jump_cutoff_eps = 1e-4;               // jumps below this are dropped
    double compensation_level = 1.0;             // the 1_{x<=1} truncation

    void validate() const;
};

struct CumulantEstimate {
    double value = 0.0;          // intensity_scale * integral
    double bare_integral = 0.0;  // int y^n Lambda(dy); equals n! zeta(n)
    double quad_error = 0.0;
};

// n-th cumulant intensity_scale * int_0^inf y^n Lambda(dy), n >= 2, by
// adaptive quadrature (n = 1 diverges at 0; that is what compensation is for).
CumulantEstimate cumulant_n(int n, const LevySpec& spec = LevySpec{});

// Riemann zeta on integer arguments >= 2 (Euler-Maclaurin); test oracle support.
double zeta(int n);

struct PathSample {
    std::vector<double> times;
    std::vector<double> values;  // value at the grid time (post-jump convention)
};

// Compound-Poisson approximation of the limit process: jumps above the cutoff
// at rate intensity_scale * tail(eps), sizes by exact inversion, retained
// jumps <= compensation_level compensated by a deterministic drift.
PathSample sample_levy_path(const LevySpec& spec, double horizon, const std::vector<double>& grid,
                            std::uint64_t seed);

// Independent increments of length dt (equivalent to sampling L_{dt}).
std::vector<double> sample_levy_increments(const LevySpec& spec, double dt, std::size_t count,
                                           std::uint64_t seed, int workers = 1);

std::complex<double> levy_charfn(const LevySpec& spec, double lambda);

// Parameters of the phenomenological barrier front. The derived quantities
// p_B = pi/(eps e^A) and gamma0 = eps/pi^2 must be positive and finite; note
// that the idealised clock rate pi p_B z0 / a^3 never uses p_B alone.
struct MesoParams {
    double big_a = 8.0;           // A
    double width = 4e9;           // a
    double eps_breakout = 1e-3;   // breakout threshold parameter
    double z0 = 0.0;              // initial Z; defaults to e^A when 0
    bool w_from_simulation = false;  // plug absorbed-run W samples instead of Pareto

    double initial_z() const;
    double p_b() const;     // pi / (eps e^A)
    double gamma0() const;  // (pi p_B e^A)^{-1} = eps / pi^2
    void validate() const;
};

class Rng;

// Draws one breakout weight W conditioned on W >= w_min. The default is the
// exact Pareto(1) tail; a simulation-backed sampler can be plugged instead.
using WeightSampler = std::function<double(double w_min, Rng& rng)>;

// Simulates the recentred barrier X(t a^3) - pi^2 A t on the grid (in a^3
// units): exponential breakout clock, Pareto breakout weights conditioned on
// pi W > eps e^A, shifts Delta = log(1 + e^{-A} pi W) applied through the
// relaxation profile.
PathSample meso_front_run(const MesoParams& mp, double horizon_a3, std::size_t grid_points,
                          std::uint64_t seed, const WeightSampler& w_sampler = {});

// Increments of the recentred meso barrier at spacing dt (a^3 units).
std::vector<double> meso_increments(const MesoParams& mp, double dt, std::size_t count,
                                    std::uint64_t seed, const WeightSampler& w_sampler = {});

struct CfPoint {
    double lambda;
    double distance;       // |empirical cf(a) - empirical cf(b)|
    double null_radius;    // 3-sigma CLT radius under equality
};

struct CompareResult {
    double ks = 0.0;
    double ks_critical_1pct = 0.0;
    std::vector<CfPoint> cf;
    double max_cf_distance = 0.0;
    bool ks_pass_1pct = false;
};

CompareResult distribution_compare(const std::vector<double>& a, const std::vector<double>& b,
                                   const std::vector<double>& lambda_grid = {0.5, 1.0, 2.0});

}  // namespace frontlab
