#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "frontlab/reproduction.hpp"
#include "frontlab/stats.hpp"

namespace frontlab {

class Rng;

// Root of (1+x) e^{-x} = alpha on [0, inf), i.e. the alpha-quantile anchor of
// the meta-stable profile y e^{-y}.
double x_alpha(double alpha);

// Particle front: either explicit sorted positions or lattice site counts.
// Site counts are exact integers below the sampler threshold; above it they
// are integer-valued reals carrying an "approximate" flag.
struct FrontState {
    enum class Mode { ExactPositions, SiteCounts };

    Mode mode = Mode::ExactPositions;
    std::vector<double> positions;  // exact mode, sorted ascending
    std::vector<double> sites;      // site mode: counts per lattice index
    std::int64_t site_origin = 0;   // lattice coordinate of sites[0]
    double time = 0.0;
    bool approximate = false;

    double total() const;
};

// inf{x : nu([x,infty)) < alpha N}; requires nu(R) >= alpha N.
double median_alpha(const FrontState& front, double alpha, double n_selected);

struct InitialSample {
    FrontState front;
    std::uint64_t proposals = 0;  // rejection-sampler diagnostics
};

// N independent draws from the density proportional to sin(pi x/a_N) e^{-x}
// on (0, a_N), by rejection against the exponential envelope.
InitialSample sample_initial(std::uint64_t n, double a_n, std::uint64_t seed);

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> med_alpha;
    std::vector<double> totals;
    std::vector<double> recentred;  // med_alpha - recenter_rate * t
    double recenter_rate = 0.0;
    bool approximate = false;
};

struct CapExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact N-BBM: standard Brownian particles, branch clocks at rate beta0, law
// q; whenever a branching pushes the count above N the leftmost excess
// particles are killed immediately (ties broken by creation order).
FrontTrace nbbm_run(const ReproductionLaw& law, std::uint64_t n, double horizon, double sample_dt,
                    std::uint64_t seed, double alpha);

struct BrwParams {
    double branch_prob = 0.05;  // split into two with this probability
    double jump_prob = 0.25;    // each resulting particle hops +1 with this probability

    void validate() const;
};

// Discrete-time N-BRW on the integer lattice in site-count mode (counts up to
// ~1e60). Exact-position mode is available for cross-validation at small N
// and consumes the same binomial decisions.
FrontTrace nbrw_run(const BrwParams& params, double n, std::uint64_t steps, std::uint64_t seed,
                    double alpha, FrontState::Mode mode = FrontState::Mode::SiteCounts,
                    std::uint64_t sample_every = 1);

// Deterministic mean-field front iteration with the occupation cutoff at 1/N;
// returns the asymptotic displacement per step of the level-1/2 crossing.
double cutoff_front_speed(const BrwParams& params, double n, std::size_t window = 4096,
                          double tol = 1e-9);

// Speed of the front without selection, from the one-step jump transform:
// v* = min_{theta>0} log( E[children] * (1-p + p e^theta) ) / theta.
double brw_mean_field_speed(const BrwParams& params);

struct CumulantReport {
    CumulantSet cumulants;
    double lag = 0.0;
    std::size_t n_increments = 0;
};

// Sample cumulants of disjoint lag-increments of the recentred med series.
CumulantReport front_cumulants(const FrontTrace& trace, double lag);

// OLS speed over the second half of the trace.
LinearFit front_speed(const FrontTrace& trace);

}  // namespace frontlab
