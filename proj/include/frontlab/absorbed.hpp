#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "frontlab/reproduction.hpp"
#include "frontlab/stats.hpp"

namespace frontlab {

class TravellingWave;

// Normalisation of the absorbed branching diffusion. The default is the
// selection-chapter one (branch rate beta0 = 1/(2m), drift -1, critical).
// The barrier-chapter convention is branch rate 1, drift -c0 = -sqrt(2m).
struct BbmNorm {
    double branch_rate;
    double drift;  // signed; barrier sits below the start

    static BbmNorm standard(const ReproductionLaw& law) { return {law.beta0(), -1.0}; }
    static BbmNorm unit_rate_critical(const ReproductionLaw& law);
};

struct RunCaps {
    std::uint64_t max_events = 10'000'000;
    bool record_times = true;
};

struct AbsorptionRun {
    double y = 0.0;
    std::uint64_t n_absorbed = 0;
    double w_y = 0.0;  // y * exp(-y) * n_absorbed
    std::vector<double> absorption_times;
    std::uint64_t peak_alive = 0;
    std::uint64_t event_count = 0;
    bool capped = false;
};

// Thrown when the event cap is hit; carries the partial run. Signals an
// atypically large family, not a bug.
struct CappedRunError : std::runtime_error {
    AbsorptionRun partial;
    explicit CappedRunError(AbsorptionRun run)
        : std::runtime_error("simulate_absorbed: event cap exceeded"), partial(std::move(run)) {}
};

// One realisation of the branching diffusion started at 0 and absorbed at -y.
// Barrier crossings between branch events are decided by the exact
// Brownian-bridge minimum law; crossing times follow the exact first-passage
// conditioning (no time discretisation anywhere).
AbsorptionRun simulate_absorbed(const ReproductionLaw& law, double y, std::uint64_t seed,
                                const RunCaps& caps = {}, const BbmNorm* norm = nullptr);

struct TailExperiment {
    SurvivalTable table;
    double slope = 0.0;
    double slope_se = 0.0;  // bootstrap
    std::uint64_t n_runs = 0;
    std::uint64_t n_capped = 0;
    std::vector<double> sample;  // the fitted statistic per (uncapped) run
};

// Empirical tail of W_y = y e^{-y} N_y with a log-log least-squares slope
// over thresholds in [x_lo, x_hi]; capped runs are excluded and counted.
TailExperiment w_tail_experiment(const ReproductionLaw& law, double y, std::uint64_t n_runs,
                                 std::uint64_t seed, double x_lo = 2.0, double x_hi = 20.0,
                                 int n_thresholds = 12, int workers = 1);

// Empirical tail of the absorbed count under the unit-rate critical
// normalisation, fitted over counts in [n_lo, n_hi]. Also reports the
// compensated slope with the log^2 factor divided out, and the normalised
// ratio n log^2(n) * P(Z > n) / (c0 x e^{c0 x}) at each threshold.
struct CriticalTailExperiment {
    TailExperiment tail;
    double compensated_slope = 0.0;
    double compensated_slope_se = 0.0;
    std::vector<double> normalized_ratio;
};

CriticalTailExperiment critical_tail_experiment(const ReproductionLaw& law, double x,
                                                std::uint64_t n_runs, std::uint64_t seed,
                                                double n_lo = 1e2, double n_hi = 1e4,
                                                int n_thresholds = 9, int workers = 1);

struct DualityPoint {
    double x;
    double mc;      // mean of exp(-e^x W_y)
    double mc_se;
    double psi;     // travelling-wave value
};

struct DualityResult {
    std::vector<DualityPoint> points;
    double max_abs_diff = 0.0;
    double max_allowed = 0.0;  // 3*SE + ODE tolerance, maximised over the grid
};

DualityResult laplace_duality_check(const ReproductionLaw& law, const TravellingWave& wave,
                                    double y, const std::vector<double>& x_grid,
                                    std::uint64_t n_runs, std::uint64_t seed, int workers = 1);

struct SemigroupPoint {
    double s;
    double direct;       // F_{x1+x2}(s)
    double composed;     // F_{x1}(F_{x2}(s))
    double discrepancy;  // |direct - composed|
    double combined_se;
};

// Branching property of the embedded Galton-Watson process: compares the
// generating function at depth x1+x2 with the composition at x1 and x2,
// each estimated on independent Monte Carlo batches.
std::vector<SemigroupPoint> gw_semigroup_check(const ReproductionLaw& law, double x1, double x2,
                                               const std::vector<double>& s_grid,
                                               std::uint64_t n_runs, std::uint64_t seed,
                                               int workers = 1);

}  // namespace frontlab
