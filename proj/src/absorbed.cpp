#include "frontlab/absorbed.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "frontlab/fkpp.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/rng.hpp"

namespace frontlab {

BbmNorm BbmNorm::unit_rate_critical(const ReproductionLaw& law) {
    return {1.0, -std::sqrt(2.0 * law.m())};
}

namespace {

// Inverse-Gaussian IG(mu, lambda) exact sampler (Michael-Schucany-Haas).
double sample_inverse_gaussian(double mu, double lambda, Rng& rng) {
    const double nu = rng.normal();
    const double w = mu * nu * nu;
    const double x1 = mu + mu / (2.0 * lambda) * (w - std::sqrt(w * (4.0 * lambda + w)));
    if (rng.uniform() <= mu / (mu + x1)) return x1;
    return mu * mu / x1;
}

// First-passage time to the barrier for a Brownian bridge of length tau that
// starts at distance a > 0 above it and ends at signed distance b, given that
// it crosses. Reduces to an inverse-Gaussian via T = tau * Y/(1+Y).
double sample_bridge_crossing_time(double a, double b, double tau, Rng& rng) {
    const double babs = std::fabs(b);
    if (babs < 1e-300) return tau;
    const double y = sample_inverse_gaussian(a / babs, a * a / tau, rng);
    return tau * (y / (1.0 + y));
}

struct Particle {
    double t_death;
    double x_birth;
    double t_birth;
    bool operator>(const Particle& o) const { return t_death > o.t_death; }
};

}  // namespace

AbsorptionRun simulate_absorbed(const ReproductionLaw& law, double y, std::uint64_t seed,
                                const RunCaps& caps, const BbmNorm* norm) {
    if (!(y > 0.0)) throw std::invalid_argument("simulate_absorbed: y must be > 0");
    const BbmNorm nm = norm ? *norm : BbmNorm::standard(law);
    if (!(nm.branch_rate > 0.0)) throw std::invalid_argument("simulate_absorbed: bad branch rate");

    Rng rng(seed);
    AbsorptionRun run;
    run.y = y;

    std::priority_queue<Particle, std::vector<Particle>, std::greater<Particle>> alive;
    alive.push({rng.exponential(nm.branch_rate), 0.0, 0.0});

    while (!alive.empty()) {
        run.peak_alive = std::max<std::uint64_t>(run.peak_alive, alive.size());
        const Particle p = alive.top();
        alive.pop();
        ++run.event_count;
        if (run.event_count > caps.max_events) {
            run.capped = true;
            run.w_y = y * std::exp(-y) * static_cast<double>(run.n_absorbed);
            std::sort(run.absorption_times.begin(), run.absorption_times.end());
            throw CappedRunError(std::move(run));
        }

        const double tau = p.t_death - p.t_birth;
        const double x_end = p.x_birth + nm.drift * tau + std::sqrt(tau) * rng.normal();
        const double dist_start = p.x_birth + y;  // > 0 by construction
        const double dist_end = x_end + y;

        bool absorbed;
        if (dist_end <= 0.0) {
            absorbed = true;
        } else {
            // exact bridge-minimum law: P(min <= 0 | endpoints) = exp(-2 a b / tau)
            const double p_hit = std::exp(-2.0 * dist_start * dist_end / tau);
            absorbed = rng.uniform() < p_hit;
        }

        if (absorbed) {
            ++run.n_absorbed;
            if (caps.record_times) {
                const double tc = sample_bridge_crossing_time(dist_start, dist_end, tau, rng);
                run.absorption_times.push_back(p.t_birth + tc);
            }
            continue;
        }

        const std::uint32_t k = law.sample(rng);
        for (std::uint32_t c = 0; c < k; ++c)
            alive.push({p.t_death + rng.exponential(nm.branch_rate), x_end, p.t_death});
    }

    run.w_y = y * std::exp(-y) * static_cast<double>(run.n_absorbed);
    std::sort(run.absorption_times.begin(), run.absorption_times.end());
    return run;
}

namespace {

struct BatchResult {
    std::vector<double> values;  // statistic per uncapped run, NaN if capped
    std::uint64_t n_capped = 0;
};

// Runs n independent absorptions and collects a per-run statistic.
template <typename F>
BatchResult run_batch(const ReproductionLaw& law, double y, std::uint64_t n_runs,
                      std::uint64_t seed, const BbmNorm* norm, int workers, F statistic) {
    BatchResult out;
    out.values.assign(n_runs, 0.0);
    std::vector<unsigned char> capped(n_runs, 0);
    RunCaps caps;
    caps.record_times = false;
    parallel_for(n_runs, workers, [&](std::uint64_t i) {
        try {
            const AbsorptionRun run = simulate_absorbed(law, y, derive_seed(seed, i), caps, norm);
            out.values[i] = statistic(run);
        } catch (const CappedRunError&) {
            capped[i] = 1;
        }
    });
    std::vector<double> kept;
    kept.reserve(n_runs);
    for (std::uint64_t i = 0; i < n_runs; ++i) {
        if (capped[i])
            ++out.n_capped;
        else
            kept.push_back(out.values[i]);
    }
    out.values = std::move(kept);
    return out;
}

TailExperiment fit_tail(std::vector<double> sample, std::uint64_t n_runs, std::uint64_t n_capped,
                        double x_lo, double x_hi, int n_thresholds, std::uint64_t seed) {
    TailExperiment exp;
    exp.n_runs = n_runs;
    exp.n_capped = n_capped;
    exp.sample = std::move(sample);
    if (exp.sample.empty()) throw StatisticalPowerError("tail experiment: empty sample");
    const auto thresholds = log_spaced(x_lo, x_hi, n_thresholds);
    exp.table = survival_on_grid(exp.sample, thresholds);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < exp.table.threshold.size(); ++i) {
        if (exp.table.count[i] == 0) continue;
        lx.push_back(std::log(exp.table.threshold[i]));
        ly.push_back(std::log(exp.table.survival[i]));
    }
    if (lx.size() < 3)
        throw StatisticalPowerError("tail experiment: insufficient tail mass in fit window");
    exp.slope = least_squares(lx, ly).slope;
    Rng boot_rng(derive_seed(seed, 0xb00f));
    exp.slope_se = bootstrap_tail_slope_se(exp.sample, thresholds, boot_rng);
    return exp;
}

}  // namespace

TailExperiment w_tail_experiment(const ReproductionLaw& law, double y, std::uint64_t n_runs,
                                 std::uint64_t seed, double x_lo, double x_hi, int n_thresholds,
                                 int workers) {
    if (n_runs == 0) throw StatisticalPowerError("w_tail_experiment: n_runs == 0");
    auto batch = run_batch(law, y, n_runs, seed, nullptr, workers,
                           [](const AbsorptionRun& r) { return r.w_y; });
    return fit_tail(std::move(batch.values), n_runs, batch.n_capped, x_lo, x_hi, n_thresholds,
                    seed);
}

CriticalTailExperiment critical_tail_experiment(const ReproductionLaw& law, double x,
                                                std::uint64_t n_runs, std::uint64_t seed,
                                                double n_lo, double n_hi, int n_thresholds,
                                                int workers) {
    if (n_runs == 0) throw StatisticalPowerError("critical_tail_experiment: n_runs == 0");
    if (!law.no_single_child())
        throw std::invalid_argument("critical_tail_experiment: law must have q(1) = 0");
    const BbmNorm norm = BbmNorm::unit_rate_critical(law);
    auto batch = run_batch(law, x, n_runs, seed, &norm, workers, [](const AbsorptionRun& r) {
        return static_cast<double>(r.n_absorbed);
    });
    CriticalTailExperiment out;
    out.tail = fit_tail(std::move(batch.values), n_runs, batch.n_capped, n_lo, n_hi, n_thresholds,
                        seed);

    // Slope with the log^2 n factor of the tail law divided out, plus the
    // normalised ratio against c0 x e^{c0 x}.
    const double c0 = -norm.drift;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < out.tail.table.threshold.size(); ++i) {
        const double n = out.tail.table.threshold[i];
        const double p = out.tail.table.survival[i];
        out.normalized_ratio.push_back(n * std::log(n) * std::log(n) * p /
                                       (c0 * x * std::exp(c0 * x)));
        if (out.tail.table.count[i] == 0) continue;
        lx.push_back(std::log(n));
        ly.push_back(std::log(p) + 2.0 * std::log(std::log(n)));
    }
    if (lx.size() >= 3) {
        auto fit = least_squares(lx, ly);
        out.compensated_slope = fit.slope;
        out.compensated_slope_se = fit.slope_se;
    }
    return out;
}

DualityResult laplace_duality_check(const ReproductionLaw& law, const TravellingWave& wave,
                                    double y, const std::vector<double>& x_grid,
                                    std::uint64_t n_runs, std::uint64_t seed, int workers) {
    if (n_runs == 0) throw StatisticalPowerError("laplace_duality_check: n_runs == 0");
    auto batch = run_batch(law, y, n_runs, seed, nullptr, workers,
                           [](const AbsorptionRun& r) { return r.w_y; });
    DualityResult out;
    for (double x : x_grid) {
        const double lambda = std::exp(x);
        std::vector<double> transformed(batch.values.size());
        for (std::size_t i = 0; i < batch.values.size(); ++i)
            transformed[i] = std::exp(-lambda * batch.values[i]);
        const Summary s = summarize(transformed);
        DualityPoint pt;
        pt.x = x;
        pt.mc = s.mean;
        pt.mc_se = s.se;
        pt.psi = wave.eval(x);
        out.points.push_back(pt);
        out.max_abs_diff = std::max(out.max_abs_diff, std::fabs(pt.mc - pt.psi));
        out.max_allowed = std::max(out.max_allowed, 3.0 * pt.mc_se + wave.eval_tolerance());
    }
    return out;
}

std::vector<SemigroupPoint> gw_semigroup_check(const ReproductionLaw& law, double x1, double x2,
                                               const std::vector<double>& s_grid,
                                               std::uint64_t n_runs, std::uint64_t seed,
                                               int workers) {
    if (n_runs < 2) throw StatisticalPowerError("gw_semigroup_check: need n_runs >= 2");
    auto count_of = [](const AbsorptionRun& r) { return static_cast<double>(r.n_absorbed); };
    auto b1 = run_batch(law, x1, n_runs, derive_seed(seed, 1), nullptr, workers, count_of);
    auto b2 = run_batch(law, x2, n_runs, derive_seed(seed, 2), nullptr, workers, count_of);
    auto b12 = run_batch(law, x1 + x2, n_runs, derive_seed(seed, 3), nullptr, workers, count_of);

    auto gen_fn_at = [](const std::vector<double>& counts, double s, double& se,
                        double& derivative) {
        double sum = 0.0, sum2 = 0.0, dsum = 0.0;
        for (double n : counts) {
            const double v = std::pow(s, n);
            sum += v;
            sum2 += v * v;
            if (n >= 1.0 && s > 0.0) dsum += n * std::pow(s, n - 1.0);
        }
        const double m = sum / static_cast<double>(counts.size());
        const double var =
            (sum2 / static_cast<double>(counts.size()) - m * m) / static_cast<double>(counts.size());
        se = std::sqrt(std::max(0.0, var));
        derivative = dsum / static_cast<double>(counts.size());
        return m;
    };

    std::vector<SemigroupPoint> out;
    for (double s : s_grid) {
        double se2, d_unused, se1, d1, se12, d_unused2;
        const double f2 = gen_fn_at(b2.values, s, se2, d_unused);
        const double composed = gen_fn_at(b1.values, f2, se1, d1);
        const double direct = gen_fn_at(b12.values, s, se12, d_unused2);
        SemigroupPoint pt;
        pt.s = s;
        pt.direct = direct;
        pt.composed = composed;
        pt.discrepancy = std::fabs(direct - composed);
        pt.combined_se = std::sqrt(se12 * se12 + se1 * se1 + d1 * d1 * se2 * se2);
        out.push_back(pt);
    }
    return out;
}

}  // namespace frontlab
