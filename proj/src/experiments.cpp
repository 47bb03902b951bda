#include <algorithm>
#include <cmath>
#include <sstream>

#include "frontlab/absorbed.hpp"
#include "frontlab/coupling.hpp"
#include "frontlab/fkpp.hpp"
#include "frontlab/levy.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/pointproc.hpp"
#include "frontlab/rng.hpp"
#include "frontlab/runner.hpp"
#include "frontlab/selection.hpp"
#include "frontlab/theta.hpp"

namespace frontlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

ReproductionLaw parse_law(const std::string& text) {
    if (text == "binary") return ReproductionLaw::binary();
    std::vector<double> probs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        probs.push_back(std::stod(item));
    return ReproductionLaw::from_probs(probs);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// ---------------------------------------------------------------- theta

ExperimentResult run_theta_selftest(const Params& params, const RunContext&) {
    const int nx = static_cast<int>(params.get_int("grid_x"));
    const int nt = static_cast<int>(params.get_int("grid_t"));
    double max_diff = 0.0;
    CsvTable table("theta_selftest/v1", {"x", "t", "fourier", "gaussian", "abs_diff"});
    for (int i = 0; i < nx; ++i) {
        const double x = 2.0 * i / (nx - 1);
        for (int j = 0; j < nt; ++j) {
            const double t = 0.05 + (5.0 - 0.05) * j / (nt - 1);
            // evaluate both representations regardless of the crossover
            const double tol = 1e-13;
            double fourier = 0.5;
            for (int n = 1; n < 200; ++n) {
                const double d = std::exp(-0.5 * kPi * kPi * n * n * t);
                if (d < 1e-18) break;
                fourier += d * std::cos(kPi * n * x);
            }
            double gauss = 0.0;
            for (int n = -40; n <= 40; ++n)
                gauss += std::exp(-(x - 2.0 * n) * (x - 2.0 * n) / (2.0 * t));
            gauss /= std::sqrt(2.0 * kPi * t);
            const double diff = std::fabs(fourier - gauss);
            max_diff = std::max(max_diff, diff);
            table.add_row({x, t, fourier, gauss, diff});
            (void)tol;
        }
    }
    ExperimentResult res;
    res.summary["max_abs_diff"] = max_diff;
    res.summary["pass_1e_minus_10"] = max_diff < 1e-10;
    res.tables.emplace_back("grid", std::move(table));
    return res;
}

// ------------------------------------------------------------- absorbed

ExperimentResult run_absorbed_tail(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    const double y = params.get_real("y");
    const std::uint64_t n_runs = static_cast<std::uint64_t>(params.get_int("n_runs"));
    auto exp = w_tail_experiment(law, y, n_runs, ctx.seed, params.get_real("x_lo"),
                                 params.get_real("x_hi"),
                                 static_cast<int>(params.get_int("thresholds")), ctx.workers);
    ExperimentResult res;
    res.summary["slope"] = exp.slope;
    res.summary["slope_se"] = exp.slope_se;
    res.summary["window"] = {params.get_real("x_lo"), params.get_real("x_hi")};
    res.summary["n_capped"] = exp.n_capped;
    res.summary["n_runs"] = exp.n_runs;
    CsvTable runs("absorption_runs/v1", {"run_id", "y", "n_absorbed", "w_y", "capped_flag"});
    for (std::size_t i = 0; i < exp.sample.size(); ++i) {
        const double w = exp.sample[i];
        runs.add_row({static_cast<double>(i), y, w / (y * std::exp(-y)), w, 0.0});
    }
    CsvTable tail("tail_table/v1", {"threshold", "survival", "count"});
    for (std::size_t i = 0; i < exp.table.threshold.size(); ++i)
        tail.add_row({exp.table.threshold[i], exp.table.survival[i],
                      static_cast<double>(exp.table.count[i])});
    ExperimentResult out = std::move(res);
    out.tables.emplace_back("runs", std::move(runs));
    out.tables.emplace_back("tail", std::move(tail));
    return out;
}

ExperimentResult run_critical_tail(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    auto exp = critical_tail_experiment(
        law, params.get_real("x"), static_cast<std::uint64_t>(params.get_int("n_runs")), ctx.seed,
        params.get_real("n_lo"), params.get_real("n_hi"),
        static_cast<int>(params.get_int("thresholds")), ctx.workers);
    ExperimentResult res;
    res.summary["slope"] = exp.tail.slope;
    res.summary["slope_se"] = exp.tail.slope_se;
    res.summary["compensated_slope"] = exp.compensated_slope;
    res.summary["compensated_slope_se"] = exp.compensated_slope_se;
    res.summary["n_capped"] = exp.tail.n_capped;
    res.summary["normalized_ratio"] = exp.normalized_ratio;
    CsvTable tail("tail_table/v1", {"threshold", "survival", "count", "normalized_ratio"});
    for (std::size_t i = 0; i < exp.tail.table.threshold.size(); ++i)
        tail.add_row({exp.tail.table.threshold[i], exp.tail.table.survival[i],
                      static_cast<double>(exp.tail.table.count[i]), exp.normalized_ratio[i]});
    res.tables.emplace_back("tail", std::move(tail));
    return res;
}

ExperimentResult run_w_laplace(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    TravellingWave wave(law, 1.0);
    auto result = laplace_duality_check(law, wave, params.get_real("y"),
                                        parse_grid(params.get_str("x_grid")),
                                        static_cast<std::uint64_t>(params.get_int("n_runs")),
                                        ctx.seed, ctx.workers);
    ExperimentResult res;
    res.summary["max_abs_diff"] = result.max_abs_diff;
    res.summary["max_allowed"] = result.max_allowed;
    CsvTable table("laplace_duality/v1", {"x", "mc", "mc_se", "psi", "abs_diff"});
    for (const auto& p : result.points)
        table.add_row({p.x, p.mc, p.mc_se, p.psi, std::fabs(p.mc - p.psi)});
    res.tables.emplace_back("points", std::move(table));
    return res;
}

ExperimentResult run_gw_semigroup(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    auto points = gw_semigroup_check(law, params.get_real("x1"), params.get_real("x2"),
                                     parse_grid(params.get_str("s_grid")),
                                     static_cast<std::uint64_t>(params.get_int("n_runs")),
                                     ctx.seed, ctx.workers);
    ExperimentResult res;
    double worst = 0.0;
    CsvTable table("gw_semigroup/v1", {"s", "direct", "composed", "discrepancy", "combined_se"});
    for (const auto& p : points) {
        table.add_row({p.s, p.direct, p.composed, p.discrepancy, p.combined_se});
        if (p.combined_se > 0.0) worst = std::max(worst, p.discrepancy / p.combined_se);
    }
    res.summary["max_discrepancy_over_se"] = worst;
    res.tables.emplace_back("points", std::move(table));
    return res;
}

// ------------------------------------------------------------ selection

ExperimentResult run_nbbm_front(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    const std::uint64_t n = static_cast<std::uint64_t>(params.get_int("n"));
    const double horizon = params.get_real("horizon");
    const double sample_dt = params.get_real("sample_dt");
    const double alpha = params.get_real("alpha");
    const double lag = params.get_real("cumulant_lag");

    std::vector<FrontTrace> traces(ctx.replicas);
    parallel_for(ctx.replicas, ctx.workers, [&](std::uint64_t r) {
        traces[r] = nbbm_run(law, n, horizon, sample_dt, derive_seed(ctx.seed, r), alpha);
    });

    std::vector<double> speeds;
    CsvTable trace_csv("front_trace/v1", {"replica", "t", "med_alpha", "total", "recentred"});
    for (std::size_t r = 0; r < traces.size(); ++r) {
        speeds.push_back(front_speed(traces[r]).slope);
        for (std::size_t i = 0; i < traces[r].times.size(); ++i)
            trace_csv.add_row({static_cast<double>(r), traces[r].times[i],
                               traces[r].med_alpha[i], traces[r].totals[i],
                               traces[r].recentred[i]});
    }
    const Summary sp = summarize(speeds);
    ExperimentResult res;
    res.summary["n"] = n;
    res.summary["speed"] = sp.mean;
    res.summary["speed_se"] = sp.se;
    res.summary["mode"] = "exact-positions";
    res.summary["approx_flag"] = false;
    const double logn = std::log(static_cast<double>(n));
    res.summary["v_cutoff"] = 1.0 - kPi * kPi / (2.0 * logn * logn);
    try {
        auto cum = front_cumulants(traces[0], lag);
        res.summary["k2"] = cum.cumulants.k2;
        res.summary["k2_se"] = cum.cumulants.se2;
        res.summary["k3"] = cum.cumulants.k3;
        res.summary["k3_se"] = cum.cumulants.se3;
        res.summary["k4"] = cum.cumulants.k4;
        res.summary["k4_se"] = cum.cumulants.se4;
    } catch (const StatisticalPowerError&) {
        res.summary["k2"] = nullptr;
    }
    res.tables.emplace_back("trace", std::move(trace_csv));
    return res;
}

ExperimentResult run_nbrw_front(const Params& params, const RunContext& ctx) {
    BrwParams bp;
    bp.branch_prob = params.get_real("branch_prob");
    bp.jump_prob = params.get_real("jump_prob");
    const double n = params.get_real("n");
    const std::uint64_t steps = static_cast<std::uint64_t>(params.get_int("steps"));
    const double alpha = params.get_real("alpha");
    const auto mode = params.get_str("mode") == "exact" ? FrontState::Mode::ExactPositions
                                                        : FrontState::Mode::SiteCounts;
    const std::uint64_t sample_every = static_cast<std::uint64_t>(params.get_int("sample_every"));

    std::vector<FrontTrace> traces(ctx.replicas);
    parallel_for(ctx.replicas, ctx.workers, [&](std::uint64_t r) {
        traces[r] = nbrw_run(bp, n, steps, derive_seed(ctx.seed, r), alpha, mode, sample_every);
    });
    std::vector<double> speeds;
    bool approx = false;
    CsvTable trace_csv("front_trace/v1", {"replica", "t", "med_alpha", "total", "recentred"});
    for (std::size_t r = 0; r < traces.size(); ++r) {
        speeds.push_back(front_speed(traces[r]).slope);
        approx = approx || traces[r].approximate;
        for (std::size_t i = 0; i < traces[r].times.size(); ++i)
            trace_csv.add_row({static_cast<double>(r), traces[r].times[i],
                               traces[r].med_alpha[i], traces[r].totals[i],
                               traces[r].recentred[i]});
    }
    const Summary sp = summarize(speeds);
    ExperimentResult res;
    res.summary["n"] = n;
    res.summary["speed"] = sp.mean;
    res.summary["speed_se"] = sp.se;
    res.summary["mode"] = params.get_str("mode");
    res.summary["approx_flag"] = approx;
    res.summary["mean_field_speed"] = brw_mean_field_speed(bp);
    res.tables.emplace_back("trace", std::move(trace_csv));
    return res;
}

ExperimentResult run_cutoff_speed(const Params& params, const RunContext&) {
    BrwParams bp;
    bp.branch_prob = params.get_real("branch_prob");
    bp.jump_prob = params.get_real("jump_prob");
    const auto n_list = parse_grid(params.get_str("n_list"));
    const double vstar = brw_mean_field_speed(bp);
    ExperimentResult res;
    CsvTable table("cutoff_speed/v1", {"n_log10", "speed", "deficit", "deficit_times_log2n"});
    std::vector<double> scaled;
    for (double lg : n_list) {
        const double n = std::pow(10.0, lg);
        const double v = cutoff_front_speed(bp, n);
        const double logn = std::log(n);
        table.add_row({lg, v, vstar - v, (vstar - v) * logn * logn});
        scaled.push_back((vstar - v) * logn * logn);
    }
    res.summary["v_star"] = vstar;
    res.summary["scaled_deficits"] = scaled;
    double lo = scaled.empty() ? 0.0 : scaled[0], hi = lo;
    for (double s : scaled) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    res.summary["max_pairwise_ratio"] = lo > 0.0 ? hi / lo : 0.0;
    res.tables.emplace_back("speeds", std::move(table));
    return res;
}

ExperimentResult run_coupling_check(const Params& params, const RunContext& ctx) {
    const auto law = parse_law(params.get_str("law"));
    const std::uint64_t n_keep = static_cast<std::uint64_t>(params.get_int("n"));
    const std::uint64_t events = static_cast<std::uint64_t>(params.get_int("events"));
    const std::uint64_t seeds = static_cast<std::uint64_t>(params.get_int("seeds"));
    SelectionRule lower{SelectionRule::Kind::ExactN, 0};
    SelectionRule upper{SelectionRule::Kind::PlusLazy, 2};
    if (params.get_str("plus_policy") == "random") upper.kind = SelectionRule::Kind::PlusRandom;

    std::vector<unsigned char> ok(seeds, 0);
    parallel_for(seeds, ctx.workers, [&](std::uint64_t s) {
        auto r = coupled_ordering_run(law, n_keep, events, derive_seed(ctx.seed, s), lower, upper);
        ok[s] = r.dominance_ok && r.map_consistent ? 1 : 0;
    });
    std::uint64_t passed = 0;
    for (auto v : ok) passed += v;
    ExperimentResult res;
    res.summary["seeds"] = seeds;
    res.summary["dominance_held"] = passed;
    res.summary["all_pass"] = passed == seeds;
    return res;
}

// ----------------------------------------------------------------- levy

ExperimentResult run_levy_cumulants(const Params& params, const RunContext&) {
    LevySpec spec;
    spec.jump_cutoff_eps = params.get_real("eps");
    ExperimentResult res;
    CsvTable table("levy_cumulants/v1",
                   {"n", "bare_integral", "n_factorial_zeta", "abs_err", "quad_error"});
    double worst = 0.0;
    for (int n = 2; n <= static_cast<int>(params.get_int("max_n")); ++n) {
        auto est = cumulant_n(n, spec);
        double factorial = 1.0;
        for (int k = 2; k <= n; ++k) factorial *= k;
        const double target = factorial * zeta(n);
        const double err = std::fabs(est.bare_integral - target);
        worst = std::max(worst, err);
        table.add_row({static_cast<double>(n), est.bare_integral, target, err, est.quad_error});
    }
    res.summary["max_abs_err"] = worst;
    res.tables.emplace_back("cumulants", std::move(table));
    return res;
}

ExperimentResult run_levy_compare(const Params& params, const RunContext& ctx) {
    LevySpec spec;
    spec.jump_cutoff_eps = params.get_real("eps");
    const double dt = params.get_real("dt");
    const std::size_t count = static_cast<std::size_t>(params.get_int("count"));
    auto a = sample_levy_increments(spec, dt, count, derive_seed(ctx.seed, 1), ctx.workers);
    auto b = sample_levy_increments(spec, dt, count, derive_seed(ctx.seed, 2), ctx.workers);
    auto cmp = distribution_compare(a, b);
    ExperimentResult res;
    res.summary["ks"] = cmp.ks;
    res.summary["ks_critical_1pct"] = cmp.ks_critical_1pct;
    res.summary["ks_pass_1pct"] = cmp.ks_pass_1pct;
    CsvTable table("increments/v1", {"sample", "value"});
    for (double v : a) table.add_row({0.0, v});
    for (double v : b) table.add_row({1.0, v});
    res.tables.emplace_back("increments", std::move(table));
    return res;
}

ExperimentResult run_meso_vs_levy(const Params& params, const RunContext& ctx) {
    MesoParams mp;
    mp.big_a = params.get_real("a_large");
    mp.width = params.get_real("width");
    mp.eps_breakout = params.get_real("eps");
    const double dt = params.get_real("dt");
    const std::size_t count = static_cast<std::size_t>(params.get_int("count"));

    auto meso = meso_increments(mp, dt, count, derive_seed(ctx.seed, 1));
    LevySpec spec;
    spec.jump_cutoff_eps = std::log1p(mp.eps_breakout);  // matching jump floor
    auto levy = sample_levy_increments(spec, dt, count, derive_seed(ctx.seed, 2), ctx.workers);

    // centre both: the drift constant of the limit law is unknown
    auto centre = [](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        for (double& x : v) x -= m;
    };
    centre(meso);
    centre(levy);
    auto cmp = distribution_compare(meso, levy);
    ExperimentResult res;
    res.summary["ks"] = cmp.ks;
    res.summary["ks_critical_1pct"] = cmp.ks_critical_1pct;
    res.summary["ks_pass_1pct"] = cmp.ks_pass_1pct;
    res.summary["max_cf_distance"] = cmp.max_cf_distance;
    res.summary["gamma0"] = mp.gamma0();
    CsvTable table("increments/v1", {"sample", "value"});
    for (double v : meso) table.add_row({0.0, v});
    for (double v : levy) table.add_row({1.0, v});
    res.tables.emplace_back("increments", std::move(table));
    return res;
}

// -------------------------------------------------------------- stablepp

ExperimentResult run_stablepp_tests(const Params& params, const RunContext& ctx) {
    const std::size_t n_samples = static_cast<std::size_t>(params.get_int("n_samples"));
    const double w_lo = params.get_real("w_lo");
    const double w_hi = params.get_real("w_hi");
    DecorationSpec dec = DecorationSpec::single();
    const std::string kind = params.get_str("decoration");
    if (kind == "two-atom")
        dec = DecorationSpec::fixed({0.0, -1.0});
    else if (kind == "cloud")
        dec = DecorationSpec::uniform_cloud(3, 1.5);
    else if (kind == "heavy")
        dec = DecorationSpec::heavy_cluster();

    auto samples = sample_dppp_batch(dec, w_lo, w_hi, n_samples, ctx.seed, ctx.workers);

    ExperimentResult res;
    CsvTable atoms_csv("atoms/v1", {"sample_id", "atom"});
    const std::size_t dump = std::min<std::size_t>(samples.size(), 1000);
    for (std::size_t i = 0; i < dump; ++i)
        for (double a : samples[i].atoms) atoms_csv.add_row({static_cast<double>(i), a});

    const std::vector<TestFn> fns = {TestFn::step(0.0, 1.0), TestFn::step(0.5, 1.5, 0.7),
                                     TestFn::triangle(0.0, 2.0)};
    const std::vector<double> shifts = {0.3, 0.7};
    CsvTable shift_csv("exp_shift/v1", {"fn", "shift", "lhs", "rhs", "z"});
    double max_abs_z = 0.0;
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        for (double sh : shifts) {
            auto r = exp_shift_test(samples, fns[fi], sh);
            shift_csv.add_row({static_cast<double>(fi), sh, r.lhs, r.rhs, r.z});
            max_abs_z = std::max(max_abs_z, std::fabs(r.z));
        }
    }
    res.summary["max_abs_z"] = max_abs_z;

    auto profile = intensity_profile(samples, w_lo + 1.0, w_hi - 2.0,
                                     static_cast<int>(params.get_int("bins")));
    res.summary["intensity_slope"] = profile.slope;
    res.summary["intensity_slope_se"] = profile.slope_se;
    res.tables.emplace_back("atoms", std::move(atoms_csv));
    res.tables.emplace_back("exp_shift", std::move(shift_csv));
    return res;
}

std::map<std::string, Experiment> build_registry() {
    using T = ParamSpec::Type;
    std::map<std::string, Experiment> reg;
    auto add = [&](Experiment e) { reg[e.name] = std::move(e); };

    add({"theta-selftest",
         "cross-representation and identity checks for the theta kernels",
         {{"grid_x", T::Int, "41"}, {"grid_t", T::Int, "41"}},
         run_theta_selftest});
    add({"absorbed-tail",
         "tail of W_y = y e^{-y} N_y for the drift -1 absorbed branching diffusion",
         {{"law", T::Str, "binary"},
          {"y", T::Real, "5"},
          {"n_runs", T::Int, "100000"},
          {"x_lo", T::Real, "2"},
          {"x_hi", T::Real, "20"},
          {"thresholds", T::Int, "12"}},
         run_absorbed_tail});
    add({"critical-tail",
         "absorbed-count tail under the unit-rate critical normalisation",
         {{"law", T::Str, "binary"},
          {"x", T::Real, "4"},
          {"n_runs", T::Int, "200000"},
          {"n_lo", T::Real, "100"},
          {"n_hi", T::Real, "10000"},
          {"thresholds", T::Int, "9"}},
         run_critical_tail});
    add({"w-laplace",
         "Laplace duality between absorbed-count weights and the travelling wave",
         {{"law", T::Str, "binary"},
          {"y", T::Real, "6"},
          {"n_runs", T::Int, "100000"},
          {"x_grid", T::Str, "-2,-1,0,1,2"}},
         run_w_laplace});
    add({"gw-semigroup",
         "branching property of the embedded Galton-Watson process",
         {{"law", T::Str, "binary"},
          {"x1", T::Real, "0.5"},
          {"x2", T::Real, "0.5"},
          {"s_grid", T::Str, "0.25,0.5,0.75"},
          {"n_runs", T::Int, "20000"}},
         run_gw_semigroup});
    add({"nbbm-front",
         "exact N-BBM front trace, speed, and increment cumulants",
         {{"law", T::Str, "binary"},
          {"n", T::Int, "10000"},
          {"horizon", T::Real, "40"},
          {"sample_dt", T::Real, "0.5"},
          {"alpha", T::Real, "0.5"},
          {"cumulant_lag", T::Real, "1"}},
         run_nbbm_front});
    add({"nbrw-front",
         "lattice N-BRW front in site-count mode with the hybrid sampler",
         {{"branch_prob", T::Real, "0.05"},
          {"jump_prob", T::Real, "0.25"},
          {"n", T::Real, "1e10"},
          {"steps", T::Int, "200000"},
          {"alpha", T::Real, "0.5"},
          {"mode", T::Str, "site"},
          {"sample_every", T::Int, "100"}},
         run_nbrw_front});
    add({"cutoff-speed",
         "deterministic mean-field front speed under the 1/N occupation cutoff",
         {{"branch_prob", T::Real, "0.05"},
          {"jump_prob", T::Real, "0.25"},
          {"n_list", T::Str, "10,20,30,40"}},
         run_cutoff_speed});
    add({"coupling-check",
         "pathwise stochastic ordering of coupled selection systems",
         {{"law", T::Str, "binary"},
          {"n", T::Int, "5"},
          {"events", T::Int, "10"},
          {"seeds", T::Int, "10000"},
          {"plus_policy", T::Str, "lazy"}},
         run_coupling_check});
    add({"levy-cumulants",
         "jump-measure cumulants against n! zeta(n)",
         {{"eps", T::Real, "1e-4"}, {"max_n", T::Int, "4"}},
         run_levy_cumulants});
    add({"levy-compare",
         "two independent batches of limit-process increments (self-test)",
         {{"eps", T::Real, "1e-3"},
          {"dt", T::Real, "0.0002"},
          {"count", T::Int, "10000"}},
         run_levy_compare});
    add({"meso-vs-levy",
         "mesoscopic barrier increments against the limit process",
         {{"a_large", T::Real, "8"},
          {"width", T::Real, "4e9"},
          {"eps", T::Real, "1e-3"},
          {"dt", T::Real, "0.0002"},
          {"count", T::Int, "10000"}},
         run_meso_vs_levy});
    add({"stablepp-tests",
         "decorated-Poisson sampling, cumulant shift law, intensity profile",
         {{"decoration", T::Str, "two-atom"},
          {"n_samples", T::Int, "100000"},
          {"w_lo", T::Real, "-3"},
          {"w_hi", T::Real, "8"},
          {"bins", T::Int, "12"}},
         run_stablepp_tests});
    return reg;
}

}  // namespace

const std::map<std::string, Experiment>& experiment_registry() {
    static const std::map<std::string, Experiment> reg = build_registry();
    return reg;
}

}  // namespace frontlab
