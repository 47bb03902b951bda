#include "frontlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frontlab/parallel.hpp"
#include "frontlab/quadrature.hpp"
#include "frontlab/rng.hpp"
#include "frontlab/theta.hpp"

namespace frontlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2 = kPi * kPi;
}  // namespace

double levy_tail(double y) {
    if (!(y > 0.0)) throw std::domain_error("levy_tail: y must be > 0");
    return 1.0 / std::expm1(y);
}

double levy_density(double y) {
    if (!(y > 0.0)) throw std::domain_error("levy_density: y must be > 0");
    const double em = std::expm1(y);
    return std::exp(y) / (em * em);
}

void LevySpec::validate() const {
    if (!(intensity_scale > 0.0)) throw std::invalid_argument("LevySpec: bad intensity scale");
    if (!(jump_cutoff_eps > 0.0) || !(jump_cutoff_eps < compensation_level))
        throw std::invalid_argument("LevySpec: need 0 < jump_cutoff_eps < compensation_level");
}

double zeta(int n) {
    if (n < 2) throw std::domain_error("zeta: need n >= 2");
    // Euler-Maclaurin with a short direct sum.
    const int K = 20;
    double s = 0.0;
    for (int k = 1; k < K; ++k) s += std::pow(static_cast<double>(k), -n);
    const double Kd = K;
    double tail = std::pow(Kd, 1.0 - n) / (n - 1.0) + 0.5 * std::pow(Kd, -static_cast<double>(n));
    const double nn = n;
    tail += nn / 12.0 * std::pow(Kd, -nn - 1.0);
    tail -= nn * (nn + 1.0) * (nn + 2.0) / 720.0 * std::pow(Kd, -nn - 3.0);
    return s + tail;
}

CumulantEstimate cumulant_n(int n, const LevySpec& spec) {
    if (n < 2) throw std::domain_error("cumulant_n: n >= 2 (n = 1 diverges at 0)");
    spec.validate();
    CumulantEstimate est;
    // y^n density ~ y^{n-2} at 0 (integrable for n >= 2) and dies like e^{-y}.
    auto f = [n](double y) { return std::pow(y, n) * levy_density(y); };
    double upper = 60.0 + 10.0 * n;  // e^{-60} tail is far below target accuracy
    auto q = integrate(f, 1e-12, upper, 1e-10, 1e-12);
    est.bare_integral = q.value;
    est.quad_error = q.error;
    est.value = spec.intensity_scale * q.value;
    return est;
}

namespace {

double sample_jump_size(double eps, Rng& rng) {
    // inversion of the conditional tail (e^eps - 1)/(e^y - 1)
    return std::log1p(std::expm1(eps) / rng.uniform_pos());
}

double compensator_rate(const LevySpec& spec) {
    // intensity_scale * int_{eps}^{level} y Lambda(dy): drift removed for
    // retained jumps below the compensation level
    auto q = integrate([](double y) { return y * levy_density(y); }, spec.jump_cutoff_eps,
                       spec.compensation_level, 1e-12, 1e-12);
    return spec.intensity_scale * q.value;
}

}  // namespace

PathSample sample_levy_path(const LevySpec& spec, double horizon, const std::vector<double>& grid,
                            std::uint64_t seed) {
    spec.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_levy_path: horizon must be > 0");
    Rng rng(seed);
    const double jump_rate = spec.intensity_scale * levy_tail(spec.jump_cutoff_eps);
    const double drift = spec.drift_c - compensator_rate(spec);

    PathSample path;
    path.times = grid;
    path.values.assign(grid.size(), 0.0);
    double t = 0.0;
    double level = 0.0;
    std::size_t gi = 0;
    while (gi < grid.size()) {
        const double t_jump = t + rng.exponential(jump_rate);
        while (gi < grid.size() && grid[gi] < t_jump) {
            path.values[gi] = level + drift * grid[gi];
            ++gi;
        }
        if (t_jump > horizon) break;
        level += sample_jump_size(spec.jump_cutoff_eps, rng);
        t = t_jump;
    }
    for (; gi < grid.size(); ++gi) path.values[gi] = level + drift * grid[gi];
    return path;
}

std::vector<double> sample_levy_increments(const LevySpec& spec, double dt, std::size_t count,
                                           std::uint64_t seed, int workers) {
    spec.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("sample_levy_increments: dt must be > 0");
    const double jump_rate = spec.intensity_scale * levy_tail(spec.jump_cutoff_eps);
    const double drift = spec.drift_c - compensator_rate(spec);
    std::vector<double> out(count);
    parallel_for(count, workers, [&](std::uint64_t i) {
        Rng rng(derive_seed(seed, i));
        const std::uint64_t jumps = rng.poisson(jump_rate * dt);
        double v = drift * dt;
        for (std::uint64_t j = 0; j < jumps; ++j) v += sample_jump_size(spec.jump_cutoff_eps, rng);
        out[i] = v;
    });
    return out;
}

std::complex<double> levy_charfn(const LevySpec& spec, double lambda) {
    spec.validate();
    if (lambda == 0.0) return {1.0, 0.0};
    // int_0^inf (e^{i lambda y} - 1 - i lambda y 1_{y<=level}) Lambda(dy):
    // the integrand is O(1) at 0 and O(e^{-y}) at infinity.
    const double level = spec.compensation_level;
    double upper = 60.0;
    while (levy_tail(upper) > 1e-16) upper += 10.0;
    auto re = integrate(
        [&](double y) { return (std::cos(lambda * y) - 1.0) * levy_density(y); }, 1e-14, upper,
        1e-11, 1e-12);
    auto im_small = integrate(
        [&](double y) { return (std::sin(lambda * y) - lambda * y) * levy_density(y); }, 1e-14,
        level, 1e-11, 1e-12);
    auto im_big = integrate([&](double y) { return std::sin(lambda * y) * levy_density(y); },
                            level, upper, 1e-11, 1e-12);
    if (re.error + im_small.error + im_big.error > 1e-6)
        throw std::runtime_error("levy_charfn: quadrature failed to converge");
    const std::complex<double> exponent(
        spec.intensity_scale * re.value,
        lambda * spec.drift_c + spec.intensity_scale * (im_small.value + im_big.value));
    return std::exp(exponent);
}

double MesoParams::initial_z() const { return z0 > 0.0 ? z0 : std::exp(big_a); }

double MesoParams::p_b() const { return kPi / (eps_breakout * std::exp(big_a)); }

double MesoParams::gamma0() const { return eps_breakout / kPi2; }

void MesoParams::validate() const {
    if (!(big_a > 0.0) || !(width > 0.0) || !(eps_breakout > 0.0))
        throw std::invalid_argument("MesoParams: A, a, eps must be > 0");
    const double pb = p_b();
    if (!(pb > 0.0) || !std::isfinite(pb))
        throw std::invalid_argument("MesoParams: derived p_B outside (0,inf)");
}

namespace {

// One breakout: waiting time, weight W, shift Delta = log(1 + e^{-A} pi W).
struct Breakout {
    double time;   // absolute, in a^3 units
    double delta;
};

class MesoEngine {
  public:
    MesoEngine(const MesoParams& mp, std::uint64_t seed, const WeightSampler& w_sampler)
        : mp_(mp), rng_(seed), w_sampler_(w_sampler) {
        mp.validate();
        const double z_ratio = mp.initial_z() / std::exp(mp.big_a);
        rate_ = kPi2 / mp.eps_breakout * z_ratio;         // pi p_B Z0 / a^3, in a^3 units
        relax_unit_ = 1.0 / mp.width;                     // a^2 in a^3 units
        dead_time_ = std::exp(mp.big_a) * relax_unit_;    // relaxation window e^A a^2
        w_min_ = mp.eps_breakout * std::exp(mp.big_a) / kPi;
        clock_ = 0.0;
    }

    Breakout next() {
        Breakout b;
        clock_ += rng_.exponential(rate_);
        b.time = clock_;
        const double w =
            w_sampler_ ? w_sampler_(w_min_, rng_) : w_min_ / rng_.uniform_pos();  // Pareto(1)
        b.delta = std::log1p(std::exp(-mp_.big_a) * kPi * w);
        clock_ += dead_time_;
        return b;
    }

    // profile position of a shift started at t0, evaluated at t (a^3 units)
    double profile(const Breakout& b, double t) const {
        if (t <= b.time) return 0.0;
        const double s = (t - b.time) / relax_unit_;  // a^2-scale argument
        if (s > 40.0) return b.delta;                 // theta_bar is 1 to machine precision
        return barrier_fn(b.delta, s);
    }

  private:
    MesoParams mp_;
    Rng rng_;
    WeightSampler w_sampler_;
    double rate_, relax_unit_, dead_time_, w_min_, clock_;
};

}  // namespace

PathSample meso_front_run(const MesoParams& mp, double horizon_a3, std::size_t grid_points,
                          std::uint64_t seed, const WeightSampler& w_sampler) {
    if (!(horizon_a3 > 0.0) || grid_points < 2)
        throw std::invalid_argument("meso_front_run: bad horizon/grid");
    MesoEngine engine(mp, seed, w_sampler);
    PathSample path;
    path.times.resize(grid_points);
    path.values.assign(grid_points, 0.0);
    for (std::size_t i = 0; i < grid_points; ++i)
        path.times[i] = horizon_a3 * static_cast<double>(i + 1) / static_cast<double>(grid_points);

    double settled = 0.0;  // sum of shifts that are fully relaxed
    std::vector<Breakout> in_flight;
    std::size_t gi = 0;
    for (;;) {
        const Breakout b = engine.next();
        while (gi < grid_points && path.times[gi] < b.time) {
            double v = settled;
            for (const auto& fb : in_flight) v += engine.profile(fb, path.times[gi]);
            path.values[gi] = v - kPi2 * mp.big_a * path.times[gi];
            ++gi;
        }
        if (gi >= grid_points) break;
        // retire fully-relaxed shifts
        std::vector<Breakout> still;
        for (const auto& fb : in_flight) {
            if (engine.profile(fb, b.time) >= fb.delta)
                settled += fb.delta;
            else
                still.push_back(fb);
        }
        in_flight = std::move(still);
        in_flight.push_back(b);
    }
    return path;
}

std::vector<double> meso_increments(const MesoParams& mp, double dt, std::size_t count,
                                    std::uint64_t seed, const WeightSampler& w_sampler) {
    if (!(dt > 0.0) || count == 0) throw std::invalid_argument("meso_increments: bad parameters");
    auto path = meso_front_run(mp, dt * static_cast<double>(count + 1), count + 1, seed, w_sampler);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = path.values[i + 1] - path.values[i];
    return out;
}

CompareResult distribution_compare(const std::vector<double>& a, const std::vector<double>& b,
                                   const std::vector<double>& lambda_grid) {
    if (a.empty() || b.empty()) throw std::invalid_argument("distribution_compare: empty sample");
    CompareResult out;
    out.ks = ks_two_sample(a, b);
    out.ks_critical_1pct = ks_two_sample_critical(a.size(), b.size(), 0.01);
    out.ks_pass_1pct = out.ks < out.ks_critical_1pct;
    for (double lam : lambda_grid) {
        double ca_re = 0, ca_im = 0, cb_re = 0, cb_im = 0;
        for (double x : a) {
            ca_re += std::cos(lam * x);
            ca_im += std::sin(lam * x);
        }
        for (double x : b) {
            cb_re += std::cos(lam * x);
            cb_im += std::sin(lam * x);
        }
        ca_re /= static_cast<double>(a.size());
        ca_im /= static_cast<double>(a.size());
        cb_re /= static_cast<double>(b.size());
        cb_im /= static_cast<double>(b.size());
        CfPoint pt;
        pt.lambda = lam;
        pt.distance = std::hypot(ca_re - cb_re, ca_im - cb_im);
        // |cf| <= 1 so each empirical component has variance <= 1/(2n)
        pt.null_radius =
            3.0 * std::sqrt(1.0 / static_cast<double>(a.size()) + 1.0 / static_cast<double>(b.size()));
        out.cf.push_back(pt);
        out.max_cf_distance = std::max(out.max_cf_distance, pt.distance);
    }
    return out;
}

}  // namespace frontlab
