#include "frontlab/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frontlab/rng.hpp"

namespace frontlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Counts at or below this are sampled with the exact binomial sampler;
// larger ones use the moment-matched Gaussian approximation.
constexpr double kExactCountThreshold = 1e6;
}  // namespace

double x_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw std::domain_error("x_alpha: alpha must be in (0,1]");
    if (alpha == 1.0) return 0.0;
    // g(x) = (1+x) e^{-x} - alpha, g' = -x e^{-x}; safeguarded Newton.
    double lo = 0.0, hi = 1.0;
    while ((1.0 + hi) * std::exp(-hi) > alpha) hi *= 2.0;
    double x = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double g = (1.0 + x) * std::exp(-x) - alpha;
        if (g > 0.0)
            lo = x;
        else
            hi = x;
        const double dg = -x * std::exp(-x);
        double nx = dg != 0.0 ? x - g / dg : 0.5 * (lo + hi);
        if (!(nx > lo) || !(nx < hi)) nx = 0.5 * (lo + hi);
        if (std::fabs(nx - x) < 1e-15 && std::fabs(g) < 1e-12) return nx;
        x = nx;
    }
    return x;
}

double FrontState::total() const {
    if (mode == Mode::ExactPositions) return static_cast<double>(positions.size());
    double t = 0.0;
    for (auto it = sites.rbegin(); it != sites.rend(); ++it) t += *it;
    return t;
}

double median_alpha(const FrontState& front, double alpha, double n_selected) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::domain_error("median_alpha: alpha must be in (0,1]");
    const double c = alpha * n_selected;
    if (front.mode == FrontState::Mode::ExactPositions) {
        const auto& p = front.positions;
        if (p.empty()) throw std::invalid_argument("median_alpha: empty front");
        const std::size_t m = p.size();
        // the ceil(c)-th atom from the right is the first point where
        // nu([x,infty)) drops below c just above it
        const std::size_t k = static_cast<std::size_t>(std::ceil(c - 1e-12));
        if (k == 0) return p.back();
        if (k > m) throw std::invalid_argument("median_alpha: front smaller than alpha*N");
        return p[m - k];
    }
    if (front.sites.empty()) throw std::invalid_argument("median_alpha: empty front");
    double cum = 0.0;
    for (std::size_t j = front.sites.size(); j-- > 0;) {
        cum += front.sites[j];
        if (cum >= c)
            return static_cast<double>(front.site_origin + static_cast<std::int64_t>(j));
    }
    throw std::invalid_argument("median_alpha: front smaller than alpha*N");
}

InitialSample sample_initial(std::uint64_t n, double a_n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_initial: need n >= 1");
    if (!(a_n > 0.0)) throw std::invalid_argument("sample_initial: need a_N > 0");
    Rng rng(seed);
    InitialSample out;
    out.front.mode = FrontState::Mode::ExactPositions;
    out.front.positions.reserve(n);
    const double mass = -std::expm1(-a_n);  // envelope mass of e^{-x} on (0, a_N)
    while (out.front.positions.size() < n) {
        ++out.proposals;
        const double x = -std::log1p(-rng.uniform() * mass);
        if (rng.uniform() < std::sin(kPi * x / a_n)) out.front.positions.push_back(x);
    }
    std::sort(out.front.positions.begin(), out.front.positions.end());
    return out;
}

namespace {

// Kill the m leftmost particles (ties broken by creation order). Positions
// are paired with creation ids; id order is the within-position tiebreak.
struct ExactParticle {
    double pos;
    std::uint64_t id;
};

bool leftmost_less(const ExactParticle& a, const ExactParticle& b) {
    return a.pos < b.pos || (a.pos == b.pos && a.id < b.id);
}

}  // namespace

FrontTrace nbbm_run(const ReproductionLaw& law, std::uint64_t n, double horizon, double sample_dt,
                    std::uint64_t seed, double alpha) {
    if (n == 0) throw std::invalid_argument("nbbm_run: need N >= 1");
    if (!(horizon > 0.0) || !(sample_dt > 0.0))
        throw std::invalid_argument("nbbm_run: need positive horizon and sample_dt");
    Rng rng(seed);
    const double a_n =
        n > 2 ? std::log(static_cast<double>(n)) + 3.0 * std::log(std::log(static_cast<double>(n)))
              : 1.0;
    auto init = sample_initial(n, std::max(a_n, 1.0), derive_seed(seed, 0));

    std::vector<ExactParticle> particles;
    particles.reserve(2 * n);
    std::uint64_t next_id = 0;
    for (double p : init.front.positions) particles.push_back({p, next_id++});

    const double beta0 = law.beta0();
    const double mu_n =
        n > 2 ? std::sqrt(1.0 - kPi * kPi / (a_n * a_n)) : 0.0;

    FrontTrace trace;
    trace.recenter_rate = mu_n;

    double t = 0.0;
    double next_sample = 0.0;
    auto advance_all = [&](double dt) {
        if (dt <= 0.0) return;
        const double sd = std::sqrt(dt);
        for (auto& p : particles) p.pos += sd * rng.normal();
    };
    auto record = [&](double ts) {
        FrontState view;
        view.mode = FrontState::Mode::ExactPositions;
        view.positions.resize(particles.size());
        for (std::size_t i = 0; i < particles.size(); ++i) view.positions[i] = particles[i].pos;
        std::sort(view.positions.begin(), view.positions.end());
        const double med = median_alpha(view, alpha, static_cast<double>(n));
        trace.times.push_back(ts);
        trace.med_alpha.push_back(med);
        trace.totals.push_back(static_cast<double>(particles.size()));
        trace.recentred.push_back(med - mu_n * ts);
    };

    while (t < horizon) {
        const double rate = beta0 * static_cast<double>(particles.size());
        const double dt = rng.exponential(rate);
        double t_next = t + dt;
        while (next_sample <= t_next && next_sample <= horizon) {
            advance_all(next_sample - t);
            t = next_sample;
            record(t);
            next_sample += sample_dt;
        }
        if (t_next > horizon) break;
        advance_all(t_next - t);
        t = t_next;

        // uniformly chosen particle branches into k at its position
        const std::size_t idx = static_cast<std::size_t>(rng.uniform_index(particles.size()));
        const std::uint32_t k = law.sample(rng);
        const double pos = particles[idx].pos;
        if (k == 0) {
            particles[idx] = particles.back();
            particles.pop_back();
            if (particles.empty()) throw CapExceededError("nbbm_run: population died out");
            continue;
        }
        particles[idx].id = next_id++;  // parent is replaced by its first child
        for (std::uint32_t c = 1; c < k; ++c) particles.push_back({pos, next_id++});

        if (particles.size() > n) {
            const std::size_t excess = particles.size() - n;
            std::nth_element(particles.begin(), particles.begin() + excess - 1, particles.end(),
                             leftmost_less);
            particles.erase(particles.begin(), particles.begin() + excess);
        }
    }
    return trace;
}

void BrwParams::validate() const {
    if (!(branch_prob >= 0.0) || !(branch_prob <= 1.0) || !(jump_prob >= 0.0) ||
        !(jump_prob <= 1.0))
        throw std::invalid_argument("BrwParams: probabilities must lie in [0,1]");
}

namespace {

// Binomial with the hybrid exact/Gaussian sampler on integer-valued reals.
double hybrid_binomial(double count, double p, Rng& rng, bool& approximate) {
    if (count <= 0.0 || p <= 0.0) return 0.0;
    if (p >= 1.0) return count;
    if (count <= kExactCountThreshold)
        return static_cast<double>(rng.binomial(static_cast<std::uint64_t>(count), p));
    approximate = true;
    const double mean = count * p;
    const double sd = std::sqrt(count * p * (1.0 - p));
    double draw = std::round(mean + sd * rng.normal());
    return std::min(std::max(draw, 0.0), count);
}

}  // namespace

FrontTrace nbrw_run(const BrwParams& params, double n, std::uint64_t steps, std::uint64_t seed,
                    double alpha, FrontState::Mode mode, std::uint64_t sample_every) {
    params.validate();
    if (!(n >= 1.0)) throw std::invalid_argument("nbrw_run: need N >= 1");
    if (sample_every == 0) sample_every = 1;
    Rng rng(seed);

    const double log_n = std::log(std::max(n, 3.0));
    const double a_n = log_n + 3.0 * std::log(std::max(log_n, 1.1));
    const std::size_t window = static_cast<std::size_t>(std::max(64.0, 4.0 * a_n)) + 64;

    FrontState front;
    front.mode = mode;
    front.sites.assign(window, 0.0);
    front.site_origin = -static_cast<std::int64_t>(window / 2);  // seed sits at coordinate 0
    front.sites[window / 2] = 1.0;
    if (mode == FrontState::Mode::ExactPositions) {
        if (n > 1e5) throw std::invalid_argument("nbrw_run: exact mode feasible only for small N");
        front.positions.assign(1, 0.0);
    }

    FrontTrace trace;
    trace.recenter_rate = 0.0;

    std::vector<double> next(window, 0.0);
    for (std::uint64_t step = 0; step < steps; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        // branch/jump splits, site by site; exact mode consumes the same draws
        for (std::size_t i = 0; i < window; ++i) {
            const double c = front.sites[i];
            if (c <= 0.0) continue;
            const double branched = hybrid_binomial(c, params.branch_prob, rng, front.approximate);
            const double cohort = c + branched;
            const double jumped = hybrid_binomial(cohort, params.jump_prob, rng, front.approximate);
            if (i + 1 >= window)
                throw CapExceededError("nbrw_run: front reached the window edge");
            next[i] += cohort - jumped;
            next[i + 1] += jumped;
        }
        std::swap(front.sites, next);

        // selection: truncate mass from the left so the total is exactly min(N, total)
        double cum = 0.0;
        std::size_t cut = 0;
        bool reached = false;
        for (std::size_t j = window; j-- > 0;) {
            cum += front.sites[j];
            if (cum >= n) {
                front.sites[j] = n - (cum - front.sites[j]);  // partial kill at the boundary site
                cut = j;
                reached = true;
                break;
            }
        }
        if (reached)
            for (std::size_t j = 0; j < cut; ++j) front.sites[j] = 0.0;

        if (mode == FrontState::Mode::ExactPositions) {
            // materialise the same site counts as individual lattice positions
            front.positions.clear();
            for (std::size_t j = 0; j < window; ++j) {
                const double c = front.sites[j];
                for (double q = 0; q < c; q += 1.0)
                    front.positions.push_back(
                        static_cast<double>(front.site_origin + static_cast<std::int64_t>(j)));
            }
        }

        // recentre the window around the current median
        const double med = median_alpha(front, alpha, std::min(n, front.total()));
        const std::int64_t med_idx = static_cast<std::int64_t>(med) - front.site_origin;
        const std::int64_t target = static_cast<std::int64_t>(window / 2);
        const std::int64_t shift = med_idx - target;
        if (shift > 0) {
            const std::size_t s = static_cast<std::size_t>(shift);
            for (std::size_t j = 0; j < s; ++j)
                if (front.sites[j] > 0.0)
                    throw CapExceededError("nbrw_run: mass left the sliding window");
            for (std::size_t j = 0; j + s < window; ++j) front.sites[j] = front.sites[j + s];
            for (std::size_t j = window - s; j < window; ++j) front.sites[j] = 0.0;
            front.site_origin += shift;
        }

        if ((step + 1) % sample_every == 0 || step + 1 == steps) {
            trace.times.push_back(static_cast<double>(step + 1));
            trace.med_alpha.push_back(med);
            trace.totals.push_back(front.total());
            trace.recentred.push_back(med);
        }
    }
    trace.approximate = front.approximate;
    return trace;
}

double brw_mean_field_speed(const BrwParams& params) {
    params.validate();
    const double m = 1.0 + params.branch_prob;  // expected offspring per step
    auto rate = [&](double theta) {
        return std::log(m * (1.0 - params.jump_prob + params.jump_prob * std::exp(theta))) / theta;
    };
    // golden-section minimisation over theta > 0
    double lo = 1e-6, hi = 60.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = rate(a), fb = rate(b);
    for (int it = 0; it < 400; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = rate(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = rate(b);
        }
    }
    return rate(0.5 * (lo + hi));
}

double cutoff_front_speed(const BrwParams& params, double n, std::size_t window, double tol) {
    params.validate();
    if (!(n > 1.0)) throw std::invalid_argument("cutoff_front_speed: need N > 1");
    const double m = 1.0 + params.branch_prob;
    const double pj = params.jump_prob;
    const double cutoff = 1.0 / n;

    // u_i = occupancy fraction (tail form, decreasing from 1 to 0)
    std::vector<double> u(window, 0.0), v(window, 0.0);
    for (std::size_t i = 0; i < window / 4; ++i) u[i] = 1.0;

    auto level_crossing = [&](const std::vector<double>& w) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            if (w[i] >= 0.5 && w[i + 1] < 0.5) {
                // linear interpolation of the 1/2-level position
                return static_cast<double>(i) + (w[i] - 0.5) / (w[i] - w[i + 1]);
            }
        }
        throw CapExceededError("cutoff_front_speed: level crossing left the window");
    };

    double shift_total = 0.0;
    auto step = [&]() {
        v[0] = std::min(1.0, m * u[0]);
        for (std::size_t i = 1; i < window; ++i) {
            double val = m * ((1.0 - pj) * u[i] + pj * u[i - 1]);
            if (val < cutoff) val = 0.0;
            v[i] = std::min(1.0, val);
        }
        std::swap(u, v);
        // keep the crossing near the window centre
        const double pos = level_crossing(u);
        const std::size_t target = window / 2;
        if (pos > static_cast<double>(target) + 1.0) {
            const std::size_t s = static_cast<std::size_t>(pos - static_cast<double>(target));
            for (std::size_t i = 0; i + s < window; ++i) u[i] = u[i + s];
            for (std::size_t i = window - s; i < window; ++i) u[i] = 0.0;
            shift_total += static_cast<double>(s);
        }
    };

    const std::size_t burn_in = 4000;
    for (std::size_t it = 0; it < burn_in; ++it) step();

    // average displacement per step over successive blocks until stable
    double prev_speed = -1.0;
    const std::size_t block = 8192;
    for (int rounds = 0; rounds < 64; ++rounds) {
        const double start = shift_total + level_crossing(u);
        for (std::size_t it = 0; it < block; ++it) step();
        const double speed = (shift_total + level_crossing(u) - start) / static_cast<double>(block);
        if (prev_speed >= 0.0 && std::fabs(speed - prev_speed) < tol)
            return 0.5 * (speed + prev_speed);
        prev_speed = speed;
    }
    throw CapExceededError("cutoff_front_speed: speed estimate did not settle");
}

CumulantReport front_cumulants(const FrontTrace& trace, double lag) {
    if (trace.times.size() < 2) throw std::invalid_argument("front_cumulants: trace too short");
    const double dt = trace.times[1] - trace.times[0];
    const std::size_t stride = static_cast<std::size_t>(std::llround(lag / dt));
    if (stride == 0) throw std::invalid_argument("front_cumulants: lag shorter than sampling step");
    std::vector<double> increments;
    for (std::size_t i = 0; i + stride < trace.recentred.size(); i += stride)
        increments.push_back(trace.recentred[i + stride] - trace.recentred[i]);
    if (increments.size() < 30)
        throw StatisticalPowerError("front_cumulants: need >= 30 disjoint increments");
    CumulantReport rep;
    rep.cumulants = sample_cumulants(increments);
    rep.lag = static_cast<double>(stride) * dt;
    rep.n_increments = increments.size();
    return rep;
}

LinearFit front_speed(const FrontTrace& trace) {
    const std::size_t n = trace.times.size();
    if (n < 4) throw std::invalid_argument("front_speed: trace too short");
    const std::size_t lo = n / 2;  // burn-in: first half
    std::vector<double> tx(trace.times.begin() + lo, trace.times.end());
    std::vector<double> ty(trace.med_alpha.begin() + lo, trace.med_alpha.end());
    return least_squares(tx, ty);
}

}  // namespace frontlab
