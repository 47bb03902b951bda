#include "frontlab/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frontlab/parallel.hpp"
#include "frontlab/rng.hpp"
#include "frontlab/stats.hpp"

namespace frontlab {

DecorationSpec DecorationSpec::single() { return DecorationSpec{}; }

DecorationSpec DecorationSpec::fixed(std::vector<double> offsets) {
    DecorationSpec d;
    d.kind = Kind::Fixed;
    d.offsets = std::move(offsets);
    double lo = 0.0;
    for (double o : d.offsets) lo = std::min(lo, o);
    d.extent = -lo;
    d.validate();
    return d;
}

DecorationSpec DecorationSpec::uniform_cloud(int k, double extent) {
    DecorationSpec d;
    d.kind = Kind::UniformCloud;
    d.cloud_size = k;
    d.extent = extent;
    d.validate();
    return d;
}

DecorationSpec DecorationSpec::heavy_cluster() {
    DecorationSpec d;
    d.kind = Kind::HeavyCluster;
    d.extent = 1.0;
    return d;
}

double DecorationSpec::e_max() const { return extent; }

void DecorationSpec::validate() const {
    if (extent < 0.0) throw std::invalid_argument("DecorationSpec: negative extent");
    if (kind == Kind::Fixed) {
        if (offsets.empty()) throw std::invalid_argument("DecorationSpec: empty offset list");
        double hi = offsets[0];
        for (double o : offsets) hi = std::max(hi, o);
        if (normalized && hi != 0.0)
            throw std::invalid_argument("DecorationSpec: normalized decoration needs max offset 0");
        if (hi > 0.0) throw std::invalid_argument("DecorationSpec: offsets must be <= 0");
    }
    if (kind == Kind::UniformCloud && (cloud_size < 0 || extent <= 0.0))
        throw std::invalid_argument("DecorationSpec: bad cloud parameters");
}

void DecorationSpec::sample(Rng& rng, std::vector<double>& out) const {
    out.clear();
    switch (kind) {
        case Kind::Single:
            out.push_back(0.0);
            break;
        case Kind::Fixed:
            out = offsets;
            break;
        case Kind::UniformCloud:
            out.push_back(0.0);
            for (int i = 0; i < cloud_size; ++i) out.push_back(-extent * rng.uniform());
            break;
        case Kind::HeavyCluster: {
            out.push_back(0.0);
            const double u = rng.uniform_pos();
            const double raw = std::ceil(1.0 / u) - 1.0;
            const std::uint64_t k =
                static_cast<std::uint64_t>(std::min(raw, static_cast<double>(heavy_cap)));
            for (std::uint64_t i = 0; i < k; ++i) out.push_back(-1.0);
            break;
        }
    }
}

PointConfiguration sample_dppp(const DecorationSpec& dec, double w_lo, double w_hi,
                               std::uint64_t seed) {
    if (!(w_hi > w_lo)) throw std::invalid_argument("sample_dppp: empty window");
    dec.validate();
    Rng rng(seed);
    PointConfiguration cfg;
    cfg.w_lo = w_lo;
    cfg.w_hi = w_hi;
    const double left = w_lo - dec.e_max();
    const double mass = std::exp(-left);  // int_left^inf e^{-x} dx
    const std::uint64_t n_atoms = rng.poisson(mass);
    std::vector<double> decoration;
    for (std::uint64_t i = 0; i < n_atoms; ++i) {
        const double xi = left - std::log(rng.uniform_pos());  // e^{-x} dx above `left`
        dec.sample(rng, decoration);
        for (double off : decoration) {
            const double atom = xi + off;
            if (atom >= w_lo && atom <= w_hi) cfg.atoms.push_back(atom);
        }
    }
    std::sort(cfg.atoms.begin(), cfg.atoms.end());
    return cfg;
}

std::vector<PointConfiguration> sample_dppp_batch(const DecorationSpec& dec, double w_lo,
                                                  double w_hi, std::size_t count,
                                                  std::uint64_t seed, int workers) {
    std::vector<PointConfiguration> out(count);
    parallel_for(count, workers, [&](std::uint64_t i) {
        out[i] = sample_dppp(dec, w_lo, w_hi, derive_seed(seed, i));
    });
    return out;
}

PointConfiguration superpose(const PointConfiguration& z1, const PointConfiguration& z2,
                             double alpha, double beta) {
    if (std::fabs(std::exp(alpha) + std::exp(beta) - 1.0) > 1e-12)
        throw std::invalid_argument("superpose: requires e^alpha + e^beta = 1");
    if (z1.w_lo != z2.w_lo || z1.w_hi != z2.w_hi)
        throw std::invalid_argument("superpose: windows must agree");
    PointConfiguration out;
    out.w_lo = z1.w_lo;
    out.w_hi = z1.w_hi;
    for (double a : z1.atoms) {
        const double x = a + alpha;
        if (x >= out.w_lo && x <= out.w_hi) out.atoms.push_back(x);
    }
    for (double a : z2.atoms) {
        const double x = a + beta;
        if (x >= out.w_lo && x <= out.w_hi) out.atoms.push_back(x);
    }
    std::sort(out.atoms.begin(), out.atoms.end());
    return out;
}

double TestFn::operator()(double x) const {
    double v = 0.0;
    for (const auto& s : steps)
        if (x >= s.lo && x < s.hi) v += s.height;
    for (const auto& b : bumps) {
        if (x >= b.lo && x < b.hi) {
            const double mid = 0.5 * (b.lo + b.hi);
            const double half = 0.5 * (b.hi - b.lo);
            v += b.height * (1.0 - std::fabs(x - mid) / half);
        }
    }
    return v;
}

double TestFn::support_lo() const {
    double lo = 1e300;
    for (const auto& s : steps) lo = std::min(lo, s.lo);
    for (const auto& b : bumps) lo = std::min(lo, b.lo);
    return lo;
}

double TestFn::support_hi() const {
    double hi = -1e300;
    for (const auto& s : steps) hi = std::max(hi, s.hi);
    for (const auto& b : bumps) hi = std::max(hi, b.hi);
    return hi;
}

TestFn TestFn::shifted(double x) const {
    TestFn g = *this;
    for (auto& s : g.steps) {
        s.lo -= x;
        s.hi -= x;
    }
    for (auto& b : g.bumps) {
        b.lo -= x;
        b.hi -= x;
    }
    return g;
}

TestFn TestFn::step(double lo, double hi, double height) {
    TestFn f;
    f.steps.push_back({lo, hi, height});
    return f;
}

TestFn TestFn::triangle(double lo, double hi, double height) {
    TestFn f;
    f.bumps.push_back({lo, hi, height});
    return f;
}

namespace {

double pairing(const PointConfiguration& cfg, const TestFn& f) {
    double s = 0.0;
    for (double a : cfg.atoms) s += f(a);
    return s;
}

void check_support(const PointConfiguration& cfg, const TestFn& f, const char* who) {
    if (f.support_lo() < cfg.w_lo - 1e-12 || f.support_hi() > cfg.w_hi + 1e-12)
        throw std::domain_error(std::string(who) + ": test function leaves the window");
}

}  // namespace

CumulantMc empirical_cumulant(std::span<const PointConfiguration> samples, const TestFn& f) {
    if (samples.empty()) throw StatisticalPowerError("empirical_cumulant: no samples");
    check_support(samples[0], f, "empirical_cumulant");
    double sum = 0.0, sum2 = 0.0;
    for (const auto& cfg : samples) {
        const double e = std::exp(-pairing(cfg, f));
        sum += e;
        sum2 += e * e;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    if (!(mean > 0.0)) throw StatisticalPowerError("empirical_cumulant: degenerate estimate");
    const double var = std::max(0.0, sum2 / n - mean * mean);
    CumulantMc out;
    out.value = -std::log(mean);
    out.se = std::sqrt(var / n) / mean;  // delta method through -log
    out.n = samples.size();
    return out;
}

ShiftTestResult exp_shift_test(std::span<const PointConfiguration> samples, const TestFn& f,
                               double x) {
    if (samples.empty()) throw StatisticalPowerError("exp_shift_test: no samples");
    const TestFn fs = f.shifted(x);
    check_support(samples[0], f, "exp_shift_test");
    check_support(samples[0], fs, "exp_shift_test");
    const double ex = std::exp(x);
    double sd = 0.0, sd2 = 0.0, se_ = 0.0, se2 = 0.0, sde = 0.0;
    for (const auto& cfg : samples) {
        const double d = std::exp(-pairing(cfg, fs));  // shifted functional
        const double e = std::exp(-pairing(cfg, f));
        sd += d;
        sd2 += d * d;
        se_ += e;
        se2 += e * e;
        sde += d * e;
    }
    const double n = static_cast<double>(samples.size());
    const double md = sd / n, me = se_ / n;
    if (!(md > 0.0) || !(me > 0.0)) throw StatisticalPowerError("exp_shift_test: degenerate");
    const double vd = std::max(0.0, sd2 / n - md * md);
    const double ve = std::max(0.0, se2 / n - me * me);
    const double cde = sde / n - md * me;
    ShiftTestResult out;
    out.lhs = -std::log(md);
    out.rhs = -ex * std::log(me);
    // delta method on (md, me) -> -log md + e^x log me, with covariance
    const double var_diff =
        (vd / (md * md) + ex * ex * ve / (me * me) - 2.0 * ex * cde / (md * me)) / n;
    const double sd_diff = std::sqrt(std::max(var_diff, 1e-300));
    out.z = (out.lhs - out.rhs) / sd_diff;
    return out;
}

double rightmost(const PointConfiguration& config) {
    if (config.atoms.empty()) throw std::invalid_argument("rightmost: empty configuration");
    return *std::max_element(config.atoms.begin(), config.atoms.end());
}

IntensityProfile intensity_profile(std::span<const PointConfiguration> samples, double lo,
                                   double hi, int bins) {
    if (samples.size() < 1000)
        throw StatisticalPowerError("intensity_profile: need >= 1000 samples");
    if (!(hi > lo) || bins < 2) throw std::invalid_argument("intensity_profile: bad bins");
    const double width = (hi - lo) / bins;
    std::vector<double> counts(bins, 0.0);
    for (const auto& cfg : samples) {
        for (double a : cfg.atoms) {
            if (a < lo || a >= hi) continue;
            const int b = static_cast<int>((a - lo) / width);
            counts[static_cast<std::size_t>(std::min(b, bins - 1))] += 1.0;
        }
    }
    IntensityProfile out;
    const double n = static_cast<double>(samples.size());
    std::vector<double> fit_x, fit_y;
    int empty = 0;
    for (int b = 0; b < bins; ++b) {
        const double center = lo + (b + 0.5) * width;
        const double mean = counts[static_cast<std::size_t>(b)] / n;
        out.bin_center.push_back(center);
        out.mean_count.push_back(mean);
        out.se.push_back(std::sqrt(mean / n));  // Poisson-style error on the mean
        if (counts[static_cast<std::size_t>(b)] > 0.0) {
            fit_x.push_back(center);
            fit_y.push_back(std::log(mean));
        } else {
            ++empty;
        }
    }
    if (empty * 2 >= bins)
        throw StatisticalPowerError("intensity_profile: empty bins dominate the window");
    auto fit = least_squares(fit_x, fit_y);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    out.level = fit.intercept;
    return out;
}

}  // namespace frontlab
