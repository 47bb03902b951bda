#include "frontlab/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "frontlab/rng.hpp"

namespace frontlab {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("least_squares: need >= 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss_res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ss_res += r * r;
        }
        fit.slope_se = std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    }
    return fit;
}

SurvivalTable survival_on_grid(std::span<const double> sample,
                               std::span<const double> thresholds) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    SurvivalTable table;
    const double n = static_cast<double>(sorted.size());
    for (double thr : thresholds) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), thr);
        const std::uint64_t cnt = static_cast<std::uint64_t>(sorted.end() - it);
        table.threshold.push_back(thr);
        table.count.push_back(cnt);
        table.survival.push_back(n > 0 ? static_cast<double>(cnt) / n : 0.0);
    }
    return table;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (lo <= 0 || hi <= lo || n < 2) throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> out(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
    return out;
}

static LinearFit tail_fit(std::span<const double> sample, std::span<const double> thresholds) {
    auto table = survival_on_grid(sample, thresholds);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < table.threshold.size(); ++i) {
        if (table.count[i] == 0) continue;
        lx.push_back(std::log(table.threshold[i]));
        ly.push_back(std::log(table.survival[i]));
    }
    if (lx.size() < 2) throw std::runtime_error("tail_fit: insufficient tail mass");
    return least_squares(lx, ly);
}

double bootstrap_tail_slope_se(std::span<const double> sample,
                               std::span<const double> thresholds, Rng& rng, int resamples) {
    const std::size_t n = sample.size();
    if (n == 0) throw std::invalid_argument("bootstrap_tail_slope_se: empty sample");
    std::vector<double> resample(n);
    std::vector<double> slopes;
    slopes.reserve(resamples);
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) resample[i] = sample[rng.uniform_index(n)];
        try {
            slopes.push_back(tail_fit(resample, thresholds).slope);
        } catch (const std::runtime_error&) {
            // resample lost the far tail entirely; skip it
        }
    }
    if (slopes.size() < 2) throw std::runtime_error("bootstrap_tail_slope_se: no usable resamples");
    double m = 0;
    for (double s : slopes) m += s;
    m /= static_cast<double>(slopes.size());
    double v = 0;
    for (double s : slopes) v += (s - m) * (s - m);
    return std::sqrt(v / (static_cast<double>(slopes.size()) - 1.0));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
    // c(alpha) = sqrt(-ln(alpha/2)/2)
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

static void k_statistics(std::span<const double> data, double out[4]) {
    const double n = static_cast<double>(data.size());
    double s = 0;
    for (double x : data) s += x;
    const double mean = s / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : data) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out[0] = mean;
    out[1] = n / (n - 1.0) * m2;
    out[2] = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    out[3] = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
             ((n - 1.0) * (n - 2.0) * (n - 3.0));
}

CumulantSet sample_cumulants(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 5) throw std::invalid_argument("sample_cumulants: need >= 5 observations");
    CumulantSet cs;
    cs.n = n;
    double k[4];
    k_statistics(data, k);
    cs.k1 = k[0];
    cs.k2 = k[1];
    cs.k3 = k[2];
    cs.k4 = k[3];

    // Jackknife standard errors.
    std::vector<double> loo(n - 1);
    std::vector<std::array<double, 4>> jk(n);
    for (std::size_t i = 0; i < n; ++i) {
        loo.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) loo.push_back(data[j]);
        double kj[4];
        k_statistics(loo, kj);
        jk[i] = {kj[0], kj[1], kj[2], kj[3]};
    }
    double se[4];
    for (int c = 0; c < 4; ++c) {
        double m = 0;
        for (std::size_t i = 0; i < n; ++i) m += jk[i][c];
        m /= static_cast<double>(n);
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) v += (jk[i][c] - m) * (jk[i][c] - m);
        se[c] = std::sqrt((static_cast<double>(n) - 1.0) / static_cast<double>(n) * v);
    }
    cs.se1 = se[0];
    cs.se2 = se[1];
    cs.se3 = se[2];
    cs.se4 = se[3];
    return cs;
}

Summary summarize(std::span<const double> data) {
    Summary s;
    s.n = data.size();
    if (s.n == 0) return s;
    double sum = 0;
    for (double x : data) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double v = 0;
        for (double x : data) v += (x - s.mean) * (x - s.mean);
        s.var = v / (static_cast<double>(s.n) - 1.0);
        s.se = std::sqrt(s.var / static_cast<double>(s.n));
    }
    return s;
}

}  // namespace frontlab
