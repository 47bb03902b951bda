#include "frontlab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "frontlab/quadrature.hpp"

namespace frontlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2 = kPi * kPi;

// Crossover between the Gaussian and Fourier representations (dimensionless
// time): at t = 0.5 both series reach 1e-15 remainders within ~12 terms.
constexpr double kCrossover = 0.5;

// Fold x into [-1,1] using 2-periodicity.
double fold(double x) {
    x = std::fmod(x, 2.0);
    if (x > 1.0) x -= 2.0;
    if (x < -1.0) x += 2.0;
    return x;
}

double theta_fourier(double x, double t, double tol) {
    double sum = 0.5;
    for (int n = 1;; ++n) {
        const double decay = std::exp(-0.5 * kPi2 * n * n * t);
        if (decay < tol / 10.0) break;
        sum += decay * std::cos(kPi * n * x);
        if (n > 4000) throw std::runtime_error("theta: series did not converge");
    }
    return sum;
}

double theta_gaussian(double x, double t, double tol) {
    x = fold(x);
    const double pref = 1.0 / std::sqrt(2.0 * kPi * t);
    double sum = 0.0;
    for (int n = 0;; ++n) {
        double term = std::exp(-(x - 2.0 * n) * (x - 2.0 * n) / (2.0 * t));
        if (n > 0) term += std::exp(-(x + 2.0 * n) * (x + 2.0 * n) / (2.0 * t));
        if (pref * term < tol / 10.0 && n > 0) break;
        sum += term;
        if (n > 4000) throw std::runtime_error("theta: series did not converge");
    }
    return pref * sum;
}

double theta_dx_fourier(double x, double t, double tol) {
    double sum = 0.0;
    for (int n = 1;; ++n) {
        const double decay = kPi * n * std::exp(-0.5 * kPi2 * n * n * t);
        if (decay < tol / 10.0) break;
        sum -= decay * std::sin(kPi * n * x);
        if (n > 4000) throw std::runtime_error("theta_dx: series did not converge");
    }
    return sum;
}

double theta_dx_gaussian(double x, double t, double tol) {
    // d/dx of each Gaussian term: -((x-2n)/t) * (2 pi t)^{-1/2} exp(-(x-2n)^2/(2t)).
    x = fold(x);
    const double pref = 1.0 / std::sqrt(2.0 * kPi * t);
    double sum = 0.0;
    for (int n = 0;; ++n) {
        double term = 0.0, bound = 0.0;
        {
            const double u = x - 2.0 * n;
            const double e = std::exp(-u * u / (2.0 * t));
            term += -(u / t) * e;
            bound += (std::fabs(u) + 1.0) / t * e;
        }
        if (n > 0) {
            const double u = x + 2.0 * n;
            const double e = std::exp(-u * u / (2.0 * t));
            term += -(u / t) * e;
            bound += (std::fabs(u) + 1.0) / t * e;
        }
        if (pref * bound < tol / 10.0 && n > 0) break;
        sum += term;
        if (n > 4000) throw std::runtime_error("theta_dx: series did not converge");
    }
    return pref * sum;
}

// d/dt of one Gaussian heat-kernel term g_m(t) = (2 pi t)^{-1/2} exp(-m^2/(2t)).
double gauss_term(double m, double t) {
    return std::exp(-m * m / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}
double gauss_term_dt(double m, double t) {
    return gauss_term(m, t) * (m * m - t) / (2.0 * t * t);
}
double gauss_term_dtt(double m, double t) {
    const double r = (m * m - t) / (2.0 * t * t);
    const double dr = -0.5 / (t * t) - (m * m - t) / (t * t * t);
    return gauss_term(m, t) * (r * r + dr);
}

}  // namespace

double theta(double x, double t, double tol) {
    if (!(t > 0.0)) throw std::domain_error("theta: t must be > 0");
    return t >= kCrossover ? theta_fourier(x, t, tol) : theta_gaussian(x, t, tol);
}

double theta_dx(double x, double t, double tol) {
    if (!(t > 0.0)) throw std::domain_error("theta_dx: t must be > 0");
    return t >= kCrossover ? theta_dx_fourier(x, t, tol) : theta_dx_gaussian(x, t, tol);
}

double theta_bar(double t, double tol) {
    if (t < 0.0) throw std::domain_error("theta_bar: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t >= kCrossover) {
        double sum = 1.0;
        double sign = -1.0;
        for (int n = 2;; ++n) {
            const double term = n * n * std::exp(-0.5 * kPi2 * (n * n - 1.0) * t);
            if (term < tol / 10.0) break;
            sum += sign * term;
            sign = -sign;
            if (n > 4000) throw std::runtime_error("theta_bar: series did not converge");
        }
        return std::clamp(sum, 0.0, 1.0);
    }
    // theta_bar = (2/pi^2) e^{pi^2 t/2} d/dt theta(1,t);
    // theta(1,t) = 2 sum_{m>=1 odd} g_m(t).
    double d = 0.0;
    for (int m = 1;; m += 2) {
        const double term = gauss_term_dt(m, t);
        d += 2.0 * term;
        if (std::fabs(term) < tol / 10.0 && m > 1) break;
        if (m > 8001) throw std::runtime_error("theta_bar: series did not converge");
    }
    return std::clamp(2.0 / kPi2 * std::exp(0.5 * kPi2 * t) * d, 0.0, 1.0);
}

double theta_bar_dt(double t, double tol) {
    if (t < 0.0) throw std::domain_error("theta_bar_dt: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t >= kCrossover) {
        double sum = 0.0;
        double sign = -1.0;
        for (int n = 2;; ++n) {
            const double lam = 0.5 * kPi2 * (n * n - 1.0);
            const double term = n * n * lam * std::exp(-lam * t);
            if (term < tol / 10.0) break;
            sum -= sign * term;  // derivative flips the alternating sign
            sign = -sign;
            if (n > 4000) throw std::runtime_error("theta_bar_dt: series did not converge");
        }
        return sum;
    }
    // Differentiate theta_bar = (2/pi^2) e^{pi^2 t/2} D(t) with D = d/dt theta(1,t).
    double d1 = 0.0, d2 = 0.0;
    for (int m = 1;; m += 2) {
        const double a1 = gauss_term_dt(m, t);
        const double a2 = gauss_term_dtt(m, t);
        d1 += 2.0 * a1;
        d2 += 2.0 * a2;
        if (std::fabs(a1) + std::fabs(a2) < tol / 10.0 && m > 1) break;
        if (m > 8001) throw std::runtime_error("theta_bar_dt: series did not converge");
    }
    return std::exp(0.5 * kPi2 * t) * (d1 + 2.0 / kPi2 * d2);
}

double error_term(double t, double tol) {
    if (!(t > 0.0)) throw std::domain_error("error_term: t must be > 0");
    double sum = 0.0;
    for (int n = 2;; ++n) {
        const double term = kPi2 * n * n * std::exp(-0.5 * kPi2 * (n * n - 1.0) * t);
        sum += term;
        if (term < tol / 10.0) break;
        if (n > 20000) throw std::runtime_error("error_term: series did not converge");
    }
    return sum;
}

double barrier_fn(double delta, double t, double tol) {
    if (delta < 0.0) throw std::domain_error("barrier_fn: delta must be >= 0");
    if (t <= 0.0) return 0.0;
    return std::log1p(std::expm1(delta) * theta_bar(t, tol));
}

double barrier_fn_dt(double delta, double t, double tol) {
    if (delta < 0.0) throw std::domain_error("barrier_fn_dt: delta must be >= 0");
    if (t <= 0.0) return 0.0;
    const double em = std::expm1(delta);
    return em * theta_bar_dt(t, tol) / (1.0 + em * theta_bar(t, tol));
}

IntervalKernel::IntervalKernel(double width, double tolerance) : a(width), tol(tolerance) {
    if (!(a >= kPi)) throw std::invalid_argument("IntervalKernel: width must be >= pi");
    if (!(tol > 0.0)) throw std::invalid_argument("IntervalKernel: tol must be > 0");
    mu = std::sqrt(1.0 - kPi2 / (a * a));
}

TimeSet::TimeSet(std::initializer_list<std::pair<double, double>> iv) : intervals(iv) {
    validate();
}

void TimeSet::validate() const {
    double prev_hi = -1.0;
    for (const auto& [lo, hi] : intervals) {
        if (!(lo >= 0.0) || !(hi > lo))
            throw std::invalid_argument("TimeSet: intervals must satisfy 0 <= lo < hi");
        if (!std::isfinite(hi))
            throw std::invalid_argument("TimeSet: unbounded interval (no decay certificate)");
        if (lo < prev_hi) throw std::invalid_argument("TimeSet: intervals must be disjoint sorted");
        prev_hi = hi;
    }
}

double TimeSet::measure() const {
    double m = 0.0;
    for (const auto& [lo, hi] : intervals) m += hi - lo;
    return m;
}

double TimeSet::inf() const {
    return intervals.empty() ? 0.0 : intervals.front().first;
}

namespace {

void check_space(const IntervalKernel& k, double v, const char* who) {
    if (!(v >= 0.0) || !(v <= k.a)) throw std::domain_error(std::string(who) + ": argument outside [0,a]");
}

}  // namespace

double killed_density(const IntervalKernel& k, double x, double y, double t) {
    check_space(k, x, "killed_density");
    check_space(k, y, "killed_density");
    if (!(t > 0.0)) throw std::domain_error("killed_density: t must be > 0");
    if (x == 0.0 || x == k.a || y == 0.0 || y == k.a) return 0.0;
    const double u = t / (k.a * k.a);
    if (u >= kCrossover) {
        // sine series, no cancellation for large times
        double sum = 0.0;
        for (int n = 1;; ++n) {
            const double decay = std::exp(-0.5 * kPi2 * n * n * u);
            if (decay < k.tol / 10.0) break;
            sum += decay * std::sin(kPi * n * x / k.a) * std::sin(kPi * n * y / k.a);
            if (n > 4000) throw std::runtime_error("killed_density: series did not converge");
        }
        return std::max(0.0, 2.0 / k.a * sum);
    }
    const double v = theta_gaussian((x - y) / k.a, u, k.tol) -
                     theta_gaussian((x + y) / k.a, u, k.tol);
    return std::max(0.0, v / k.a);
}

double bbm_weighted_density(const IntervalKernel& k, double x, double y, double t) {
    return std::exp(k.mu * (x - y) + 0.5 * kPi2 * t / (k.a * k.a)) * killed_density(k, x, y, t);
}

double exit_density(const IntervalKernel& k, double x, double t) {
    check_space(k, x, "exit_density");
    if (!(t > 0.0)) throw std::domain_error("exit_density: t must be > 0");
    return std::max(0.0, theta_dx(x / k.a - 1.0, t / (k.a * k.a), k.tol) / (k.a * k.a));
}

ExitIntegrals exit_integrals(const IntervalKernel& k, double x, const TimeSet& S,
                             std::optional<double> y) {
    check_space(k, x, "exit_integrals");
    if (y) check_space(k, *y, "exit_integrals");
    S.validate();
    ExitIntegrals out;
    if (y) out.j_value = 0.0;
    const double a2 = k.a * k.a;
    const double tol = k.tol * std::max(S.measure(), 1.0);
    for (const auto& [lo, hi] : S.intervals) {
        auto gi = integrate(
            [&](double s) { return std::exp(0.5 * kPi2 * s / a2) * exit_density(k, x, s); },
            std::max(lo, 1e-300), hi, tol, 1e-12);
        out.i_value += gi.value;
        out.i_error += gi.error;
        if (y) {
            auto gj = integrate(
                [&](double s) { return std::exp(0.5 * kPi2 * s / a2) * killed_density(k, x, *y, s); },
                std::max(lo, 1e-300), hi, tol, 1e-12);
            *out.j_value += gj.value;
            out.j_error += gj.error;
        }
    }
    return out;
}

double taboo_density(const IntervalKernel& k, double x, double y, double t) {
    if (!(x > 0.0) || !(x < k.a))
        throw std::domain_error("taboo_density: x must lie in the open interval (0,a)");
    if (!(y > 0.0) || !(y < k.a))
        throw std::domain_error("taboo_density: y must lie in the open interval (0,a)");
    if (!(t > 0.0)) throw std::domain_error("taboo_density: t must be > 0");
    const double u = t / (k.a * k.a);
    // (2/a) sin(pi y/a) sum_n exp(-pi^2 (n^2-1) u / 2) U_{n-1}(cos(pi x/a)) sin(pi n y/a),
    // with the Chebyshev ratio sin(n z)/sin(z) evaluated by its recurrence.
    const double cx = std::cos(kPi * x / k.a);
    const double sy = std::sin(kPi * y / k.a);
    double ratio_prev = 0.0;  // U_{-1}
    double ratio = 1.0;       // U_0
    double sum = 0.0;
    for (int n = 1;; ++n) {
        const double decay = std::exp(-0.5 * kPi2 * (n * n - 1.0) * u);
        const double term = decay * ratio * std::sin(kPi * n * y / k.a);
        sum += term;
        // |ratio| <= n, so this bounds the remainder term-wise
        if (decay * (n + 1.0) < k.tol / 10.0) break;
        if (n > 100000) throw std::runtime_error("taboo_density: series did not converge");
        const double next = 2.0 * cx * ratio - ratio_prev;
        ratio_prev = ratio;
        ratio = next;
    }
    return std::max(0.0, 2.0 / k.a * sy * sum);
}

double taboo_stationary(const IntervalKernel& k, double y) {
    check_space(k, y, "taboo_stationary");
    const double s = std::sin(kPi * y / k.a);
    return 2.0 / k.a * s * s;
}

}  // namespace frontlab
