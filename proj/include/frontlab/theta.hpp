#pragma once

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

namespace frontlab {

// Heat kernel on the circle R/2Z:
//   theta(x,t) = 1/2 + sum_{n>=1} exp(-pi^2 n^2 t / 2) cos(pi n x)            (Fourier)
//              = sum_{n in Z} (2 pi t)^{-1/2} exp(-(x-2n)^2 / (2t))           (Gaussian)
// The Fourier series is used above the crossover time, the Gaussian sum below;
// both are truncated so the remainder is below the requested tolerance.
double theta(double x, double t, double tol = 1e-12);
double theta_dx(double x, double t, double tol = 1e-12);

// theta_bar(t) = sum_{n>=1} (-1)^{n+1} n^2 exp(-pi^2 (n^2-1) t / 2),
// increasing from 0 at t=0 to 1 at t=+inf.
double theta_bar(double t, double tol = 1e-12);
double theta_bar_dt(double t, double tol = 1e-12);

// E_t = pi^2 sum_{n>=2} n^2 exp(-pi^2 (n^2-1) t / 2); decreasing in t.
double error_term(double t, double tol = 1e-12);

// Relaxation profile f_delta(t) = log(1 + (e^delta - 1) theta_bar(t)) for t>0,
// 0 for t<=0; increases from 0 to delta.
double barrier_fn(double delta, double t, double tol = 1e-12);
double barrier_fn_dt(double delta, double t, double tol = 1e-12);

// Interval [0,a] with the derived drift mu = sqrt(1 - pi^2/a^2); requires a >= pi.
struct IntervalKernel {
    double a;
    double mu;
    double tol;

    explicit IntervalKernel(double width, double tolerance = 1e-12);
};

// Finite union of disjoint time intervals [lo,hi], sorted ascending.
struct TimeSet {
    std::vector<std::pair<double, double>> intervals;

    TimeSet() = default;
    TimeSet(std::initializer_list<std::pair<double, double>> iv);
    void validate() const;
    double measure() const;
    double inf() const;
};

// Transition density of Brownian motion killed at 0 and a.
double killed_density(const IntervalKernel& k, double x, double y, double t);

// Expected-particle density of BBM with drift -mu killed at {0,a}:
// exp(mu (x-y) + pi^2 t / (2 a^2)) * p_t^a(x,y).
double bbm_weighted_density(const IntervalKernel& k, double x, double y, double t);

// Density of the exit time at the upper endpoint a: a^{-2} theta'(x/a - 1, t/a^2).
double exit_density(const IntervalKernel& k, double x, double t);

struct ExitIntegrals {
    double i_value = 0.0;
    double i_error = 0.0;
    std::optional<double> j_value;
    double j_error = 0.0;
};

// I^a(x,S) = int_S exp(pi^2 s/(2a^2)) r_s^a(x) ds and, when y is given,
// J^a(x,y,S) = int_S exp(pi^2 s/(2a^2)) p_s^a(x,y) ds, by adaptive quadrature.
ExitIntegrals exit_integrals(const IntervalKernel& k, double x, const TimeSet& S,
                             std::optional<double> y = std::nullopt);

// Transition density of the Brownian taboo process on (0,a) and its
// stationary density (2/a) sin^2(pi y / a).
double taboo_density(const IntervalKernel& k, double x, double y, double t);
double taboo_stationary(const IntervalKernel& k, double y);

}  // namespace frontlab
