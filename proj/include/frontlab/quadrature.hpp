#pragma once

#include <functional>

namespace frontlab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int evaluations = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        evaluations += o.evaluations;
        return *this;
    }
};

// Adaptive Gauss-Kronrod (7-15) quadrature on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 50);

}  // namespace frontlab
