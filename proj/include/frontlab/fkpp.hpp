#pragma once

#include <stdexcept>
#include <vector>

#include "frontlab/reproduction.hpp"

namespace frontlab {

// Monotone profile psi of (1/2) psi'' - c psi' = beta0 (psi - f(psi)) with
// psi(-inf) = 1 and psi(+inf) = q*, the extinction probability. In the
// critical case c = 1 the translate is fixed so that
// (1 - psi(-x)) / (x e^{-x}) -> 1.
class TravellingWave {
  public:
    TravellingWave(const ReproductionLaw& law, double c, double half_width = 20.0,
                   std::size_t n_points = 4001);

    double eval(double x) const;
    double eval_tolerance() const { return eval_tol_; }

    double c() const { return c_; }
    double q_star() const { return q_star_; }
    double residual_inf() const { return residual_inf_; }
    double k_estimate() const { return k_estimate_; }  // pre-normalisation amplitude

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return psi_; }

  private:
    double c_;
    double q_star_;
    double shift_ = 0.0;
    double residual_inf_ = 0.0;
    double k_estimate_ = 1.0;
    double eval_tol_ = 0.0;
    std::vector<double> x_, psi_;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace frontlab
