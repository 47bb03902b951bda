#include "frontlab/fkpp.hpp"

#include <algorithm>
#include <cmath>

namespace frontlab {

namespace {

// Tridiagonal solve, in place on the right-hand side.
void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

TravellingWave::TravellingWave(const ReproductionLaw& law, double c, double half_width,
                               std::size_t n_points) {
    if (!(c >= 1.0)) throw std::invalid_argument("TravellingWave: need c >= 1");
    if (n_points < 11) throw std::invalid_argument("TravellingWave: grid too coarse");
    c_ = c;
    q_star_ = law.extinction_prob();
    const double beta0 = law.beta0();
    const double L = half_width;
    const std::size_t n = n_points;
    const double h = 2.0 * L / static_cast<double>(n - 1);
    const bool critical = c == 1.0;

    // Decay rates of the linearisations: at -inf, 1-psi ~ e^{lambda_left x}
    // (with a polynomial factor when the root is double); at +inf,
    // psi - q* ~ e^{lambda_right x}.
    const double lambda_left = critical ? 1.0 - 1.0 / L : c - std::sqrt(c * c - 1.0);
    const double lambda_right =
        c - std::sqrt(c * c + 2.0 * beta0 * (1.0 - law.gen_fn_dx(q_star_)));

    x_.resize(n);
    psi_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x_[i] = -L + h * static_cast<double>(i);
        psi_[i] = q_star_ + (1.0 - q_star_) / (1.0 + std::exp(x_[i]));
    }

    const std::size_t pin = critical ? 0 : n / 2;  // c > 1: translations satisfy the
                                                   // Robin rows exactly, so pin the phase
    const double pin_value = 0.5 * (1.0 + q_star_);

    auto assemble = [&](const std::vector<double>& psi, std::vector<double>& F) {
        F[0] = (psi[1] - psi[0]) / h - lambda_left * (0.5 * (psi[0] + psi[1]) - 1.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            F[i] = 0.5 * (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]) / (h * h) -
                   c * (psi[i + 1] - psi[i - 1]) / (2.0 * h) -
                   beta0 * (psi[i] - law.gen_fn(psi[i]));
        }
        F[n - 1] =
            (psi[n - 1] - psi[n - 2]) / h - lambda_right * (0.5 * (psi[n - 2] + psi[n - 1]) - q_star_);
        if (pin != 0) F[pin] = psi[pin] - pin_value;
    };

    std::vector<double> F(n), lo(n), di(n), up(n), step(n), trial(n);
    auto norm_inf = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    };

    assemble(psi_, F);
    double fnorm = norm_inf(F);
    bool converged = false;
    // second differences divide by h^2, so machine noise on psi shows up in
    // the residual at about eps/h^2; stop just above that floor
    const double newton_tol = std::max(1e-11, 1e-15 / (h * h));
    for (int iter = 0; iter < 80; ++iter) {
        if (fnorm < newton_tol) {
            converged = true;
            break;
        }
        lo[0] = 0.0;
        di[0] = -1.0 / h - 0.5 * lambda_left;
        up[0] = 1.0 / h - 0.5 * lambda_left;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            lo[i] = 0.5 / (h * h) + c / (2.0 * h);
            di[i] = -1.0 / (h * h) - beta0 * (1.0 - law.gen_fn_dx(psi_[i]));
            up[i] = 0.5 / (h * h) - c / (2.0 * h);
        }
        lo[n - 1] = -1.0 / h - 0.5 * lambda_right;
        di[n - 1] = 1.0 / h - 0.5 * lambda_right;
        up[n - 1] = 0.0;
        if (pin != 0) {
            lo[pin] = 0.0;
            di[pin] = 1.0;
            up[pin] = 0.0;
        }
        step = F;
        for (auto& v : step) v = -v;
        thomas_solve(lo, di, up, step);

        double damp = 1.0;
        for (int back = 0; back < 40; ++back) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = psi_[i] + damp * step[i];
            assemble(trial, F);
            const double fn = norm_inf(F);
            if (fn < fnorm || fn < newton_tol) {
                psi_ = trial;
                fnorm = fn;
                break;
            }
            damp *= 0.5;
            if (back == 39) {
                if (fnorm < 1e-10) break;  // at the roundoff floor already
                throw SolverError("TravellingWave: line search stalled");
            }
        }
    }
    if (!converged && fnorm >= 1e-10)
        throw SolverError("TravellingWave: Newton iteration did not converge");

    // Self-consistency residual of the interior collocation equations.
    assemble(psi_, F);
    residual_inf_ = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (i != pin) residual_inf_ = std::max(residual_inf_, std::fabs(F[i]));

    // Fix the translate in the critical case: 1 - psi(x) = (-K x + B) e^{x} in the
    // left tail, so (1-psi(x)) e^{-x} is affine in x there; a two-point fit
    // recovers K and the shift -log K enforces K = 1.
    if (critical) {
        const double xa = -0.7 * L, xb = -0.5 * L;
        auto raw = [&](double x) {
            const double pos = (x + L) / h;
            const std::size_t i =
                std::min(n - 2, static_cast<std::size_t>(std::max(0.0, std::floor(pos))));
            const double w = pos - static_cast<double>(i);
            return psi_[i] * (1.0 - w) + psi_[i + 1] * w;
        };
        const double ra = (1.0 - raw(xa)) * std::exp(-xa);
        const double rb = (1.0 - raw(xb)) * std::exp(-xb);
        k_estimate_ = (ra - rb) / (xb - xa);
        if (!(k_estimate_ > 0.0)) throw SolverError("TravellingWave: tail amplitude fit failed");
        shift_ = -std::log(k_estimate_);
    }
    eval_tol_ = std::max(10.0 * residual_inf_, h * h);
}

double TravellingWave::eval(double x) const {
    const double xt = x + shift_;  // normalised wave is the raw one translated by shift_
    const std::size_t n = x_.size();
    if (xt <= x_.front()) return psi_.front();
    if (xt >= x_.back()) return psi_.back();
    const double h = x_[1] - x_[0];
    const double pos = (xt - x_.front()) / h;
    const std::size_t i = std::min(n - 2, static_cast<std::size_t>(pos));
    const double w = pos - static_cast<double>(i);
    return psi_[i] * (1.0 - w) + psi_[i + 1] * w;
}

}  // namespace frontlab
