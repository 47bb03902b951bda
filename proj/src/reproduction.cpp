#include "frontlab/reproduction.hpp"

#include <cmath>
#include <stdexcept>

#include "frontlab/rng.hpp"

namespace frontlab {

ReproductionLaw::ReproductionLaw(std::vector<double> probs) : q_(std::move(probs)) {
    if (q_.empty()) throw std::invalid_argument("ReproductionLaw: empty probability list");
    double total = 0.0;
    for (double p : q_) {
        if (p < 0.0 || !std::isfinite(p))
            throw std::invalid_argument("ReproductionLaw: probabilities must be finite and >= 0");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ReproductionLaw: probabilities must sum to 1");
    m_ = 0.0;
    m2_ = 0.0;
    for (std::size_t k = 0; k < q_.size(); ++k) {
        m_ += (static_cast<double>(k) - 1.0) * q_[k];
        m2_ += static_cast<double>(k) * (static_cast<double>(k) - 1.0) * q_[k];
    }
    if (!(m_ > 0.0)) throw std::invalid_argument("ReproductionLaw: supercriticality requires m > 0");
    beta0_ = 1.0 / (2.0 * m_);
    cdf_.resize(q_.size());
    double c = 0.0;
    for (std::size_t k = 0; k < q_.size(); ++k) {
        c += q_[k];
        cdf_[k] = c;
    }
    cdf_.back() = 1.0;
}

double ReproductionLaw::gen_fn(double s) const {
    double acc = 0.0;
    for (std::size_t k = q_.size(); k-- > 0;) acc = acc * s + q_[k];
    return acc;
}

double ReproductionLaw::gen_fn_dx(double s) const {
    double acc = 0.0;
    for (std::size_t k = q_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * q_[k];
    return acc;
}

double ReproductionLaw::extinction_prob() const {
    if (q_[0] == 0.0) return 0.0;
    // f is convex with f(1)=1 and f'(1) = m+1 > 1: one more fixed point in [0,1).
    double lo = 0.0, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gen_fn(mid) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint32_t ReproductionLaw::sample(Rng& rng) const {
    const double u = rng.uniform();
    for (std::size_t k = 0; k < cdf_.size(); ++k)
        if (u < cdf_[k]) return static_cast<std::uint32_t>(k);
    return static_cast<std::uint32_t>(cdf_.size() - 1);
}

}  // namespace frontlab
