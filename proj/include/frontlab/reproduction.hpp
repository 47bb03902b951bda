#pragma once

#include <cstdint>
#include <vector>

namespace frontlab {

class Rng;

// Offspring law q(0..k_max) with the derived quantities
//   m  = sum_k (k-1) q(k),  m2 = sum_k k(k-1) q(k),  beta0 = 1/(2m).
class ReproductionLaw {
  public:
    static ReproductionLaw binary() { return ReproductionLaw({0.0, 0.0, 1.0}); }
    static ReproductionLaw from_probs(std::vector<double> probs) {
        return ReproductionLaw(std::move(probs));
    }

    double m() const { return m_; }
    double m2() const { return m2_; }
    double beta0() const { return beta0_; }
    double prob(std::size_t k) const { return k < q_.size() ? q_[k] : 0.0; }
    std::size_t k_max() const { return q_.size() - 1; }
    bool no_single_child() const { return q_.size() < 2 || q_[1] == 0.0; }

    // generating function f(s) = sum_k s^k q(k) and its derivative
    double gen_fn(double s) const;
    double gen_fn_dx(double s) const;

    // smallest fixed point of f in [0,1] (the extinction probability)
    double extinction_prob() const;

    std::uint32_t sample(Rng& rng) const;

  private:
    explicit ReproductionLaw(std::vector<double> probs);

    std::vector<double> q_;
    std::vector<double> cdf_;
    double m_, m2_, beta0_;
};

}  // namespace frontlab
