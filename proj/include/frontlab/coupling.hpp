#pragma once

#include <cstdint>
#include <vector>

#include "frontlab/reproduction.hpp"

namespace frontlab {

// Selection rules for the coupled pair of systems. A kill always removes a
// prefix of the leftmost particles (ties broken by creation order):
//   ExactN     removes exactly the excess over N (the N-BBM rule);
//   PlusLazy   removes only the excess over N + slack (a valid N+ rule:
//              every victim has >= N particles to its right);
//   PlusRandom removes a uniform number in {0,...,excess} (also a valid N+ rule);
//   MinusExtra removes the excess and then one more with probability 1/2
//              (a valid N- rule: everything with >= N to the right dies).
struct SelectionRule {
    enum class Kind { ExactN, PlusLazy, PlusRandom, MinusExtra };
    Kind kind = Kind::ExactN;
    std::uint64_t slack = 0;
};

struct CouplingResult {
    bool dominance_ok = true;          // lower <= upper in the stochastic order at every event
    bool map_consistent = true;        // the injective map kept X_w <= X_{phi(w)}
    std::uint64_t events = 0;
    std::uint64_t rewirings = 0;
    std::vector<double> final_lower;   // positions at the last event
    std::vector<double> final_upper;
};

// Builds one shared branching forest and embeds two selection systems in it,
// maintaining the order-preserving injective map of the coupling construction
// (rewiring a connected particle to a free one on upper-system kills). The
// lower system must kill at least as aggressively as the upper one.
CouplingResult coupled_ordering_run(const ReproductionLaw& law, std::uint64_t n_keep,
                                    std::uint64_t branch_events, std::uint64_t seed,
                                    SelectionRule lower_rule, SelectionRule upper_rule);

// Stochastic-order check nu_a <= nu_b via the greedy injection (sorted tails).
bool multiset_dominated(std::vector<double> a, std::vector<double> b);

// Exhaustive check over all injective matchings; exponential, for tiny sizes.
bool multiset_dominated_bruteforce(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace frontlab
