#include "frontlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frontlab/rng.hpp"

namespace frontlab {

bool multiset_dominated(std::vector<double> a, std::vector<double> b) {
    if (a.size() > b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // match the k-th largest of a against the k-th largest of b
    const std::size_t off = b.size() - a.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[off + i]) return false;
    return true;
}

namespace {
bool brute(const std::vector<double>& a, std::size_t i, const std::vector<double>& b,
           std::vector<bool>& used) {
    if (i == a.size()) return true;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (used[j] || a[i] > b[j]) continue;
        used[j] = true;
        if (brute(a, i + 1, b, used)) return true;
        used[j] = false;
    }
    return false;
}
}  // namespace

bool multiset_dominated_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() > b.size()) return false;
    if (b.size() > 10) throw std::invalid_argument("multiset_dominated_bruteforce: too large");
    std::vector<bool> used(b.size(), false);
    return brute(a, 0, b, used);
}

namespace {

// Upper-forest particle. Lower particles reference an upper partner and track
// a nonnegative offset; their paths are the partner's path shifted down.
struct UpperParticle {
    double pos;
    std::uint64_t id;
    bool alive = true;
    bool connected = false;
};

struct LowerParticle {
    std::size_t partner;  // index into the upper array
    double offset;        // X_upper - X_lower >= 0
    std::uint64_t id;
};

std::uint64_t kills_requested(const SelectionRule& rule, std::uint64_t count, std::uint64_t n_keep,
                              Rng& rng) {
    if (count <= n_keep) return 0;
    const std::uint64_t excess = count - n_keep;
    switch (rule.kind) {
        case SelectionRule::Kind::ExactN:
            return excess;
        case SelectionRule::Kind::PlusLazy:
            return count > n_keep + rule.slack ? count - n_keep - rule.slack : 0;
        case SelectionRule::Kind::PlusRandom:
            return rng.uniform_index(excess + 1);
        case SelectionRule::Kind::MinusExtra:
            return excess + (rng.uniform() < 0.5 && count - excess > 1 ? 1 : 0);
    }
    return excess;
}

}  // namespace

CouplingResult coupled_ordering_run(const ReproductionLaw& law, std::uint64_t n_keep,
                                    std::uint64_t branch_events, std::uint64_t seed,
                                    SelectionRule lower_rule, SelectionRule upper_rule) {
    if (n_keep == 0 || n_keep > 64)
        throw std::invalid_argument("coupled_ordering_run: N must be in [1,64]");
    const bool upper_is_plus = upper_rule.kind != SelectionRule::Kind::MinusExtra;
    if (!upper_is_plus)
        throw std::invalid_argument("coupled_ordering_run: upper rule must be an N+ rule");

    Rng rng(seed);
    CouplingResult out;

    std::vector<UpperParticle> upper;
    std::vector<LowerParticle> lower;
    std::uint64_t next_id = 0;
    for (std::uint64_t i = 0; i < n_keep; ++i) {
        const double x = rng.normal();
        upper.push_back({x, next_id, true, true});
        lower.push_back({upper.size() - 1, 0.0, next_id});
        ++next_id;
    }

    auto upper_alive_count = [&]() {
        std::uint64_t c = 0;
        for (const auto& u : upper)
            if (u.alive) ++c;
        return c;
    };

    auto leftmost_alive_upper = [&]() {
        std::size_t best = upper.size();
        for (std::size_t i = 0; i < upper.size(); ++i) {
            if (!upper[i].alive) continue;
            if (best == upper.size() || upper[i].pos < upper[best].pos ||
                (upper[i].pos == upper[best].pos && upper[i].id < upper[best].id))
                best = i;
        }
        return best;
    };

    auto lower_positions = [&]() {
        std::vector<double> xs;
        xs.reserve(lower.size());
        for (const auto& w : lower) xs.push_back(upper[w.partner].pos - w.offset);
        return xs;
    };
    auto upper_positions = [&]() {
        std::vector<double> xs;
        for (const auto& u : upper)
            if (u.alive) xs.push_back(u.pos);
        return xs;
    };

    // kill the m leftmost lower particles; their partners become free
    auto kill_lower = [&](std::uint64_t m) {
        for (std::uint64_t k = 0; k < m && !lower.empty(); ++k) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < lower.size(); ++i) {
                const double xi = upper[lower[i].partner].pos - lower[i].offset;
                const double xb = upper[lower[best].partner].pos - lower[best].offset;
                if (xi < xb || (xi == xb && lower[i].id < lower[best].id)) best = i;
            }
            upper[lower[best].partner].connected = false;
            lower.erase(lower.begin() + static_cast<std::ptrdiff_t>(best));
        }
    };

    // kill the m leftmost upper particles, rewiring connected lower partners
    auto kill_upper = [&](std::uint64_t m) {
        for (std::uint64_t k = 0; k < m; ++k) {
            const std::size_t victim = leftmost_alive_upper();
            if (victim == upper.size()) break;
            if (upper[victim].connected) {
                // find a free particle to the right of the victim
                std::size_t free_idx = upper.size();
                for (std::size_t i = 0; i < upper.size(); ++i) {
                    if (!upper[i].alive || upper[i].connected || i == victim) continue;
                    if (upper[i].pos < upper[victim].pos) continue;
                    if (free_idx == upper.size() || upper[i].pos < upper[free_idx].pos)
                        free_idx = i;
                }
                if (free_idx == upper.size()) {
                    out.map_consistent = false;  // construction failure; should not happen
                    upper[victim].alive = false;
                    continue;
                }
                for (auto& w : lower) {
                    if (w.partner != victim) continue;
                    const double x_w = upper[w.partner].pos - w.offset;
                    w.partner = free_idx;
                    w.offset = upper[free_idx].pos - x_w;
                    if (w.offset < -1e-12) out.map_consistent = false;
                    ++out.rewirings;
                    break;
                }
                upper[free_idx].connected = true;
            }
            upper[victim].alive = false;
        }
    };

    for (std::uint64_t ev = 0; ev < branch_events; ++ev) {
        // diffuse: shared increments for partners, independent for free particles
        const double dt = rng.exponential(law.beta0() * static_cast<double>(upper_alive_count()));
        const double sd = std::sqrt(dt);
        for (auto& u : upper)
            if (u.alive) u.pos += sd * rng.normal();

        // a uniformly chosen alive upper particle branches; if connected, its
        // lower partner branches simultaneously with the same litter size
        std::vector<std::size_t> alive_idx;
        for (std::size_t i = 0; i < upper.size(); ++i)
            if (upper[i].alive) alive_idx.push_back(i);
        const std::size_t parent = alive_idx[rng.uniform_index(alive_idx.size())];
        const std::uint32_t litter = law.sample(rng);

        if (litter == 0) {
            upper[parent].alive = false;
            for (std::size_t i = 0; i < lower.size(); ++i) {
                if (lower[i].partner == parent) {
                    lower.erase(lower.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
        } else {
            const bool was_connected = upper[parent].connected;
            double parent_offset = 0.0;
            std::size_t lower_parent = lower.size();
            if (was_connected) {
                for (std::size_t i = 0; i < lower.size(); ++i)
                    if (lower[i].partner == parent) lower_parent = i;
                if (lower_parent == lower.size()) {
                    out.map_consistent = false;
                    continue;
                }
                parent_offset = lower[lower_parent].offset;
            }
            // parent keeps its slot as the first child; siblings are appended
            upper[parent].id = next_id++;
            if (was_connected) lower[lower_parent].id = upper[parent].id;
            for (std::uint32_t c = 1; c < litter; ++c) {
                upper.push_back({upper[parent].pos, next_id, true, was_connected});
                if (was_connected)
                    lower.push_back({upper.size() - 1, parent_offset, next_id});
                ++next_id;
            }
        }

        // lower selection first (it is at least as aggressive), then upper
        kill_lower(kills_requested(lower_rule, lower.size(), n_keep, rng));
        kill_upper(kills_requested(upper_rule, upper_alive_count(), n_keep, rng));

        ++out.events;
        for (const auto& w : lower)
            if (upper[w.partner].pos - w.offset > upper[w.partner].pos + 1e-12)
                out.map_consistent = false;
        if (!multiset_dominated(lower_positions(), upper_positions())) out.dominance_ok = false;
    }

    out.final_lower = lower_positions();
    out.final_upper = upper_positions();
    return out;
}

}  // namespace frontlab
