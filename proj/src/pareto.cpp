#include "eicsr/pareto.hpp"

#include <algorithm>
#include <cmath>

namespace eicsr {

namespace {

bool dominates(const Candidate& a, const Candidate& b) {
    const bool no_worse = a.complexity <= b.complexity && a.model.nmse <= b.model.nmse;
    const bool strictly = a.complexity < b.complexity || a.model.nmse < b.model.nmse;
    return no_worse && strictly;
}

bool key_less(const Candidate& a, const Candidate& b) {
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return a.model.nmse < b.model.nmse;
}

} // namespace

ParetoFront pareto_tiers(const std::vector<Candidate>& cands) {
    ParetoFront front;
    std::vector<Candidate> rest = cands;
    while (!rest.empty()) {
        std::vector<Candidate> tier, next;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < rest.size() && !dominated; ++j)
                dominated = j != i && dominates(rest[j], rest[i]);
            (dominated ? next : tier).push_back(rest[i]);
        }
        std::stable_sort(tier.begin(), tier.end(), key_less);
        front.tiers.push_back(std::move(tier));
        rest = std::move(next);
    }
    return front;
}

PairSelection select_pairs(const std::vector<Candidate>& front_a,
                           const std::vector<Candidate>& front_b) {
    PairSelection sel;
    for (const Candidate& a : front_a) {
        for (const Candidate& b : front_b) {
            const double dc = static_cast<double>(a.complexity - b.complexity);
            const double dr = a.model.r2 - b.model.r2;
            const double de = a.eic - b.eic;
            if (std::fabs(dc) > 2.0) continue;
            if (std::fabs(dr) > 0.02) continue;
            if (std::fabs(de) < 3.0) continue;
            if (!(std::max(a.model.r2, b.model.r2) > 0.85)) continue;
            sel.pairs.push_back({a, b, dc * dc + dr * dr - de * de});
        }
    }
    std::stable_sort(sel.pairs.begin(), sel.pairs.end(),
                     [](const CandidatePair& x, const CandidatePair& y) { return x.l < y.l; });
    return sel;
}

} // namespace eicsr
