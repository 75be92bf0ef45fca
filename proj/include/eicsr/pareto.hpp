#pragma once

#include "eicsr/search.hpp"

namespace eicsr {

/// Successive non-dominated layers over (complexity ascending, nmse
/// ascending). Tier 0 is the front; every tier-k member is dominated by
/// someone in tier k-1. Members within a tier are sorted by the ordering
/// key.
struct ParetoFront {
    std::vector<std::vector<Candidate>> tiers;
};

ParetoFront pareto_tiers(const std::vector<Candidate>& cands);

/// A cross-front pair with its distance value
/// L = dComplexity^2 + dR2^2 - dEIC^2 (differences a minus b).
struct CandidatePair {
    Candidate a, b;
    double l = 0.0;
};

/// All cross-front pairs satisfying |dComplexity| <= 2, |dR2| <= 0.02,
/// |dEIC| >= 3 and max(R2) > 0.85, sorted by L ascending. Pairs like these
/// isolate the digit-loss score: similar size and accuracy, very different
/// conditioning.
struct PairSelection {
    std::vector<CandidatePair> pairs;
};

PairSelection select_pairs(const std::vector<Candidate>& front_a,
                           const std::vector<Candidate>& front_b);

} // namespace eicsr
