#pragma once

#include <vector>

#include "eicsr/expr.hpp"

namespace eicsr {

/// Per-corpus distributions of four formula features. Count features get
/// bins 0..20 plus an overflow bin; length gets 1..60 plus overflow. All
/// four are normalized then smoothed (epsilon added, renormalized) so
/// divergences stay finite.
struct FeatureHistogram {
    static constexpr std::size_t kCountBins = 22; // 0..20 + overflow
    static constexpr std::size_t kLengthBins = 61; // 1..60 + overflow

    std::vector<double> variables; // distinct-variable count
    std::vector<double> constants; // constant-node count
    std::vector<double> operators; // operator-node count
    std::vector<double> length;    // total node count
    double epsilon = 1e-10;
};

/// One scalar per feature, as produced by the divergence functions.
struct FeatureDivergence {
    double variables = 0.0;
    double constants = 0.0;
    double operators = 0.0;
    double length = 0.0;
};

/// Builds the four smoothed feature distributions. Throws EmptyCorpus.
FeatureHistogram featurize(const std::vector<Expr>& corpus, double epsilon = 1e-10);

/// Jensen-Shannon divergence per feature, base 2 (so disjoint supports
/// score 1). Symmetric. Throws BinMismatch on differing layouts.
FeatureDivergence js_divergence(const FeatureHistogram& p, const FeatureHistogram& q);

/// Kullback-Leibler divergence KL(p || q) per feature, base 2; relies on
/// featurize's smoothing keeping q strictly positive.
FeatureDivergence kl_divergence(const FeatureHistogram& p, const FeatureHistogram& q);

/// Fifty hand-entered physics formulas (mechanics, optics, fields,
/// statistics staples) over x1..x5, used as the divergence reference.
const std::vector<Expr>& reference_physics_corpus();

} // namespace eicsr
