#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/expr.hpp"

namespace eicsr {

struct EicConfig {
    double sigma_r = 1e-6;          // std of the relative noise injected at operator nodes
    double eic_cap = 16.0;          // ceiling for the reported overall score
    double min_valid_fraction = 0.5; // below this usable-sample fraction a node is capped
    double rel_guard = 1e-300;      // |y| at or below this cannot anchor a relative error
    int repeats = 1;                // independent noise passes, aggregated by per-node median
    std::uint64_t seed = 0;
};

struct EicReport {
    double overall = 0.0; // max over operator-node scores and 0, clamped to [0, eic_cap]

    // Operator-node path -> node score, in preorder. Paths are ""
    // for the root and parent + "/<child-index>" below it. Node scores are
    // unclamped and may be slightly negative; capped nodes report eic_cap.
    std::vector<std::pair<std::string, double>> per_node;

    // Relative-noise variance observed at the root. 0 for leaf-only
    // expressions, NaN when the root node was capped (too few usable samples
    // or a non-finite variance).
    double delta_r2_root = 0.0;

    std::size_t invalid_samples = 0; // excluded (node, sample) pairs, summed over nodes
    bool clipped = false;            // true when the cap bounded `overall`
};

/// Significant digits N carried by a relative-noise variance:
/// N = 1 - 0.5*log10(12*sigma_r2). Throws DomainError unless sigma_r2 > 0.
double n_from_sigma(double sigma_r2);

/// Inverse of n_from_sigma: variance (1/12)*10^(2*(1-n)).
double sigma_from_n(double n);

/// Noisy-evaluation digit-loss score. Leaves evaluate exactly; every
/// operator node applies its operation to the children's (noisy, clean)
/// vectors, then multiplies the noisy value by (1 + eps) with
/// eps ~ Normal(0, sigma_r^2) drawn from a counter-based stream keyed by
/// (seed, node path, row, repeat). A node's score is the digits lost there,
/// n_from_sigma(sigma_r^2) - n_from_sigma(delta_r2), with delta_r2 the
/// population variance of (noisy - clean)/clean over usable samples; the
/// overall score is the max over all nodes and 0, clamped to eic_cap.
///
/// Samples with non-finite values or |clean| <= rel_guard are excluded and
/// counted; a node keeping fewer than min_valid_fraction of the rows (or
/// fewer than 2) is capped outright.
///
/// `root_path` prefixes every node path, which makes a standalone run on a
/// subtree reproduce exactly the noise draws that subtree saw inside the
/// full tree under the same seed.
///
/// OpenMP-parallel over rows; results are bit-identical for any thread
/// count. Throws InsufficientData (< 2 rows) and ArityError.
EicReport calculate_eic(const Expr& e, const Dataset& data, const EicConfig& cfg = {},
                        const std::string& root_path = "");

/// Plain recursive serial implementation kept as the testing reference.
/// Produces a bit-identical EicReport to calculate_eic.
EicReport calculate_eic_ref(const Expr& e, const Dataset& data, const EicConfig& cfg = {},
                            const std::string& root_path = "");

/// Spread (max pairwise absolute difference) of the overall score across
/// several sigma_r choices; small for well-conditioned formulas.
double eic_sigma_invariance(const Expr& e, const Dataset& data,
                            const std::vector<double>& sigmas, const EicConfig& base = {});

/// Resolves a report's node path ("" = root, "/1/0" = left child of the
/// second child, ...) back to the subexpression it names. Throws
/// DomainError on malformed paths or paths leaving the tree.
Expr subtree_at_path(const Expr& e, std::string_view path);

} // namespace eicsr
