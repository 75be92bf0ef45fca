#pragma once

#include <cstdint>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/eic.hpp"
#include "eicsr/expr.hpp"
#include "eicsr/rng.hpp"

namespace eicsr {

struct GeneratorConfig {
    int max_binary_ops = 8; // b ~ U{0..max_binary_ops}
    int max_unary_ops = 4;  // u ~ U{0..max_unary_ops}
    int num_vars = 1;
    // per-op sampling weights; empty means uniform
    std::vector<double> unary_weights;
    std::vector<double> binary_weights;
    std::uint64_t seed = 0;
};

struct FilterConfig {
    double theta = 2.0; // digit-loss acceptance threshold
    int max_retries = 1000;
    std::size_t probe_rows = 256; // probe inputs ~ U(probe_lo, probe_hi) per variable
    double probe_lo = 1.0;
    double probe_hi = 5.0;
    std::uint64_t probe_seed = 0x70726F6265ull;
    EicConfig eic_cfg{};
};

/// The probe inputs a corpus build scores candidates against. One fixed
/// dataset per build keeps scores comparable across samples.
Dataset make_probe_data(const FilterConfig& fcfg, int num_vars);

/// Random unary-binary tree: draws b and u uniformly, grows the binary
/// skeleton by splitting random leaf slots, inserts u unary wrappers at
/// random positions, then fills leaves with variables (p = 0.5, uniform
/// over num_vars) or constants (integer -5..5 half the time, else
/// U(-10, 10)). Node count <= 2b + u + 1.
Expr generate(const GeneratorConfig& cfg, rng::Stream& s);

struct FilteredSample {
    Expr expr;
    double eic = 0.0;
    int attempts = 1;
};

/// Rejection loop: generate until the digit-loss score on the probe data is
/// <= theta. Throws FilterExhausted after max_retries rejections.
FilteredSample generate_filtered(const GeneratorConfig& gcfg, const FilterConfig& fcfg,
                                 rng::Stream& s);

/// Corpus build, parallel over entries. Entry i draws from an independent
/// stream keyed by (gcfg.seed, i), so results are identical for any thread
/// count, and an unfiltered build matches a filtered one with a vacuous
/// threshold sample-for-sample. Unfiltered entries still carry their probe
/// score for reporting.
std::vector<FilteredSample> generate_corpus(const GeneratorConfig& gcfg,
                                            const FilterConfig& fcfg, int count,
                                            bool filtered);

} // namespace eicsr
