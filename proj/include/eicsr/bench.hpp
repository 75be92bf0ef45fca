#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/gp.hpp"
#include "eicsr/mcts.hpp"

namespace eicsr {

/// One benchmark problem: a ground-truth formula sampled on uniform inputs.
struct BenchProblem {
    std::string name;
    std::string formula;
    int num_vars = 1;
    double lo = 1.0, hi = 5.0; // input range, all variables
    bool pathological = false;
};

/// Ten physics-style targets (well-conditioned) and ten pathological ones
/// (cancellations, noise-amplifying compositions).
const std::vector<BenchProblem>& builtin_suite();

/// Copy of `data` with y <- y + Normal(0, (eta * Std[y])^2) per row.
/// eta = 0 or Std[y] = 0 returns the input unchanged. Callers apply this to
/// the training split only; test targets stay clean.
Dataset add_noise(const Dataset& data, double eta, std::uint64_t seed);

/// Seeded uniform row partition with |train| = round(frac * n) (clamped so
/// both sides are nonempty). Row order within each side follows the source.
std::pair<Dataset, Dataset> split(const Dataset& data, double frac, std::uint64_t seed);

struct BenchConfig {
    std::string method = "mcts"; // "gp" or "mcts"
    double noise_eta = 0.0;      // training-target noise level
    double split_frac = 0.75;
    int trials = 10;
    std::size_t rows = 256; // synthetic rows per problem
    double r2_filter = 0.8; // rows below this test R2 are excluded from means
    std::uint64_t seed = 0;
    bool stable_output = false; // write runtime_s = 0 for byte-stable reports
    GpConfig gp{};
    MctsConfig mcts{};
};

/// One (problem, trial) outcome: the archive candidate with the best
/// clean-test R2. A failed trial carries `error` and the -inf R2 sentinel.
struct BenchRow {
    std::string problem;
    int trial = 0;
    std::string method;
    double alpha = 0.0;
    double noise_eta = 0.0;
    double r2 = 0.0;   // clean test split
    double nmse = 0.0; // clean test split
    int complexity = 0;
    double eic = 0.0;
    double runtime_s = 0.0;
    std::string formula; // fitted candidate (JSON only, not in the CSV)
    bool retained = true;
    std::string error;
};

struct ProblemAggregate {
    std::string problem;
    double mean_r2 = 0.0;
    double mean_complexity = 0.0;
    double mean_eic = 0.0;
    double mean_runtime_s = 0.0;
    int retained = 0;
    int excluded = 0;
};

struct GroundTruthEic {
    std::string problem;
    bool pathological = false;
    double eic = 0.0;
};

struct BenchReport {
    std::string method;
    double alpha = 0.0;
    double noise_eta = 0.0;
    double split_frac = 0.75;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<BenchRow> rows;
    std::vector<ProblemAggregate> aggregates;
    std::vector<GroundTruthEic> ground_truth;
};

/// Digit-loss scores of the ground-truth formulas themselves (no search),
/// each on a fresh uniform sample of `rows` inputs.
std::vector<GroundTruthEic> suite_ground_truth_eic(const std::vector<BenchProblem>& problems,
                                                   const EicConfig& ecfg = {},
                                                   std::size_t rows = 256,
                                                   std::uint64_t seed = 0);

/// Full orchestration: per problem x trial, synthesize data, split, add
/// training noise, run the configured search, score the archive on the
/// clean test split. Per-trial failures are recorded, never fatal. Rows are
/// emitted in (problem, trial) order regardless of worker scheduling.
BenchReport run_bench(const std::vector<BenchProblem>& problems, const BenchConfig& cfg);

/// Deterministic serializations. The JSON form round-trips through
/// report_from_json; the CSV has exactly the columns
/// problem, trial, method, alpha, noise_eta, r2, nmse, complexity, eic, runtime_s.
std::string report_json(const BenchReport& report);
std::string report_csv(const BenchReport& report);
BenchReport report_from_json(const std::string& text);

} // namespace eicsr
