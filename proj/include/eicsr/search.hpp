#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/eic.hpp"
#include "eicsr/expr.hpp"
#include "eicsr/fitting.hpp"

namespace eicsr {

/// Search budget: a fixed iteration/generation count, a wall-clock limit in
/// seconds, or both (whichever is hit first). Both zero = no budget, which
/// the searches reject with BudgetZero.
struct SearchBudget {
    long long count = 0;
    double seconds = 0.0;

    bool empty() const { return count <= 0 && !(seconds > 0.0); }
};

/// A fully scored formula. `fitted` is the expression with the fitted
/// coefficients substituted; `complexity` and `eic` are computed on it, and
/// `fitness` is the alpha-penalized fitness the search optimizes.
struct Candidate {
    Expr expr;   // as produced by the search operators
    Expr fitted; // coefficients substituted (constant 0 when degenerate)
    FittedModel model;
    double eic = 0.0;
    double fitness = 0.0;
    int complexity = 0;
};

/// Fits, scores and packages one expression. Degenerate fits get
/// fitness 0 and eic 0 and keep the raw expression's complexity.
Candidate evaluate_candidate(const Expr& e, const Dataset& data, const FitnessConfig& fcfg,
                             const EicConfig& ecfg);

/// Non-dominated set over (complexity, nmse), both minimized. Candidates
/// with non-finite nmse are ignored; on exact ties the first-seen member is
/// kept. Members stay sorted by complexity, then nmse.
class ParetoArchive {
public:
    void insert(const Candidate& c);
    const std::vector<Candidate>& members() const { return members_; }

private:
    std::vector<Candidate> members_;
};

/// Evaluated-candidate cache keyed by structural hash (verified by full
/// structural comparison). Avoids re-running the digit-loss metric on
/// recurring structures.
class CandidateCache {
public:
    const Candidate* find(const Expr& e) const;
    void store(Candidate c);
    std::size_t size() const { return total_; }

private:
    std::unordered_map<std::uint64_t, std::vector<Candidate>> map_;
    std::size_t total_ = 0;
};

/// Evaluates a batch of expressions with caching; uncached unique
/// structures run in parallel, results apply in index order so the outcome
/// is independent of thread count.
std::vector<Candidate> evaluate_batch(const std::vector<Expr>& exprs, const Dataset& data,
                                      const FitnessConfig& fcfg, const EicConfig& ecfg,
                                      CandidateCache& cache);

} // namespace eicsr
