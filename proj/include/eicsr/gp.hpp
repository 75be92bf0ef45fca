#pragma once

#include "eicsr/rng.hpp"
#include "eicsr/search.hpp"

namespace eicsr {

struct GpConfig {
    int population_size = 256;
    int tournament_size = 4;
    double crossover_prob = 0.7; // else mutation
    double mutation_prob = 0.3;
    int max_nodes = 50;
    int elitism = 1;
    SearchBudget budget;
    std::uint64_t seed = 0;
    FitnessConfig fitness_cfg{0.999, 0.002, 1e-8}; // alpha 0.002 for GP
    EicConfig eic_cfg{};
};

/// Random tree of at most `depth` levels. `full` forces operators down to
/// the last level (the "full" half of ramped half-and-half).
Expr random_tree(rng::Stream& s, int num_vars, int depth, bool full);

/// One of: replace a subtree with a fresh depth<=2 tree, change an operator
/// kind-preservingly, perturb or insert a constant, delete an internal node
/// by splicing up a child. Inapplicable kinds fall through to the next;
/// results over max_nodes are retried up to 8 times, then the input is
/// returned unchanged.
Expr mutate(const Expr& e, rng::Stream& s, int num_vars, int max_nodes);

/// Swaps uniformly chosen subtrees. Oversized offspring are retried up to
/// 8 times; on failure the parents come back unchanged.
std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, rng::Stream& s, int max_nodes);

/// Generational GP with tournament selection and elitism, returning the
/// non-dominated archive over (complexity, nmse) of everything evaluated.
/// Deterministic under a fixed seed. Throws BudgetZero on an empty budget.
std::vector<Candidate> gp_search(const Dataset& data, const GpConfig& cfg);

} // namespace eicsr
