#pragma once

#include "eicsr/search.hpp"

namespace eicsr {

struct MctsConfig {
    double ucb_c = 1.4142135623730951; // sqrt(2)
    int max_children = 16;
    int max_nodes = 50;
    SearchBudget budget; // iterations and/or seconds
    std::uint64_t seed = 0;
    FitnessConfig fitness_cfg{}; // alpha 0.01 for MCTS
    EicConfig eic_cfg{};
};

/// Search-tree snapshot for diagnostics and invariant checks. Node 0 is the
/// root; every other node holds visits = sum of child visits + 1 (its own
/// creation) and total_reward = sum of child totals + its own reward.
struct MctsTree {
    struct Node {
        Expr expr;
        double reward = 0.0; // immediate reward of this node's candidate
        int parent = -1;
        int visits = 0;
        double total_reward = 0.0;
        std::vector<int> children;
    };
    std::vector<Node> nodes;
};

/// UCB tree search: descend through fully expanded nodes by
/// mean + ucb_c * sqrt(ln(parent visits) / child visits), expand the first
/// node with spare child capacity by one mutation, score the new candidate
/// (reward = alpha-penalized fitness, no rollout) and backpropagate to the
/// root. The root is a seeded random depth-2 expression. Returns the
/// non-dominated archive over (complexity, nmse); deterministic under a
/// fixed seed. Throws BudgetZero on an empty budget.
std::vector<Candidate> mcts_search(const Dataset& data, const MctsConfig& cfg,
                                   MctsTree* tree_out = nullptr);

} // namespace eicsr
