#include "eicsr/mcts.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "eicsr/errors.hpp"
#include "eicsr/gp.hpp"

namespace eicsr {

namespace {

void validate(const MctsConfig& cfg) {
    if (!(cfg.ucb_c >= 0.0)) throw DomainError("ucb_c must be >= 0");
    if (cfg.max_children < 1) throw DomainError("max_children must be >= 1");
    if (cfg.max_nodes < 3) throw DomainError("max_nodes must be >= 3");
}

} // namespace

std::vector<Candidate> mcts_search(const Dataset& data, const MctsConfig& cfg,
                                   MctsTree* tree_out) {
    validate(cfg);
    if (cfg.budget.empty()) throw BudgetZero("MCTS needs an iteration or time budget");
    if (data.rows() < 2) throw InsufficientData("MCTS needs at least 2 rows");

    const int nv = static_cast<int>(data.num_features());
    rng::Stream stream(rng::combine(cfg.seed, 0x6D63'7473'7372'6368ull));

    CandidateCache cache;
    ParetoArchive archive;

    MctsTree local;
    MctsTree& tree = tree_out ? *tree_out : local;
    tree.nodes.clear();

    {
        MctsTree::Node root;
        root.expr = random_tree(stream, nv, 2, false);
        Candidate c = evaluate_candidate(root.expr, data, cfg.fitness_cfg, cfg.eic_cfg);
        cache.store(c);
        archive.insert(c);
        root.reward = c.fitness;
        tree.nodes.push_back(std::move(root));
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto exhausted = [&](long long it) {
        if (cfg.budget.count > 0 && it >= cfg.budget.count) return true;
        if (cfg.budget.seconds > 0.0) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
            if (el.count() >= cfg.budget.seconds) return true;
        }
        return false;
    };

    for (long long it = 0; !exhausted(it); ++it) {
        // selection: follow max-UCB children while the node is saturated
        int cur = 0;
        while (static_cast<int>(tree.nodes[cur].children.size()) >= cfg.max_children) {
            const MctsTree::Node& n = tree.nodes[cur];
            const double log_n = std::log(static_cast<double>(std::max(n.visits, 1)));
            int pick = n.children.front();
            double best = -std::numeric_limits<double>::infinity();
            for (int ci : n.children) {
                const MctsTree::Node& ch = tree.nodes[ci];
                double ucb;
                if (ch.visits == 0) {
                    ucb = std::numeric_limits<double>::infinity();
                } else {
                    ucb = ch.total_reward / ch.visits +
                          cfg.ucb_c * std::sqrt(log_n / ch.visits);
                }
                if (ucb > best) {
                    best = ucb;
                    pick = ci;
                }
            }
            cur = pick;
        }

        // expansion: one mutation, scored immediately (no rollout)
        MctsTree::Node child;
        child.parent = cur;
        child.expr = mutate(tree.nodes[cur].expr, stream, nv, cfg.max_nodes);
        Candidate c;
        if (const Candidate* hit = cache.find(child.expr)) {
            c = *hit;
        } else {
            c = evaluate_candidate(child.expr, data, cfg.fitness_cfg, cfg.eic_cfg);
            cache.store(c);
        }
        archive.insert(c);
        child.reward = c.fitness;

        const int child_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(std::move(child));
        tree.nodes[cur].children.push_back(child_id);

        // backpropagation
        for (int at = child_id; at != -1; at = tree.nodes[at].parent) {
            tree.nodes[at].visits += 1;
            tree.nodes[at].total_reward += tree.nodes[child_id].reward;
        }
    }
    return archive.members();
}

} // namespace eicsr
