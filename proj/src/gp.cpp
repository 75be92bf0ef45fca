#include "eicsr/gp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "eicsr/errors.hpp"

namespace eicsr {

namespace {

// Constant law shared with the corpus generator: integers -5..5 half the
// time, else uniform on (-10, 10).
double random_constant(rng::Stream& s) {
    if (s.bernoulli(0.5)) return static_cast<double>(s.range_int(-5, 5));
    return s.uniform(-10.0, 10.0);
}

Expr random_leaf(rng::Stream& s, int num_vars) {
    if (num_vars > 0 && s.bernoulli(0.5))
        return Expr::variable(static_cast<int>(s.below(static_cast<std::uint64_t>(num_vars))));
    return Expr::constant(random_constant(s));
}

std::vector<int> node_indices(const Expr& e, bool (*pred)(const Expr&)) {
    std::vector<int> out;
    for (int i = 0; i < e.node_count(); ++i)
        if (pred(e.subtree(i))) out.push_back(i);
    return out;
}

bool is_operator(const Expr& e) {
    return e.kind() == NodeKind::Unary || e.kind() == NodeKind::Binary;
}

bool is_constant(const Expr& e) { return e.kind() == NodeKind::Constant; }

Expr mutate_subtree(const Expr& e, rng::Stream& s, int num_vars) {
    const int idx = static_cast<int>(s.below(static_cast<std::uint64_t>(e.node_count())));
    Expr repl = random_tree(s, num_vars, 2, false);
    return e.with_subtree(idx, repl);
}

Expr mutate_operator(const Expr& e, rng::Stream& s) {
    std::vector<int> ops = node_indices(e, is_operator);
    if (ops.empty()) return {};
    const int idx = ops[s.below(ops.size())];
    const Expr sub = e.subtree(idx);
    if (sub.kind() == NodeKind::Unary) {
        const int cur = static_cast<int>(sub.unary_op());
        const int next = (cur + 1 + static_cast<int>(s.below(kUnaryOpCount - 1))) % kUnaryOpCount;
        return e.with_subtree(idx, Expr::unary(static_cast<UnaryOp>(next), sub.child(0)));
    }
    const int cur = static_cast<int>(sub.binary_op());
    const int next = (cur + 1 + static_cast<int>(s.below(kBinaryOpCount - 1))) % kBinaryOpCount;
    return e.with_subtree(idx, Expr::binary(static_cast<BinaryOp>(next), sub.child(0), sub.child(1)));
}

Expr mutate_constant(const Expr& e, rng::Stream& s) {
    std::vector<int> consts = node_indices(e, is_constant);
    if (!consts.empty()) {
        const int idx = consts[s.below(consts.size())];
        const double c = e.subtree(idx).value();
        const double scale = 0.1 * std::max(1.0, std::fabs(c));
        return e.with_subtree(idx, Expr::constant(c + scale * s.gauss()));
    }
    // no constants yet: scale a random subtree by a fresh one
    const int idx = static_cast<int>(s.below(static_cast<std::uint64_t>(e.node_count())));
    Expr scaled =
        Expr::binary(BinaryOp::Mul, Expr::constant(random_constant(s)), e.subtree(idx));
    return e.with_subtree(idx, scaled);
}

Expr mutate_delete(const Expr& e, rng::Stream& s) {
    std::vector<int> ops = node_indices(e, is_operator);
    if (ops.empty()) return {};
    const int idx = ops[s.below(ops.size())];
    const Expr sub = e.subtree(idx);
    const Expr& keep = sub.child(static_cast<int>(s.below(
        static_cast<std::uint64_t>(sub.child_count()))));
    return e.with_subtree(idx, keep);
}

void validate(const GpConfig& cfg) {
    if (cfg.population_size < 2) throw DomainError("population_size must be >= 2");
    if (cfg.tournament_size < 1) throw DomainError("tournament_size must be >= 1");
    if (cfg.max_nodes < 3) throw DomainError("max_nodes must be >= 3");
    if (cfg.elitism < 0 || cfg.elitism >= cfg.population_size)
        throw DomainError("elitism must be in [0, population_size)");
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0) ||
        !(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0))
        throw DomainError("operation probabilities must be in [0, 1]");
    if (!(cfg.crossover_prob + cfg.mutation_prob > 0.0))
        throw DomainError("crossover_prob + mutation_prob must be positive");
}

bool better(const Candidate& a, const Candidate& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return a.eic < b.eic;
}

} // namespace

Expr random_tree(rng::Stream& s, int num_vars, int depth, bool full) {
    if (depth <= 1 || (!full && s.bernoulli(0.5))) return random_leaf(s, num_vars);
    if (s.bernoulli(0.6)) {
        const BinaryOp op = static_cast<BinaryOp>(s.below(kBinaryOpCount));
        Expr l = random_tree(s, num_vars, depth - 1, full);
        Expr r = random_tree(s, num_vars, depth - 1, full);
        return Expr::binary(op, std::move(l), std::move(r));
    }
    const UnaryOp op = static_cast<UnaryOp>(s.below(kUnaryOpCount));
    return Expr::unary(op, random_tree(s, num_vars, depth - 1, full));
}

Expr mutate(const Expr& e, rng::Stream& s, int num_vars, int max_nodes) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const int kind0 = static_cast<int>(s.below(4));
        Expr out;
        for (int k = 0; k < 4 && !out.valid(); ++k) {
            switch ((kind0 + k) % 4) {
            case 0: out = mutate_subtree(e, s, num_vars); break;
            case 1: out = mutate_operator(e, s); break;
            case 2: out = mutate_constant(e, s); break;
            case 3: out = mutate_delete(e, s); break;
            }
        }
        if (out.valid() && out.node_count() <= max_nodes) return out;
    }
    return e;
}

std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, rng::Stream& s, int max_nodes) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const int ia = static_cast<int>(s.below(static_cast<std::uint64_t>(a.node_count())));
        const int ib = static_cast<int>(s.below(static_cast<std::uint64_t>(b.node_count())));
        Expr sa = a.subtree(ia);
        Expr sb = b.subtree(ib);
        Expr ca = a.with_subtree(ia, sb);
        Expr cb = b.with_subtree(ib, sa);
        if (ca.node_count() <= max_nodes && cb.node_count() <= max_nodes)
            return {std::move(ca), std::move(cb)};
    }
    return {a, b};
}

std::vector<Candidate> gp_search(const Dataset& data, const GpConfig& cfg) {
    validate(cfg);
    if (cfg.budget.empty()) throw BudgetZero("GP search needs a generation or time budget");
    if (data.rows() < 2) throw InsufficientData("GP search needs at least 2 rows");

    const int nv = static_cast<int>(data.num_features());
    rng::Stream stream(rng::combine(cfg.seed, 0x6779'7365'6172'6368ull));

    std::vector<Expr> pop;
    pop.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) {
        const int depth = 2 + i % 4; // ramped 2..5
        const bool full = (i / 4) % 2 == 0;
        pop.push_back(random_tree(stream, nv, depth, full));
    }

    CandidateCache cache;
    ParetoArchive archive;
    std::vector<Candidate> cands = evaluate_batch(pop, data, cfg.fitness_cfg, cfg.eic_cfg, cache);
    for (const Candidate& c : cands) archive.insert(c);

    auto tournament = [&]() -> const Expr& {
        std::size_t best = stream.below(cands.size());
        for (int t = 1; t < cfg.tournament_size; ++t) {
            const std::size_t i = stream.below(cands.size());
            if (better(cands[i], cands[best])) best = i;
        }
        return cands[best].expr;
    };

    const double p_cross = cfg.crossover_prob / (cfg.crossover_prob + cfg.mutation_prob);
    const auto t0 = std::chrono::steady_clock::now();
    auto exhausted = [&](long long gen) {
        if (cfg.budget.count > 0 && gen >= cfg.budget.count) return true;
        if (cfg.budget.seconds > 0.0) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
            if (el.count() >= cfg.budget.seconds) return true;
        }
        return false;
    };

    for (long long gen = 0; !exhausted(gen); ++gen) {
        std::vector<Expr> next;
        next.reserve(static_cast<std::size_t>(cfg.population_size));

        std::vector<std::size_t> order(cands.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return better(cands[a], cands[b]); });
        for (int e = 0; e < cfg.elitism; ++e) next.push_back(cands[order[static_cast<std::size_t>(e)]].expr);

        while (static_cast<int>(next.size()) < cfg.population_size) {
            if (stream.uniform() < p_cross) {
                const Expr& pa = tournament();
                const Expr& pb = tournament();
                auto [c1, c2] = crossover(pa, pb, stream, cfg.max_nodes);
                next.push_back(std::move(c1));
                if (static_cast<int>(next.size()) < cfg.population_size)
                    next.push_back(std::move(c2));
            } else {
                next.push_back(mutate(tournament(), stream, nv, cfg.max_nodes));
            }
        }

        cands = evaluate_batch(next, data, cfg.fitness_cfg, cfg.eic_cfg, cache);
        for (const Candidate& c : cands) archive.insert(c);
    }
    return archive.members();
}

} // namespace eicsr
