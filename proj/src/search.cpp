#include "eicsr/search.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "eicsr/threads.hpp"

namespace eicsr {

Candidate evaluate_candidate(const Expr& e, const Dataset& data, const FitnessConfig& fcfg,
                             const EicConfig& ecfg) {
    Candidate c;
    c.expr = e;
    c.model = fit_linear(e, data, fcfg);
    if (c.model.degenerate()) {
        c.fitted = c.model.as_expression();
        c.complexity = complexity(e);
        c.eic = 0.0;
        c.fitness = 0.0;
        return c;
    }
    c.fitted = c.model.as_expression();
    c.complexity = complexity(c.fitted);
    c.eic = calculate_eic(c.fitted, data, ecfg).overall;
    c.fitness = fitness_alpha(c.complexity, c.model.nmse, c.eic, fcfg);
    return c;
}

void ParetoArchive::insert(const Candidate& c) {
    if (!std::isfinite(c.model.nmse)) return;
    for (const Candidate& m : members_) {
        const bool no_worse =
            m.complexity <= c.complexity && m.model.nmse <= c.model.nmse;
        if (no_worse) return; // dominated, or an exact tie (first-seen wins)
    }
    members_.erase(std::remove_if(members_.begin(), members_.end(),
                                  [&](const Candidate& m) {
                                      return c.complexity <= m.complexity &&
                                             c.model.nmse <= m.model.nmse;
                                  }),
                   members_.end());
    auto pos = std::lower_bound(members_.begin(), members_.end(), c,
                                [](const Candidate& a, const Candidate& b) {
                                    if (a.complexity != b.complexity)
                                        return a.complexity < b.complexity;
                                    return a.model.nmse < b.model.nmse;
                                });
    members_.insert(pos, c);
}

const Candidate* CandidateCache::find(const Expr& e) const {
    auto it = map_.find(e.structural_hash());
    if (it == map_.end()) return nullptr;
    for (const Candidate& c : it->second)
        if (c.expr.same_structure(e)) return &c;
    return nullptr;
}

void CandidateCache::store(Candidate c) {
    auto& bucket = map_[c.expr.structural_hash()];
    for (const Candidate& existing : bucket)
        if (existing.expr.same_structure(c.expr)) return;
    bucket.push_back(std::move(c));
    ++total_;
}

std::vector<Candidate> evaluate_batch(const std::vector<Expr>& exprs, const Dataset& data,
                                      const FitnessConfig& fcfg, const EicConfig& ecfg,
                                      CandidateCache& cache) {
    // dedupe against the cache and within the batch
    std::vector<std::size_t> todo;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (std::size_t i = 0; i < exprs.size(); ++i) {
        if (cache.find(exprs[i])) continue;
        auto [it, fresh] = seen.emplace(exprs[i].structural_hash(), i);
        if (fresh || !exprs[it->second].same_structure(exprs[i])) todo.push_back(i);
    }

    std::vector<Candidate> fresh(todo.size());
    const int threads = worker_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(todo.size()); ++t) {
        const std::size_t i = todo[static_cast<std::size_t>(t)];
        fresh[static_cast<std::size_t>(t)] = evaluate_candidate(exprs[i], data, fcfg, ecfg);
    }
    for (Candidate& c : fresh) cache.store(std::move(c));

    std::vector<Candidate> out;
    out.reserve(exprs.size());
    for (const Expr& e : exprs) out.push_back(*cache.find(e));
    return out;
}

} // namespace eicsr
