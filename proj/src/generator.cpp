#include "eicsr/generator.hpp"

#include <omp.h>

#include <string>

#include "eicsr/errors.hpp"
#include "eicsr/threads.hpp"

namespace eicsr {

namespace {

void validate(const GeneratorConfig& cfg) {
    if (cfg.num_vars < 1) throw DomainError("generator needs num_vars >= 1");
    if (cfg.max_binary_ops < 0 || cfg.max_unary_ops < 0)
        throw DomainError("operator budgets must be >= 0");
    auto check = [](const std::vector<double>& w, std::size_t want, const char* which) {
        if (w.empty()) return;
        if (w.size() != want) throw DomainError(std::string(which) + " weight count mismatch");
        for (double x : w)
            if (!(x > 0.0)) throw DomainError(std::string(which) + " weights must be positive");
    };
    check(cfg.unary_weights, kUnaryOpCount, "unary");
    check(cfg.binary_weights, kBinaryOpCount, "binary");
}

int weighted_pick(const std::vector<double>& w, int n, rng::Stream& s) {
    if (w.empty()) return static_cast<int>(s.below(static_cast<std::uint64_t>(n)));
    double total = 0.0;
    for (double x : w) total += x;
    double u = s.uniform() * total;
    for (int i = 0; i < n; ++i) {
        u -= w[static_cast<std::size_t>(i)];
        if (u < 0.0) return i;
    }
    return n - 1;
}

double random_constant(rng::Stream& s) {
    if (s.bernoulli(0.5)) return static_cast<double>(s.range_int(-5, 5));
    return s.uniform(-10.0, 10.0);
}

std::vector<int> leaf_indices(const Expr& e) {
    std::vector<int> out;
    for (int i = 0; i < e.node_count(); ++i) {
        const Expr sub = e.subtree(i);
        if (sub.kind() == NodeKind::Variable || sub.kind() == NodeKind::Constant)
            out.push_back(i);
    }
    return out;
}

} // namespace

Dataset make_probe_data(const FilterConfig& fcfg, int num_vars) {
    return uniform_dataset(fcfg.probe_rows, num_vars, fcfg.probe_lo, fcfg.probe_hi,
                           fcfg.probe_seed);
}

Expr generate(const GeneratorConfig& cfg, rng::Stream& s) {
    validate(cfg);
    const int b = static_cast<int>(s.range_int(0, cfg.max_binary_ops));
    const int u = static_cast<int>(s.range_int(0, cfg.max_unary_ops));

    // binary skeleton: split a random leaf slot b times
    Expr shape = Expr::constant(0.0); // placeholder leaf
    for (int k = 0; k < b; ++k) {
        std::vector<int> leaves = leaf_indices(shape);
        const int at = leaves[s.below(leaves.size())];
        const BinaryOp op =
            static_cast<BinaryOp>(weighted_pick(cfg.binary_weights, kBinaryOpCount, s));
        shape = shape.with_subtree(
            at, Expr::binary(op, Expr::constant(0.0), Expr::constant(0.0)));
    }
    // unary wrappers at random positions
    for (int k = 0; k < u; ++k) {
        const int at = static_cast<int>(s.below(static_cast<std::uint64_t>(shape.node_count())));
        const UnaryOp op =
            static_cast<UnaryOp>(weighted_pick(cfg.unary_weights, kUnaryOpCount, s));
        shape = shape.with_subtree(at, Expr::unary(op, shape.subtree(at)));
    }
    // fill leaves, preorder
    for (int at : leaf_indices(shape)) {
        Expr leaf;
        if (s.bernoulli(0.5))
            leaf = Expr::variable(static_cast<int>(s.below(static_cast<std::uint64_t>(cfg.num_vars))));
        else
            leaf = Expr::constant(random_constant(s));
        shape = shape.with_subtree(at, leaf);
    }
    return shape;
}

FilteredSample generate_filtered(const GeneratorConfig& gcfg, const FilterConfig& fcfg,
                                 rng::Stream& s) {
    if (!(fcfg.theta > 0.0)) throw DomainError("filter theta must be positive");
    if (fcfg.max_retries < 1) throw DomainError("filter max_retries must be >= 1");
    const Dataset probe = make_probe_data(fcfg, gcfg.num_vars);
    for (int attempt = 1; attempt <= fcfg.max_retries; ++attempt) {
        Expr e = generate(gcfg, s);
        const double eic = calculate_eic(e, probe, fcfg.eic_cfg).overall;
        if (eic <= fcfg.theta) return {std::move(e), eic, attempt};
    }
    throw FilterExhausted("no sample passed theta = " + std::to_string(fcfg.theta) + " in " +
                          std::to_string(fcfg.max_retries) + " attempts");
}

std::vector<FilteredSample> generate_corpus(const GeneratorConfig& gcfg,
                                            const FilterConfig& fcfg, int count,
                                            bool filtered) {
    if (count < 0) throw DomainError("corpus count must be >= 0");
    const Dataset probe = make_probe_data(fcfg, gcfg.num_vars);
    std::vector<FilteredSample> out(static_cast<std::size_t>(count));
    bool exhausted = false;
    const int threads = worker_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        rng::Stream s(rng::combine(gcfg.seed, static_cast<std::uint64_t>(i)));
        FilteredSample sample;
        if (filtered) {
            bool ok = false;
            for (int attempt = 1; attempt <= fcfg.max_retries && !ok; ++attempt) {
                Expr e = generate(gcfg, s);
                const double eic = calculate_eic(e, probe, fcfg.eic_cfg).overall;
                if (eic <= fcfg.theta) {
                    sample = {std::move(e), eic, attempt};
                    ok = true;
                }
            }
            if (!ok) {
#pragma omp atomic write
                exhausted = true;
            }
        } else {
            sample.expr = generate(gcfg, s);
            sample.eic = calculate_eic(sample.expr, probe, fcfg.eic_cfg).overall;
            sample.attempts = 1;
        }
        out[static_cast<std::size_t>(i)] = std::move(sample);
    }
    if (exhausted)
        throw FilterExhausted("corpus build hit max_retries; theta too strict");
    return out;
}

} // namespace eicsr
