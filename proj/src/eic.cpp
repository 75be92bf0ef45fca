#include "eicsr/eic.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "eicsr/errors.hpp"
#include "eicsr/eval.hpp"
#include "eicsr/rng.hpp"
#include "eicsr/threads.hpp"

namespace eicsr {

double n_from_sigma(double sigma_r2) {
    if (!(sigma_r2 > 0.0))
        throw DomainError("n_from_sigma requires a positive relative-noise variance");
    return 1.0 - 0.5 * std::log10(12.0 * sigma_r2);
}

double sigma_from_n(double n) { return (1.0 / 12.0) * std::pow(10.0, 2.0 * (1.0 - n)); }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const EicConfig& cfg) {
    if (!(cfg.sigma_r > 0.0)) throw DomainError("sigma_r must be positive");
    if (!(cfg.eic_cap > 0.0)) throw DomainError("eic_cap must be positive");
    if (!(cfg.min_valid_fraction > 0.0 && cfg.min_valid_fraction <= 1.0))
        throw DomainError("min_valid_fraction must be in (0, 1]");
    if (cfg.repeats < 1) throw DomainError("repeats must be >= 1");
}

// --- noise stream keying (shared by both kernels; the whole determinism
// story rests on draws depending only on (seed, node path, row, repeat)) ---

std::uint64_t path_key(std::uint64_t seed, const std::string& path) {
    return rng::combine(seed, rng::hash_bytes(path));
}

double noise_eps(std::uint64_t node_key, std::size_t row, int repeat, double sigma_r) {
    std::uint64_t k = rng::combine(
        node_key, rng::combine(static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(repeat)));
    return sigma_r * rng::normal(k);
}

// --- per-node moments -------------------------------------------------------

struct NodeStats {
    double d2 = kNaN;        // population Var[(noisy-clean)/clean]; NaN when capped
    std::size_t invalid = 0; // excluded samples at this node
    bool capped = false;
};

NodeStats node_stats(const double* noisy, const double* clean, std::size_t n,
                     const EicConfig& cfg, std::vector<double>& scratch) {
    NodeStats st;
    scratch.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(noisy[i]) || !std::isfinite(clean[i]) ||
            std::fabs(clean[i]) <= cfg.rel_guard) {
            ++st.invalid;
            continue;
        }
        double r = (noisy[i] - clean[i]) / clean[i];
        if (!std::isfinite(r)) {
            ++st.invalid;
            continue;
        }
        scratch.push_back(r);
    }
    const std::size_t valid = scratch.size();
    if (valid < 2 ||
        static_cast<double>(valid) < cfg.min_valid_fraction * static_cast<double>(n)) {
        st.capped = true;
        return st;
    }
    double sum = 0.0;
    for (double r : scratch) sum += r;
    const double mean = sum / static_cast<double>(valid);
    double ss = 0.0;
    for (double r : scratch) ss += (r - mean) * (r - mean);
    const double d2 = ss / static_cast<double>(valid);
    if (!std::isfinite(d2)) {
        st.capped = true;
        return st;
    }
    st.d2 = d2;
    return st;
}

double node_score(const NodeStats& st, double sigma2, const EicConfig& cfg) {
    if (st.capped) return cfg.eic_cap;
    if (st.d2 <= 0.0) return -cfg.eic_cap; // no measurable amplification at all
    return n_from_sigma(sigma2) - n_from_sigma(st.d2);
}

// --- one full noisy pass, flattened + row-parallel --------------------------

struct FlatNode {
    NodeKind kind;
    std::uint8_t op = 0;
    std::int32_t var = 0;
    double value = 0.0;
    std::int32_t stat = -1; // preorder operator index, -1 for leaves
    std::uint64_t key = 0;  // path_key, operators only
};

struct FlatTree {
    std::vector<FlatNode> postorder;
    std::vector<std::string> stat_paths; // preorder
    std::size_t pair_depth = 0;

    void build(const Expr& e, const std::string& path, std::uint64_t seed) {
        FlatNode fn;
        fn.kind = e.kind();
        switch (e.kind()) {
        case NodeKind::Variable: fn.var = e.var_index(); break;
        case NodeKind::Constant: fn.value = e.value(); break;
        case NodeKind::Unary:
        case NodeKind::Binary:
            fn.op = static_cast<std::uint8_t>(
                e.kind() == NodeKind::Unary ? static_cast<int>(e.unary_op())
                                            : static_cast<int>(e.binary_op()));
            fn.stat = static_cast<std::int32_t>(stat_paths.size());
            fn.key = path_key(seed, path);
            stat_paths.push_back(path);
            break;
        }
        for (int i = 0; i < e.child_count(); ++i)
            build(e.child(i), path + "/" + std::to_string(i), seed);
        postorder.push_back(fn);
    }

    void finish() {
        std::size_t depth = 0, peak = 0;
        for (const FlatNode& fn : postorder) {
            if (fn.kind == NodeKind::Binary) --depth;
            else if (fn.kind != NodeKind::Unary) ++depth;
            peak = std::max(peak, depth);
        }
        pair_depth = std::max<std::size_t>(peak, 1);
    }
};

struct PassResult {
    std::vector<double> scores; // preorder, one per operator node
    std::vector<double> d2s;    // preorder; NaN when capped
    std::size_t invalid = 0;
};

PassResult parallel_pass(const FlatTree& tree, const Dataset& data, const EicConfig& cfg,
                         int repeat) {
    const std::size_t n = data.rows();
    const std::size_t ops = tree.stat_paths.size();
    PassResult out;
    if (ops == 0) return out;

    std::vector<double> noisy_mat(ops * n), clean_mat(ops * n);
    const int threads = worker_threads();
#pragma omp parallel num_threads(threads)
    {
        std::vector<double> sn(tree.pair_depth), sc(tree.pair_depth);
#pragma omp for schedule(static)
        for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(n); ++ri) {
            const std::size_t row = static_cast<std::size_t>(ri);
            std::size_t top = 0;
            for (const FlatNode& fn : tree.postorder) {
                switch (fn.kind) {
                case NodeKind::Variable: {
                    double v = data.columns[static_cast<std::size_t>(fn.var)][row];
                    sn[top] = v;
                    sc[top] = v;
                    ++top;
                    break;
                }
                case NodeKind::Constant:
                    sn[top] = fn.value;
                    sc[top] = fn.value;
                    ++top;
                    break;
                case NodeKind::Unary: {
                    UnaryOp op = static_cast<UnaryOp>(fn.op);
                    double clean = apply(op, sc[top - 1]);
                    double pre = apply(op, sn[top - 1]);
                    double noisy = pre * (1.0 + noise_eps(fn.key, row, repeat, cfg.sigma_r));
                    sn[top - 1] = noisy;
                    sc[top - 1] = clean;
                    const std::size_t at = static_cast<std::size_t>(fn.stat) * n + row;
                    noisy_mat[at] = noisy;
                    clean_mat[at] = clean;
                    break;
                }
                case NodeKind::Binary: {
                    BinaryOp op = static_cast<BinaryOp>(fn.op);
                    double clean = apply(op, sc[top - 2], sc[top - 1]);
                    double pre = apply(op, sn[top - 2], sn[top - 1]);
                    double noisy = pre * (1.0 + noise_eps(fn.key, row, repeat, cfg.sigma_r));
                    --top;
                    sn[top - 1] = noisy;
                    sc[top - 1] = clean;
                    const std::size_t at = static_cast<std::size_t>(fn.stat) * n + row;
                    noisy_mat[at] = noisy;
                    clean_mat[at] = clean;
                    break;
                }
                }
            }
        }
    }

    const double sigma2 = cfg.sigma_r * cfg.sigma_r;
    out.scores.resize(ops);
    out.d2s.resize(ops);
    std::vector<double> scratch;
    scratch.reserve(n);
    for (std::size_t s = 0; s < ops; ++s) {
        NodeStats st = node_stats(&noisy_mat[s * n], &clean_mat[s * n], n, cfg, scratch);
        out.invalid += st.invalid;
        out.scores[s] = node_score(st, sigma2, cfg);
        out.d2s[s] = st.d2;
    }
    return out;
}

// --- serial recursive reference --------------------------------------------

class RefEngine {
public:
    RefEngine(const Dataset& data, const EicConfig& cfg, int repeat)
        : data_(data), cfg_(cfg), repeat_(repeat), sigma2_(cfg.sigma_r * cfg.sigma_r) {
        scratch_.reserve(data.rows());
    }

    PassResult run(const Expr& e, const std::string& root_path,
                   std::vector<std::string>* paths_out) {
        paths_out_ = paths_out;
        eval(e, root_path);
        return std::move(out_);
    }

private:
    struct Vecs {
        std::vector<double> noisy, clean;
    };

    Vecs eval(const Expr& e, const std::string& path) {
        const std::size_t n = data_.rows();
        Vecs v;
        switch (e.kind()) {
        case NodeKind::Variable:
            v.clean = data_.columns[static_cast<std::size_t>(e.var_index())];
            v.noisy = v.clean; // leaves carry no noise
            return v;
        case NodeKind::Constant:
            v.clean.assign(n, e.value());
            v.noisy = v.clean;
            return v;
        case NodeKind::Unary:
        case NodeKind::Binary: break;
        }

        // reserve the slot before recursing so entries come out in preorder
        const std::size_t slot = out_.scores.size();
        out_.scores.push_back(0.0);
        out_.d2s.push_back(kNaN);
        if (paths_out_) paths_out_->push_back(path);

        v.clean.resize(n);
        v.noisy.resize(n);
        if (e.kind() == NodeKind::Unary) {
            Vecs c = eval(e.child(0), path + "/0");
            UnaryOp op = e.unary_op();
            for (std::size_t i = 0; i < n; ++i) {
                v.clean[i] = apply(op, c.clean[i]);
                v.noisy[i] = apply(op, c.noisy[i]);
            }
        } else {
            Vecs l = eval(e.child(0), path + "/0");
            Vecs r = eval(e.child(1), path + "/1");
            BinaryOp op = e.binary_op();
            for (std::size_t i = 0; i < n; ++i) {
                v.clean[i] = apply(op, l.clean[i], r.clean[i]);
                v.noisy[i] = apply(op, l.noisy[i], r.noisy[i]);
            }
        }
        const std::uint64_t key = path_key(cfg_.seed, path);
        for (std::size_t i = 0; i < n; ++i)
            v.noisy[i] *= 1.0 + noise_eps(key, i, repeat_, cfg_.sigma_r);

        NodeStats st = node_stats(v.noisy.data(), v.clean.data(), n, cfg_, scratch_);
        out_.invalid += st.invalid;
        out_.scores[slot] = node_score(st, sigma2_, cfg_);
        out_.d2s[slot] = st.d2;
        return v;
    }

    const Dataset& data_;
    const EicConfig& cfg_;
    int repeat_;
    double sigma2_;
    PassResult out_;
    std::vector<double> scratch_;
    std::vector<std::string>* paths_out_ = nullptr;
};

// --- aggregation shared by both entry points --------------------------------

double median_inplace(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

EicReport assemble(std::vector<std::string>&& stat_paths, std::vector<PassResult>&& passes,
                   const EicConfig& cfg) {
    EicReport rpt;
    const std::size_t ops = stat_paths.size();
    std::vector<double> buf;
    rpt.per_node.reserve(ops);
    for (std::size_t s = 0; s < ops; ++s) {
        buf.clear();
        for (const PassResult& p : passes) buf.push_back(p.scores[s]);
        rpt.per_node.emplace_back(std::move(stat_paths[s]), median_inplace(buf));
    }
    for (const PassResult& p : passes) rpt.invalid_samples = std::max(rpt.invalid_samples, p.invalid);

    if (ops == 0) {
        rpt.delta_r2_root = 0.0;
    } else {
        buf.clear();
        bool finite = true;
        for (const PassResult& p : passes) {
            buf.push_back(p.d2s[0]);
            finite = finite && std::isfinite(p.d2s[0]);
        }
        rpt.delta_r2_root = finite ? median_inplace(buf) : kNaN;
    }

    double pre = 0.0;
    for (const auto& [path, score] : rpt.per_node) pre = std::max(pre, score);
    rpt.clipped = pre >= cfg.eic_cap;
    rpt.overall = std::min(pre, cfg.eic_cap);
    return rpt;
}

void check_inputs(const Expr& e, const Dataset& data, const EicConfig& cfg) {
    validate(cfg);
    if (data.rows() < 2) throw InsufficientData("EIC needs at least 2 data rows");
    if (e.max_var_index() + 1 > static_cast<int>(data.num_features()))
        throw ArityError("expression references x" + std::to_string(e.max_var_index() + 1) +
                         " but dataset has " + std::to_string(data.num_features()) +
                         " feature(s)");
}

} // namespace

EicReport calculate_eic(const Expr& e, const Dataset& data, const EicConfig& cfg,
                        const std::string& root_path) {
    check_inputs(e, data, cfg);
    FlatTree tree;
    tree.build(e, root_path, cfg.seed);
    tree.finish();
    std::vector<PassResult> passes;
    passes.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) passes.push_back(parallel_pass(tree, data, cfg, r));
    return assemble(std::move(tree.stat_paths), std::move(passes), cfg);
}

EicReport calculate_eic_ref(const Expr& e, const Dataset& data, const EicConfig& cfg,
                            const std::string& root_path) {
    check_inputs(e, data, cfg);
    std::vector<std::string> stat_paths;
    std::vector<PassResult> passes;
    passes.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) {
        RefEngine engine(data, cfg, r);
        passes.push_back(engine.run(e, root_path, r == 0 ? &stat_paths : nullptr));
    }
    return assemble(std::move(stat_paths), std::move(passes), cfg);
}

Expr subtree_at_path(const Expr& e, std::string_view path) {
    Expr cur = e;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] != '/') throw DomainError("malformed node path");
        std::size_t j = ++i;
        while (j < path.size() && path[j] != '/') ++j;
        int idx = -1;
        auto [p, ec] = std::from_chars(path.data() + i, path.data() + j, idx);
        if (ec != std::errc{} || p != path.data() + j)
            throw DomainError("malformed node path");
        if (idx < 0 || idx >= cur.child_count())
            throw DomainError("node path leaves the tree");
        cur = cur.child(idx);
        i = j;
    }
    return cur;
}

double eic_sigma_invariance(const Expr& e, const Dataset& data,
                            const std::vector<double>& sigmas, const EicConfig& base) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double s : sigmas) {
        EicConfig cfg = base;
        cfg.sigma_r = s;
        EicReport r = calculate_eic(e, data, cfg);
        lo = std::min(lo, r.overall);
        hi = std::max(hi, r.overall);
    }
    return sigmas.empty() ? 0.0 : hi - lo;
}

} // namespace eicsr
