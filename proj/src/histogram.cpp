#include "eicsr/histogram.hpp"

#include <cmath>
#include <set>

#include "eicsr/errors.hpp"
#include "eicsr/parse.hpp"

namespace eicsr {

namespace {

void count_features(const Expr& e, std::set<int>& vars, int& consts, int& ops) {
    switch (e.kind()) {
    case NodeKind::Variable: vars.insert(e.var_index()); return;
    case NodeKind::Constant: ++consts; return;
    case NodeKind::Unary:
    case NodeKind::Binary: ++ops; break;
    }
    for (int i = 0; i < e.child_count(); ++i) count_features(e.child(i), vars, consts, ops);
}

void bump_count(std::vector<double>& bins, int value) {
    const std::size_t idx =
        value <= 20 ? static_cast<std::size_t>(value) : FeatureHistogram::kCountBins - 1;
    bins[idx] += 1.0;
}

void bump_length(std::vector<double>& bins, int value) {
    const std::size_t idx =
        value <= 60 ? static_cast<std::size_t>(value - 1) : FeatureHistogram::kLengthBins - 1;
    bins[idx] += 1.0;
}

void normalize_smooth(std::vector<double>& bins, double epsilon) {
    double total = 0.0;
    for (double b : bins) total += b;
    for (double& b : bins) b = b / total + epsilon;
    total = 0.0;
    for (double b : bins) total += b;
    for (double& b : bins) b /= total;
}

void check_layout(const FeatureHistogram& p, const FeatureHistogram& q) {
    if (p.variables.size() != q.variables.size() || p.constants.size() != q.constants.size() ||
        p.operators.size() != q.operators.size() || p.length.size() != q.length.size())
        throw BinMismatch("histogram bin layouts differ");
}

double kl2(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) d += p[i] * std::log2(p[i] / q[i]);
    return d;
}

double js2(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) d += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) d += 0.5 * q[i] * std::log2(q[i] / m);
    }
    return d;
}

} // namespace

FeatureHistogram featurize(const std::vector<Expr>& corpus, double epsilon) {
    if (corpus.empty()) throw EmptyCorpus("featurize needs a nonempty corpus");
    FeatureHistogram h;
    h.epsilon = epsilon;
    h.variables.assign(FeatureHistogram::kCountBins, 0.0);
    h.constants.assign(FeatureHistogram::kCountBins, 0.0);
    h.operators.assign(FeatureHistogram::kCountBins, 0.0);
    h.length.assign(FeatureHistogram::kLengthBins, 0.0);
    for (const Expr& e : corpus) {
        std::set<int> vars;
        int consts = 0, ops = 0;
        count_features(e, vars, consts, ops);
        bump_count(h.variables, static_cast<int>(vars.size()));
        bump_count(h.constants, consts);
        bump_count(h.operators, ops);
        bump_length(h.length, e.node_count());
    }
    normalize_smooth(h.variables, epsilon);
    normalize_smooth(h.constants, epsilon);
    normalize_smooth(h.operators, epsilon);
    normalize_smooth(h.length, epsilon);
    return h;
}

FeatureDivergence js_divergence(const FeatureHistogram& p, const FeatureHistogram& q) {
    check_layout(p, q);
    return {js2(p.variables, q.variables), js2(p.constants, q.constants),
            js2(p.operators, q.operators), js2(p.length, q.length)};
}

FeatureDivergence kl_divergence(const FeatureHistogram& p, const FeatureHistogram& q) {
    check_layout(p, q);
    return {kl2(p.variables, q.variables), kl2(p.constants, q.constants),
            kl2(p.operators, q.operators), kl2(p.length, q.length)};
}

const std::vector<Expr>& reference_physics_corpus() {
    static const std::vector<Expr> corpus = [] {
        static const char* kFormulas[] = {
            "x1*x2",
            "x1/x2",
            "0.5*x1*x2^2",
            "x1*x2/x3^2",
            "sqrt(x1/x2)",
            "x1*sin(x2)",
            "x1*cos(x2)",
            "x1*exp(-x2)",
            "log(x1/x2)",
            "x1/(x2+x3)",
            "(x1+x2)/2",
            "x1*x2*x3",
            "x1^2/x2",
            "sqrt(x1^2+x2^2)",
            "x1/(4*3.141592653589793*x2^2)",
            "x1*x2/(x3*x4)",
            "exp(-x1^2/2)",
            "x1*(1+x2*cos(x3))",
            "x1/sqrt(1-x2^2)",
            "x1*x2^2/2",
            "3*x1/2",
            "x1*x2*sin(x3)",
            "x1/(2*x2)",
            "x1*x2/(x3^2+x4^2)",
            "(x1-x2)/x3",
            "x1*log(x2/x3)",
            "x1*(x2+x3*x4)",
            "sin(x1)/sin(x2)",
            "x1*x2*x3/x4",
            "1/(1/x1+1/x2)",
            "x1*exp(-x2/x3)",
            "x1^2*x2/2",
            "x1*x2^3",
            "sqrt(2*x1/x2)",
            "x1*tan(x2)",
            "x1/(x2*x3^2)",
            "x1^2*sin(x2)^2",
            "(x1*x2)/(x3*x4*x5)",
            "x1+x2*x3",
            "x1*(1-exp(-x2))",
            "x1*cos(x2)^2",
            "2*3.141592653589793*sqrt(x1/x2)",
            "x1*x2/(2*x3)",
            "x1^3/x2^2",
            "x1*abs(x2)",
            "exp(x1)/x2",
            "x1/(x2+x3*x4)",
            "sqrt(x1*x2)",
            "x1*x2*cos(x3)/x4",
            "(x1+x2+x3)/3",
        };
        std::vector<Expr> out;
        out.reserve(std::size(kFormulas));
        for (const char* f : kFormulas) out.push_back(parse(f));
        return out;
    }();
    return corpus;
}

} // namespace eicsr
