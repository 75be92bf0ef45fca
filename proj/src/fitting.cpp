#include "eicsr/fitting.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "eicsr/errors.hpp"
#include "eicsr/eval.hpp"

namespace eicsr {

namespace {

void validate(const FitnessConfig& cfg) {
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw DomainError("eta must be in (0, 1)");
    if (!(cfg.alpha >= 0.0)) throw DomainError("alpha must be >= 0");
    if (!(cfg.ridge_lambda >= 0.0)) throw DomainError("ridge_lambda must be >= 0");
}

FittedModel sentinel(std::vector<Expr> terms) {
    FittedModel m;
    m.coefficients.assign(terms.size() + 1, 0.0);
    m.terms = std::move(terms);
    return m; // nmse/r2 defaults are the +-inf sentinels
}

// c * t with sign folded through a Neg term and exact-1 folding.
// Returns an invalid Expr when the piece vanishes (c == 0).
Expr scaled_term(double c, const Expr& t, bool& negative) {
    negative = false;
    Expr inner = t;
    if (inner.kind() == NodeKind::Unary && inner.unary_op() == UnaryOp::Neg) {
        inner = inner.child(0);
        c = -c;
    }
    if (c == 0.0) return {};
    if (c < 0.0) {
        negative = true;
        c = -c;
    }
    if (c == 1.0) return inner;
    return Expr::binary(BinaryOp::Mul, Expr::constant(c), inner);
}

} // namespace

Expr FittedModel::as_expression() const {
    if (degenerate()) return Expr::constant(0.0);
    Expr acc;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        bool neg = false;
        Expr piece = scaled_term(coefficients[i], terms[i], neg);
        if (!piece.valid()) continue;
        if (!acc.valid())
            acc = neg ? Expr::unary(UnaryOp::Neg, piece) : piece;
        else
            acc = Expr::binary(neg ? BinaryOp::Sub : BinaryOp::Add, acc, piece);
    }
    const double b = intercept();
    if (b != 0.0 || !acc.valid()) {
        if (!acc.valid()) return Expr::constant(b);
        if (b < 0.0) return Expr::binary(BinaryOp::Sub, acc, Expr::constant(-b));
        return Expr::binary(BinaryOp::Add, acc, Expr::constant(b));
    }
    return acc;
}

FittedModel fit_linear(const Expr& e, const Dataset& data, const FitnessConfig& cfg) {
    validate(cfg);
    std::vector<Expr> terms = additive_terms(e);
    const std::size_t k = terms.size();
    const std::size_t n = data.rows();

    std::vector<std::vector<double>> cols(k);
    for (std::size_t j = 0; j < k; ++j) cols[j] = evaluate(terms[j], data).values;

    std::vector<std::size_t> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = std::isfinite(data.target[i]);
        for (std::size_t j = 0; ok && j < k; ++j) ok = std::isfinite(cols[j][i]);
        if (ok) rows.push_back(i);
    }
    const std::size_t m = rows.size();
    if (m < k + 1 || 2 * m < n) return sentinel(std::move(terms));

    Eigen::MatrixXd A(m, k + 1);
    Eigen::VectorXd y(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < k; ++j) A(r, j) = cols[j][rows[r]];
        A(r, k) = 1.0; // intercept column
        y(r) = data.target[rows[r]];
    }

    const double ymean = y.mean();
    const double yvar = (y.array() - ymean).square().sum() / static_cast<double>(m);
    if (!(yvar > 0.0) || !std::isfinite(yvar)) return sentinel(std::move(terms));

    Eigen::MatrixXd ata = A.transpose() * A;
    for (std::size_t j = 0; j < k; ++j) ata(j, j) += cfg.ridge_lambda;
    Eigen::VectorXd beta = ata.ldlt().solve(A.transpose() * y);
    if (!beta.allFinite()) return sentinel(std::move(terms));

    const double mse = (A * beta - y).squaredNorm() / static_cast<double>(m);

    FittedModel model;
    model.terms = std::move(terms);
    model.coefficients.assign(beta.data(), beta.data() + k + 1);
    model.nmse = mse / yvar;
    model.r2 = 1.0 - model.nmse;
    if (!std::isfinite(model.nmse)) return sentinel(std::move(model.terms));
    return model;
}

double fitness(int complexity, double nmse, const FitnessConfig& cfg) {
    validate(cfg);
    return std::pow(cfg.eta, static_cast<double>(complexity)) / (1.0 + nmse);
}

double fitness_alpha(int complexity, double nmse, double eic, const FitnessConfig& cfg) {
    return fitness(complexity, nmse, cfg) - cfg.alpha * eic;
}

} // namespace eicsr
