#pragma once

#include <limits>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/expr.hpp"

namespace eicsr {

struct FitnessConfig {
    double eta = 0.999;         // complexity discount base, 0 < eta < 1
    double alpha = 0.01;        // digit-loss penalty weight
    double ridge_lambda = 1e-8; // regularizer on term coefficients (not the intercept)
};

/// Result of the additive-term linear fit. `coefficients` has one entry per
/// term plus the intercept last; prediction = intercept + sum c_i * term_i(X).
/// A degenerate fit (too few finite rows, or Var(y) = 0) keeps the terms,
/// zeroes the coefficients and reports the nmse = +inf sentinel so the
/// search layer can discard the candidate without aborting.
struct FittedModel {
    std::vector<Expr> terms;
    std::vector<double> coefficients;
    double nmse = std::numeric_limits<double>::infinity();
    double r2 = -std::numeric_limits<double>::infinity();

    double intercept() const { return coefficients.back(); }
    bool degenerate() const { return !(nmse < std::numeric_limits<double>::infinity()); }

    /// Expression with the fitted coefficients substituted. Exact 0/1/-1
    /// coefficients fold away (a zero coefficient drops its term); a
    /// degenerate model collapses to the constant 0.
    Expr as_expression() const;
};

/// Splits `e` into additive terms, then least-squares fits y on those terms
/// plus an intercept. Rows where any term evaluates non-finite are dropped;
/// ridge_lambda stabilizes collinear term sets. nmse = MSE / Var(y) over the
/// retained rows, r2 = 1 - nmse.
FittedModel fit_linear(const Expr& e, const Dataset& data, const FitnessConfig& cfg = {});

/// eta^C / (1 + NMSE), in (0, 1]; an nmse of +inf gives exactly 0.
double fitness(int complexity, double nmse, const FitnessConfig& cfg = {});

/// fitness(complexity, nmse) - alpha * eic; may be negative.
double fitness_alpha(int complexity, double nmse, double eic, const FitnessConfig& cfg = {});

} // namespace eicsr
