#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "eicsr/dataset.hpp"
#include "eicsr/expr.hpp"

namespace eicsr {

// IEEE semantics throughout: log(-1) and sqrt(-1) are NaN, 1/0 is inf,
// NaN/inf propagate. Callers inspect `nonfinite_count` instead of catching.
inline double apply(UnaryOp op, double a) {
    switch (op) {
    case UnaryOp::Sin: return std::sin(a);
    case UnaryOp::Cos: return std::cos(a);
    case UnaryOp::Tan: return std::tan(a);
    case UnaryOp::Exp: return std::exp(a);
    case UnaryOp::Log: return std::log(a);
    case UnaryOp::Sqrt: return std::sqrt(a);
    case UnaryOp::Abs: return std::fabs(a);
    case UnaryOp::Neg: return -a;
    case UnaryOp::Inv: return 1.0 / a;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double apply(BinaryOp op, double a, double b) {
    switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b;
    case BinaryOp::Pow: return std::pow(a, b);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct EvalResult {
    std::vector<double> values; // one per dataset row
    std::size_t nonfinite_count = 0;
};

// Expression compiled to a postorder instruction list, run as a stack
// machine. Rows are independent, so the batch entry point parallelizes
// over them with one value stack per thread.
class Program {
public:
    explicit Program(const Expr& e);

    int required_vars() const { return required_vars_; }
    std::size_t stack_depth() const { return stack_depth_; }

    // Evaluates one row; `stack` must hold at least `stack_depth()` doubles.
    double run_row(const Dataset& data, std::size_t row, double* stack) const;

    // Evaluates with an explicit feature vector (probe points, no Dataset).
    double run_point(const double* x, double* stack) const;

private:
    enum class Code : std::uint8_t { Var, Const, Un, Bin };
    struct Instr {
        Code code;
        std::uint8_t op;
        std::int32_t var;
        double value;
    };
    std::vector<Instr> instrs_;
    int required_vars_ = 0;
    std::size_t stack_depth_ = 0;
};

// Batch evaluation via the compiled program; OpenMP-parallel over rows.
// Throws `ArityError` when the expression references a feature the dataset
// does not have.
EvalResult evaluate(const Expr& e, const Dataset& data);

// Plain recursive evaluator kept as the serial reference; bit-identical
// to `evaluate` (same operation order per row).
EvalResult evaluate_ref(const Expr& e, const Dataset& data);

// Single-point convenience wrapper around `Program`.
double evaluate_point(const Expr& e, const std::vector<double>& x);

} // namespace eicsr
