#include "eicsr/eval.hpp"

#include <omp.h>

#include <limits>

#include "eicsr/errors.hpp"
#include "eicsr/threads.hpp"

namespace eicsr {

namespace {

std::size_t count_nonfinite(const std::vector<double>& v) {
    std::size_t n = 0;
    for (double x : v)
        if (!std::isfinite(x)) ++n;
    return n;
}

double eval_node(const Expr& e, const Dataset& d, std::size_t row) {
    switch (e.kind()) {
    case NodeKind::Variable: return d.columns[static_cast<std::size_t>(e.var_index())][row];
    case NodeKind::Constant: return e.value();
    case NodeKind::Unary: return apply(e.unary_op(), eval_node(e.child(0), d, row));
    case NodeKind::Binary: {
        double a = eval_node(e.child(0), d, row);
        double b = eval_node(e.child(1), d, row);
        return apply(e.binary_op(), a, b);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

Program::Program(const Expr& e) {
    instrs_.reserve(e.node_count());
    // iterative postorder: (node, child-cursor)
    struct Frame {
        const Expr* node;
        int next_child;
    };
    std::vector<Frame> stack;
    stack.push_back({&e, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const Expr& n = *f.node;
        if (f.next_child < n.child_count()) {
            const Expr& c = n.child(f.next_child++);
            stack.push_back({&c, 0});
            continue;
        }
        Instr ins{};
        switch (n.kind()) {
        case NodeKind::Variable:
            ins.code = Code::Var;
            ins.var = n.var_index();
            required_vars_ = std::max(required_vars_, n.var_index() + 1);
            break;
        case NodeKind::Constant:
            ins.code = Code::Const;
            ins.value = n.value();
            break;
        case NodeKind::Unary:
            ins.code = Code::Un;
            ins.op = static_cast<std::uint8_t>(n.unary_op());
            break;
        case NodeKind::Binary:
            ins.code = Code::Bin;
            ins.op = static_cast<std::uint8_t>(n.binary_op());
            break;
        }
        instrs_.push_back(ins);
        stack.pop_back();
    }
    // simulate to size the value stack
    std::size_t depth = 0, peak = 0;
    for (const Instr& ins : instrs_) {
        switch (ins.code) {
        case Code::Var:
        case Code::Const: ++depth; break;
        case Code::Un: break;
        case Code::Bin: --depth; break;
        }
        peak = std::max(peak, depth);
    }
    stack_depth_ = peak;
}

double Program::run_row(const Dataset& data, std::size_t row, double* stack) const {
    std::size_t top = 0;
    for (const Instr& ins : instrs_) {
        switch (ins.code) {
        case Code::Var:
            stack[top++] = data.columns[static_cast<std::size_t>(ins.var)][row];
            break;
        case Code::Const: stack[top++] = ins.value; break;
        case Code::Un:
            stack[top - 1] = apply(static_cast<UnaryOp>(ins.op), stack[top - 1]);
            break;
        case Code::Bin:
            stack[top - 2] =
                apply(static_cast<BinaryOp>(ins.op), stack[top - 2], stack[top - 1]);
            --top;
            break;
        }
    }
    return stack[0];
}

double Program::run_point(const double* x, double* stack) const {
    std::size_t top = 0;
    for (const Instr& ins : instrs_) {
        switch (ins.code) {
        case Code::Var: stack[top++] = x[ins.var]; break;
        case Code::Const: stack[top++] = ins.value; break;
        case Code::Un:
            stack[top - 1] = apply(static_cast<UnaryOp>(ins.op), stack[top - 1]);
            break;
        case Code::Bin:
            stack[top - 2] =
                apply(static_cast<BinaryOp>(ins.op), stack[top - 2], stack[top - 1]);
            --top;
            break;
        }
    }
    return stack[0];
}

EvalResult evaluate(const Expr& e, const Dataset& data) {
    Program prog(e);
    if (prog.required_vars() > static_cast<int>(data.num_features()))
        throw ArityError("expression references x" + std::to_string(prog.required_vars()) +
                         " but dataset has " + std::to_string(data.num_features()) +
                         " feature(s)");
    EvalResult out;
    const std::size_t n = data.rows();
    out.values.resize(n);
    const std::size_t depth = std::max<std::size_t>(prog.stack_depth(), 1);
    const int threads = worker_threads();
#pragma omp parallel num_threads(threads)
    {
        std::vector<double> stack(depth);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            out.values[static_cast<std::size_t>(i)] =
                prog.run_row(data, static_cast<std::size_t>(i), stack.data());
    }
    out.nonfinite_count = count_nonfinite(out.values);
    return out;
}

EvalResult evaluate_ref(const Expr& e, const Dataset& data) {
    if (e.max_var_index() + 1 > static_cast<int>(data.num_features()))
        throw ArityError("expression references x" + std::to_string(e.max_var_index() + 1) +
                         " but dataset has " + std::to_string(data.num_features()) +
                         " feature(s)");
    EvalResult out;
    out.values.resize(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out.values[i] = eval_node(e, data, i);
    out.nonfinite_count = count_nonfinite(out.values);
    return out;
}

double evaluate_point(const Expr& e, const std::vector<double>& x) {
    Program prog(e);
    if (prog.required_vars() > static_cast<int>(x.size()))
        throw ArityError("expression references x" + std::to_string(prog.required_vars()) +
                         " but point has " + std::to_string(x.size()) + " coordinate(s)");
    std::vector<double> stack(std::max<std::size_t>(prog.stack_depth(), 1));
    return prog.run_point(x.data(), stack.data());
}

} // namespace eicsr
