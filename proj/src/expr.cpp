#include "eicsr/expr.hpp"

#include <bit>
#include <cassert>

#include "eicsr/rng.hpp"

namespace eicsr {

const char* name(UnaryOp op) {
    switch (op) {
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Tan: return "tan";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Inv: return "inv";
    }
    return "?";
}

const char* name(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    }
    return "?";
}

namespace {

std::uint64_t leaf_hash(NodeKind kind, std::uint64_t payload) {
    return rng::combine(static_cast<std::uint64_t>(kind) + 0x51ED270B7A64E3C5ull, payload);
}

} // namespace

Expr Expr::variable(int index) {
    assert(index >= 0);
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = NodeKind::Variable;
    n->var_index = index;
    n->max_var = index;
    n->hash = leaf_hash(NodeKind::Variable, static_cast<std::uint64_t>(index));
    return Expr(std::move(n));
}

Expr Expr::constant(double value) {
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = NodeKind::Constant;
    n->value = value;
    n->hash = leaf_hash(NodeKind::Constant, std::bit_cast<std::uint64_t>(value));
    return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
    assert(child.valid());
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = NodeKind::Unary;
    n->op = static_cast<int>(op);
    n->count = 1 + child.node_count();
    n->depth = 1 + child.depth();
    n->max_var = child.max_var_index();
    n->hash = rng::combine(leaf_hash(NodeKind::Unary, static_cast<std::uint64_t>(op)),
                           child.structural_hash());
    n->kids[0] = std::move(child);
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right) {
    assert(left.valid() && right.valid());
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = NodeKind::Binary;
    n->op = static_cast<int>(op);
    n->count = 1 + left.node_count() + right.node_count();
    n->depth = 1 + std::max(left.depth(), right.depth());
    n->max_var = std::max(left.max_var_index(), right.max_var_index());
    n->hash = rng::combine(
        rng::combine(leaf_hash(NodeKind::Binary, static_cast<std::uint64_t>(op)),
                     left.structural_hash()),
        right.structural_hash());
    n->kids[0] = std::move(left);
    n->kids[1] = std::move(right);
    return Expr(std::move(n));
}

int Expr::child_count() const {
    switch (node_->kind) {
    case NodeKind::Unary: return 1;
    case NodeKind::Binary: return 2;
    default: return 0;
    }
}

const Expr& Expr::child(int i) const {
    assert(i >= 0 && i < child_count());
    return node_->kids[i];
}

bool Expr::same_structure(const Expr& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    if (node_->hash != other.node_->hash) return false;
    if (node_->kind != other.node_->kind) return false;
    switch (node_->kind) {
    case NodeKind::Variable: return node_->var_index == other.node_->var_index;
    case NodeKind::Constant:
        return std::bit_cast<std::uint64_t>(node_->value) ==
               std::bit_cast<std::uint64_t>(other.node_->value);
    case NodeKind::Unary:
        return node_->op == other.node_->op && node_->kids[0].same_structure(other.node_->kids[0]);
    case NodeKind::Binary:
        return node_->op == other.node_->op &&
               node_->kids[0].same_structure(other.node_->kids[0]) &&
               node_->kids[1].same_structure(other.node_->kids[1]);
    }
    return false;
}

namespace {

// Preorder walk: returns the subtree at *index (counting down), or an
// invalid handle once found/exhausted.
const Expr* find_preorder(const Expr& e, int& index) {
    if (index == 0) return &e;
    --index;
    for (int i = 0; i < e.child_count(); ++i) {
        if (const Expr* hit = find_preorder(e.child(i), index)) return hit;
    }
    return nullptr;
}

Expr rebuild(const Expr& e, int& index, const Expr& replacement) {
    if (index == 0) {
        --index;
        return replacement;
    }
    --index;
    if (e.child_count() == 0) return e;
    if (e.kind() == NodeKind::Unary) {
        Expr c = rebuild(e.child(0), index, replacement);
        return Expr::unary(e.unary_op(), std::move(c));
    }
    // Binary: only descend right if the target was not on the left.
    Expr l = e.child(0);
    if (index >= 0 && index < l.node_count()) {
        return Expr::binary(e.binary_op(), rebuild(l, index, replacement), e.child(1));
    }
    index -= l.node_count();
    return Expr::binary(e.binary_op(), std::move(l), rebuild(e.child(1), index, replacement));
}

} // namespace

Expr Expr::subtree(int index) const {
    assert(index >= 0 && index < node_count());
    int i = index;
    const Expr* hit = find_preorder(*this, i);
    assert(hit);
    return *hit;
}

Expr Expr::with_subtree(int index, const Expr& replacement) const {
    assert(index >= 0 && index < node_count());
    int i = index;
    return rebuild(*this, i, replacement);
}

namespace {

void collect_terms(const Expr& e, bool negate, std::vector<Expr>& out) {
    if (e.kind() == NodeKind::Binary) {
        BinaryOp op = e.binary_op();
        if (op == BinaryOp::Add) {
            collect_terms(e.child(0), negate, out);
            collect_terms(e.child(1), negate, out);
            return;
        }
        if (op == BinaryOp::Sub) {
            collect_terms(e.child(0), negate, out);
            collect_terms(e.child(1), !negate, out);
            return;
        }
    }
    out.push_back(negate ? Expr::unary(UnaryOp::Neg, e) : e);
}

} // namespace

std::vector<Expr> additive_terms(const Expr& e) {
    std::vector<Expr> out;
    collect_terms(e, false, out);
    return out;
}

} // namespace eicsr
