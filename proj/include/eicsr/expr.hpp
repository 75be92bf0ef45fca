#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace eicsr {

enum class UnaryOp { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Neg, Inv };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

inline constexpr int kUnaryOpCount = 9;
inline constexpr int kBinaryOpCount = 5;

const char* name(UnaryOp op);
const char* name(BinaryOp op);

enum class NodeKind { Variable, Constant, Unary, Binary };

namespace detail {
struct ExprNode;
}

/// Immutable expression tree with shared subtrees. Copies are O(1); all
/// mutation-style operations build new trees. Node count, depth and a
/// value-sensitive structural hash are cached at construction.
class Expr {
public:
    Expr() = default; // empty handle; only valid() trees may be evaluated

    static Expr variable(int index);
    static Expr constant(double value);
    static Expr unary(UnaryOp op, Expr child);
    static Expr binary(BinaryOp op, Expr left, Expr right);

    bool valid() const { return node_ != nullptr; }

    NodeKind kind() const;
    int var_index() const;
    double value() const;
    UnaryOp unary_op() const;
    BinaryOp binary_op() const;

    int child_count() const;
    const Expr& child(int i) const;

    /// Total node count (operators + variables + constants).
    int node_count() const;
    int depth() const;

    /// Largest variable index used, or -1 for variable-free trees.
    int max_var_index() const;

    std::uint64_t structural_hash() const;
    bool same_structure(const Expr& other) const;

    /// Subtree at preorder position `index` (root = 0).
    Expr subtree(int index) const;

    /// Copy of this tree with the subtree at preorder position `index`
    /// replaced. O(depth) new nodes.
    Expr with_subtree(int index, const Expr& replacement) const;

private:
    std::shared_ptr<const detail::ExprNode> node_;

    explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
};

namespace detail {
struct ExprNode {
    NodeKind kind = NodeKind::Constant;
    int op = 0;        // UnaryOp/BinaryOp as int
    int var_index = 0; // for Variable
    double value = 0;  // for Constant
    Expr kids[2];
    int count = 1;
    int depth = 1;
    int max_var = -1;
    std::uint64_t hash = 0;
};
} // namespace detail

inline NodeKind Expr::kind() const { return node_->kind; }
inline int Expr::var_index() const { return node_->var_index; }
inline double Expr::value() const { return node_->value; }
inline UnaryOp Expr::unary_op() const { return static_cast<UnaryOp>(node_->op); }
inline BinaryOp Expr::binary_op() const { return static_cast<BinaryOp>(node_->op); }
inline int Expr::node_count() const { return node_->count; }
inline int Expr::depth() const { return node_->depth; }
inline int Expr::max_var_index() const { return node_->max_var; }
inline std::uint64_t Expr::structural_hash() const { return node_->hash; }

/// Complexity of a formula: its symbol count.
inline int complexity(const Expr& e) { return e.node_count(); }

/// Flattens the add/sub spine at the root into a term list, folding
/// subtraction signs into the terms via Neg. Non-additive roots yield a
/// single-element list. No distribution or rewriting is performed.
std::vector<Expr> additive_terms(const Expr& e);

} // namespace eicsr
