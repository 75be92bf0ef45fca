#include "eicsr/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "eicsr/errors.hpp"

namespace eicsr {

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& columns)
        : text_(text), columns_(columns) {}

    Expr run() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    const std::vector<std::string>& columns_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    // expression := term (('+'|'-') term)*
    Expr expression() {
        Expr e = term();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = Expr::binary(BinaryOp::Add, std::move(e), term());
            } else if (c == '-') {
                ++pos_;
                e = Expr::binary(BinaryOp::Sub, std::move(e), term());
            } else {
                return e;
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    Expr term() {
        Expr e = factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                e = Expr::binary(BinaryOp::Mul, std::move(e), factor());
            } else if (c == '/') {
                ++pos_;
                e = Expr::binary(BinaryOp::Div, std::move(e), factor());
            } else {
                return e;
            }
        }
    }

    // factor := '-' factor | power
    Expr factor() {
        if (peek() == '-') {
            ++pos_;
            skip_ws();
            // "-2.5" is a negative literal; "-(...)" and "-x1" are Neg nodes.
            // '^' binds tighter than unary minus, so "-2^2" is -(2^2).
            if (pos_ < text_.size() &&
                (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                Expr num = number();
                if (peek() == '^') {
                    ++pos_;
                    return Expr::unary(UnaryOp::Neg,
                                       Expr::binary(BinaryOp::Pow, std::move(num), factor()));
                }
                return Expr::constant(-num.value());
            }
            return Expr::unary(UnaryOp::Neg, factor());
        }
        return power();
    }

    // power := atom ('^' factor)?   (right-assoc; exponent admits unary minus)
    Expr power() { return maybe_power(atom()); }

    Expr maybe_power(Expr base) {
        if (peek() == '^') {
            ++pos_;
            return Expr::binary(BinaryOp::Pow, std::move(base), factor());
        }
        return base;
    }

    Expr atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError("expected expression", pos_);
    }

    Expr number() {
        skip_ws();
        double v = 0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr == begin) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(ptr - begin);
        return Expr::constant(v);
    }

    Expr identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));
        if (peek() == '(') return call(name, start);
        return resolve(name, start);
    }

    Expr call(const std::string& fn, std::size_t at) {
        ++pos_; // '('
        Expr arg = expression();
        if (!consume(')')) throw SyntaxError("expected ')'", pos_);
        static const struct {
            const char* name;
            UnaryOp op;
        } kFns[] = {
            {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos}, {"tan", UnaryOp::Tan},
            {"exp", UnaryOp::Exp},   {"log", UnaryOp::Log}, {"sqrt", UnaryOp::Sqrt},
            {"abs", UnaryOp::Abs},   {"neg", UnaryOp::Neg}, {"inv", UnaryOp::Inv},
        };
        for (const auto& f : kFns) {
            if (fn == f.name) return Expr::unary(f.op, std::move(arg));
        }
        throw UnknownSymbol(fn, at);
    }

    Expr resolve(const std::string& name, std::size_t at) {
        // Positional x<k> names take precedence over column aliases.
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
                    digits = false;
                    break;
                }
            }
            if (digits && name[1] != '0') {
                int idx = 0;
                std::from_chars(name.data() + 1, name.data() + name.size(), idx);
                return Expr::variable(idx - 1);
            }
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i] == name) return Expr::variable(static_cast<int>(i));
        }
        throw UnknownSymbol(name, at);
    }
};

int precedence(const Expr& e) {
    switch (e.kind()) {
    case NodeKind::Binary:
        switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 10;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 20;
        case BinaryOp::Pow: return 40;
        }
        return 10;
    case NodeKind::Unary:
        return e.unary_op() == UnaryOp::Neg ? 30 : 100;
    case NodeKind::Constant:
        return e.value() < 0 ? 30 : 100; // negative literals print with a leading '-'
    default:
        return 100;
    }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& c, int min_prec, std::string& out) {
    if (precedence(c) < min_prec) {
        out += '(';
        print(c, out);
        out += ')';
    } else {
        print(c, out);
    }
}

std::string format_value(double v) {
    char buf[64];
    // shortest round-trip form
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
    case NodeKind::Variable:
        out += 'x';
        out += std::to_string(e.var_index() + 1);
        return;
    case NodeKind::Constant:
        out += format_value(e.value());
        return;
    case NodeKind::Unary: {
        UnaryOp op = e.unary_op();
        if (op == UnaryOp::Neg) {
            const Expr& c = e.child(0);
            out += '-';
            // Parenthesize non-negative literals so Neg(Const) survives
            // the parser's negative-literal folding.
            bool force = c.kind() == NodeKind::Constant && !(c.value() < 0);
            if (force) {
                out += '(';
                print(c, out);
                out += ')';
            } else {
                print_child(c, 30, out);
            }
            return;
        }
        out += name(op);
        out += '(';
        print(e.child(0), out);
        out += ')';
        return;
    }
    case NodeKind::Binary: {
        BinaryOp op = e.binary_op();
        int p = precedence(e);
        if (op == BinaryOp::Pow) {
            // left operand must sit at atom level; exponent admits neg/pow
            print_child(e.child(0), p + 1, out);
            out += '^';
            print_child(e.child(1), 30, out);
            return;
        }
        print_child(e.child(0), p, out);
        out += ' ';
        out += name(op);
        out += ' ';
        // right operand of left-assoc ops needs parens at equal precedence
        print_child(e.child(1), p + 1, out);
        return;
    }
    }
}

} // namespace

Expr parse(std::string_view text, const std::vector<std::string>& columns) {
    return Parser(text, columns).run();
}

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

} // namespace eicsr
