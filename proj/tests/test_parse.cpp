#include "doctest.h"

#include "eicsr/errors.hpp"
#include "eicsr/eval.hpp"
#include "eicsr/gp.hpp"
#include "eicsr/parse.hpp"
#include "eicsr/rng.hpp"

using namespace eicsr;

TEST_CASE("basic grammar") {
    Expr e = parse("sin(x1) + 2.5*x2");
    REQUIRE(e.kind() == NodeKind::Binary);
    CHECK(e.binary_op() == BinaryOp::Add);
    CHECK(e.child(0).unary_op() == UnaryOp::Sin);
    CHECK(e.child(0).child(0).var_index() == 0);
    CHECK(e.child(1).binary_op() == BinaryOp::Mul);
    CHECK(e.child(1).child(0).value() == 2.5);
    CHECK(e.child(1).child(1).var_index() == 1);

    Expr f = parse("(x1 + 1e100) - 1e100");
    REQUIRE(f.kind() == NodeKind::Binary);
    CHECK(f.binary_op() == BinaryOp::Sub);
    CHECK(f.child(0).binary_op() == BinaryOp::Add);
    CHECK(f.child(0).child(1).value() == 1e100);
    CHECK(f.child(1).value() == 1e100);
}

TEST_CASE("syntax errors carry byte offsets") {
    CHECK_THROWS_AS(parse("sin("), SyntaxError);
    try {
        parse("sin(");
    } catch (const SyntaxError& ex) {
        CHECK(ex.offset == 4);
    }
    CHECK_THROWS_AS(parse("x1 +"), SyntaxError);
    CHECK_THROWS_AS(parse("x1 x2"), SyntaxError);
    CHECK_THROWS_AS(parse(""), SyntaxError);
    CHECK_THROWS_AS(parse("(x1"), SyntaxError);
    CHECK_THROWS_AS(parse("foo(x1)"), UnknownSymbol);
    CHECK_THROWS_AS(parse("y"), UnknownSymbol);
}

TEST_CASE("named columns resolve, positional names win") {
    std::vector<std::string> cols = {"mass", "velocity"};
    Expr e = parse("0.5*mass*velocity^2", cols);
    CHECK(evaluate_point(e, {2.0, 3.0}) == doctest::Approx(9.0));
    // x2 is positional even when a column is literally named x2
    Expr f = parse("x2", {"x2", "other"});
    CHECK(f.var_index() == 1);
    CHECK_THROWS_AS(parse("mass"), UnknownSymbol);
}

TEST_CASE("precedence and associativity") {
    CHECK(evaluate_point(parse("2+3*4"), {}) == 14.0);
    CHECK(evaluate_point(parse("2*3^2"), {}) == 18.0);
    CHECK(evaluate_point(parse("2^3^2"), {}) == 512.0);   // right-assoc
    CHECK(evaluate_point(parse("8/4/2"), {}) == 1.0);     // left-assoc
    CHECK(evaluate_point(parse("2-3-4"), {}) == -5.0);    // left-assoc
    CHECK(evaluate_point(parse("-2^2"), {}) == -4.0);     // ^ over unary minus
    CHECK(evaluate_point(parse("-x1^2"), {3.0}) == -9.0);
    CHECK(evaluate_point(parse("(-2)^2"), {}) == 4.0);
    CHECK(evaluate_point(parse("2^-1"), {}) == 0.5);
}

TEST_CASE("unary minus folds literals into constants") {
    Expr e = parse("-3.5");
    CHECK(e.kind() == NodeKind::Constant);
    CHECK(e.value() == -3.5);
    Expr f = parse("-x1");
    CHECK(f.kind() == NodeKind::Unary);
    CHECK(f.unary_op() == UnaryOp::Neg);
    // folded and explicit negation both round-trip
    CHECK(parse(to_string(e)).same_structure(e));
    Expr g = Expr::unary(UnaryOp::Neg, Expr::constant(3.5));
    CHECK(parse(to_string(g)).same_structure(g));
}

TEST_CASE("printing round trips") {
    const char* cases[] = {
        "x1",
        "-x1",
        "x1 + x2",
        "x1 - (x2 - x3)",
        "x1 - (x2 + x3)",
        "x1 / (x2 * x3)",
        "(x1 + x2) * x3",
        "2^3^2",
        "-2^2",
        "(-2)^2",
        "x1^-2",
        "1 / x1",
        "inv(x1)",
        "abs(x1)",
        "neg(x1)",
        "-(3)",
        "-3.5 * x1",
        "sin(cos(tan(x1)))",
        "sqrt(exp(log(x1)))",
        "1e-30",
        "0.5 * x1 * x2^2",
        "x1 * -x2",
        "x1 - -3",
        "2 - 3 - 4",
        "x1^(x2 + 1)",
        "(x1^x2)^x3",
    };
    for (const char* s : cases) {
        CAPTURE(s);
        Expr e = parse(s);
        Expr back = parse(to_string(e));
        CHECK(back.same_structure(e));
    }
}

TEST_CASE("random trees round trip") {
    rng::Stream s(0xF00Dull);
    for (int i = 0; i < 300; ++i) {
        Expr e = random_tree(s, 4, 2 + i % 4, i % 2 == 0);
        CAPTURE(to_string(e));
        CHECK(parse(to_string(e)).same_structure(e));
    }
}

TEST_CASE("printed constants survive exactly") {
    for (double v : {0.1, 1.0 / 3.0, 6.283185307179586, 1e-300, 123456.789, -9.81}) {
        Expr e = Expr::constant(v);
        CHECK(parse(to_string(e)).value() == v);
    }
}
