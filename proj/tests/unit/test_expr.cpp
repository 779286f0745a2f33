#include <doctest.h>

#include "fsmforge/expr.hpp"

using namespace fsmforge;
using namespace fsmforge::ir;

TEST_CASE("natural width") {
    CHECK(natural_width(0) == 1);
    CHECK(natural_width(1) == 1);
    CHECK(natural_width(2) == 2);
    CHECK(natural_width(3) == 2);
    CHECK(natural_width(255) == 8);
    CHECK(natural_width(256) == 9);
    CHECK(natural_width(~std::uint64_t{0}) == 64);
}

TEST_CASE("eval basics") {
    WidthMap widths{{"go", 1}, {"a", 1}, {"cnt", 4}};
    Env env{{"go", 1}, {"a", 1}, {"cnt", 5}};

    // eq(ref go, const 1) with env {go:1} -> 1
    auto eq = Expr::binary(BinOp::Eq, Expr::ref("go"), Expr::constant(1, 1));
    CHECK(eval_expr(eq, env, widths) == 1);

    // add(const 3 w2, const 2 w2) in width-2 context -> 1 (modulo 4)
    auto add = Expr::binary(BinOp::Add, Expr::constant(3, 2), Expr::constant(2, 2));
    CHECK(eval_expr(add, env, widths, 2) == 1);

    // and(eq(a,1), lt(cnt,3)) with {a:1, cnt:5} -> 0
    auto guard = Expr::binary(
        BinOp::And, Expr::binary(BinOp::Eq, Expr::ref("a"), Expr::constant(1, 1)),
        Expr::binary(BinOp::Lt, Expr::ref("cnt"), Expr::constant(3, 2)));
    CHECK(eval_expr(guard, env, widths) == 0);
}

TEST_CASE("eval is pure") {
    WidthMap widths{{"x", 3}};
    Env env{{"x", 5}};
    auto e = Expr::binary(BinOp::Add, Expr::ref("x"), Expr::constant(3, 2));
    auto first = eval_expr(e, env, widths, 3);
    for (int i = 0; i < 10; ++i) CHECK(eval_expr(e, env, widths, 3) == first);
}

TEST_CASE("context widening matches hardware sizing") {
    WidthMap widths{{"r", 4}, {"b", 1}};
    Env env{{"r", 1}, {"b", 0}};

    // (r + 15) == 0 sizes the addition at the comparison width (4), so it
    // wraps: 1 + 15 = 0 mod 16.
    auto wrap = Expr::binary(
        BinOp::Eq,
        Expr::binary(BinOp::Add, Expr::ref("r"), Expr::constant(15, 4)),
        Expr::constant(0, 1));
    CHECK(eval_expr(wrap, env, widths) == 1);

    // ~b inside a 3-bit comparison is complemented at width 3.
    auto bnot = Expr::binary(BinOp::Eq, Expr::unary(UnOp::BitNot, Expr::ref("b")),
                             Expr::constant(7, 3));
    CHECK(eval_expr(bnot, env, widths) == 1);

    // !r is logical: self-determined operand, 1-bit result.
    auto lnot = Expr::unary(UnOp::LogicNot, Expr::ref("r"));
    CHECK(eval_expr(lnot, env, widths) == 0);
    CHECK(eval_expr(lnot, Env{{"r", 0}}, widths) == 1);
}

TEST_CASE("subtraction wraps modulo the operation width") {
    WidthMap widths{{"x", 3}};
    Env env{{"x", 2}};
    auto e = Expr::binary(BinOp::Sub, Expr::ref("x"), Expr::constant(5, 3));
    CHECK(eval_expr(e, env, widths) == 5);  // 2 - 5 mod 8
}

TEST_CASE("unbound reference throws") {
    WidthMap widths;
    Env env;
    auto e = Expr::ref("ghost");
    CHECK_THROWS_AS(eval_expr(e, env, widths), ContractError);
    CHECK_THROWS_AS(self_width(e, widths), ContractError);
}

TEST_CASE("parse and print round trip") {
    const char* cases[] = {
        "go == 1",
        "a && b || c",
        "!(a && b)",
        "~x ^ y",
        "x + 1 < 7",
        "a - (b - c)",
        "x != 0 && (y <= 3 || z >= 2)",
        "a == (b != c)",
    };
    for (const char* text : cases) {
        CAPTURE(text);
        auto first = parse_expr(text);
        REQUIRE(first.ok());
        std::string canonical = to_string(*first);
        auto second = parse_expr(canonical);
        REQUIRE(second.ok());
        CHECK(equal(*first, *second));
        CHECK(to_string(*second) == canonical);
    }
}

TEST_CASE("parser accepts bitwise aliases") {
    auto a = parse_expr("a & b | c");
    auto b = parse_expr("a && b || c");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(equal(*a, *b));
}

TEST_CASE("parser rejects malformed input") {
    for (const char* text : {"", "1 +", "(a", "a @ b", "==", "a b"}) {
        CAPTURE(text);
        auto r = parse_expr(text);
        CHECK_FALSE(r.ok());
        REQUIRE_FALSE(r.diagnostics.empty());
        CHECK(r.diagnostics[0].code == "E_EXPR");
    }
}

TEST_CASE("hex literals") {
    auto r = parse_expr("x == 0xff");
    REQUIRE(r.ok());
    CHECK((*r)->rhs()->value() == 255);
    CHECK((*r)->rhs()->width() == 8);
}
