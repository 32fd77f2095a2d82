#include "support.hpp"

#include "psdocalc/expr.hpp"

#include <numbers>

using namespace psdocalc;

namespace {

double ev(const std::string& s, double xi = 0.0, std::vector<double> f = {}) {
    return SymbolExpr::parse(s).eval(xi, f);
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("precedence and associativity") {
    CHECK(ev("1 + 2 * 3") == 7);
    CHECK(ev("(1 + 2) * 3") == 9);
    CHECK(ev("2 ^ 3 ^ 2") == 512);
    CHECK(ev("-2 ^ 2") == -4);
    CHECK(ev("8 / 4 / 2") == 1);
    CHECK(ev("10 - 4 - 3") == 3);
}

TEST_CASE("variables and functions") {
    CHECK(ev("xi / (1 + xi)", 3.0) == doctest::Approx(0.75));
    CHECK(ev("cos(2*pi*x0) + x1", 0, {0.5, 2.0}) == doctest::Approx(1.0));
    CHECK(ev("max(xi, 2) + min(1, exp(0))", 1.0) == doctest::Approx(3.0));
    CHECK(ev("log(exp(2.5))") == doctest::Approx(2.5));
    CHECK(ev("pi") == doctest::Approx(std::numbers::pi));
    CHECK(ev("1e-3 * 2") == doctest::Approx(2e-3));
}

TEST_CASE("parse errors carry offsets") {
    try {
        SymbolExpr::parse("1 + * 2");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
        CHECK_FALSE(e.expected().empty());
    }
    CHECK_THROWS_AS(SymbolExpr::parse("sin(1, 2)"), ParseError);
    CHECK_THROWS_AS(SymbolExpr::parse("foo(1)"), ParseError);
    CHECK_THROWS_AS(SymbolExpr::parse("(1 + 2"), ParseError);
    CHECK_THROWS_AS(SymbolExpr::parse(""), ParseError);
    CHECK_THROWS_AS(SymbolExpr::parse("1 2"), ParseError);
}

TEST_CASE("to_string round trip") {
    for (const char* s : {"1 + 2 * xi", "-xi ^ 2 / (1 + xi)", "cos(2*pi*x0) * xi/(1+xi) + sin(x1)/4",
                          "max(min(xi, 3), 0.5) - -1"}) {
        auto e = SymbolExpr::parse(s);
        auto r = SymbolExpr::parse(e.to_string());
        CHECK(r.to_string() == e.to_string());
        std::vector<double> f{0.3, 0.7};
        for (double xi : {0.1, 1.0, 7.5}) CHECK(r.eval(xi, f) == e.eval(xi, f));
    }
}

TEST_CASE("depth and feature queries") {
    auto e = SymbolExpr::parse("x2 + xi * 3");
    CHECK(e.depth() == 3);
    CHECK(e.max_feature() == 2);
    CHECK(e.uses_xi());
    auto c = SymbolExpr::parse("4");
    CHECK(c.depth() == 1);
    CHECK_FALSE(c.uses_features());
    CHECK_FALSE(c.uses_xi());
}

}
