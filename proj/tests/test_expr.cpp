#include <doctest.h>

#include "templab/expr.hpp"

using namespace templab;

namespace {
Eigen::VectorXd st2(double a, double b) {
    Eigen::VectorXd u(2);
    u << a, b;
    return u;
}
} // namespace

TEST_CASE("expression parser evaluates arithmetic") {
    auto e = parse_expr("u1^2 / (1 + u1 + u2) - 0.5*exp(-u2)", 2);
    Eigen::VectorXd u = st2(0.5, 0.25);
    double expect = 0.25 / 1.75 - 0.5 * std::exp(-0.25);
    CHECK(e->eval(u) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("expression parser handles precedence and unary minus") {
    auto e = parse_expr("-u1 + 2*u2^2", 2);
    CHECK(e->eval(st2(1.0, 3.0)) == doctest::Approx(17.0));
    auto f = parse_expr("2^3^1", 2); // right associative
    CHECK(f->eval(st2(0, 0)) == doctest::Approx(8.0));
}

TEST_CASE("expression parser reports column on malformed input") {
    try {
        parse_expr("1 + (u1 * ", 2, "A[0][0]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("A[0][0]") != std::string::npos);
        CHECK(msg.find("column") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("u3", 2), ParseError);
    CHECK_THROWS_AS(parse_expr("sin(u1)", 2), ParseError);
    CHECK_THROWS_AS(parse_expr("1 + * 2", 2), ParseError);
}
