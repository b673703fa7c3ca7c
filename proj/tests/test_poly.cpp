#include <doctest.h>

#include <random>

#include "jetcount/poly.hpp"
#include "jetcount/residue.hpp"

using namespace jetcount;

namespace {

IntPoly random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars,
                    unsigned max_deg, unsigned max_terms) {
    IntPoly f(vars);
    std::uniform_int_distribution<int> coeff(-9, 9);
    unsigned nterms = 1 + static_cast<unsigned>(rng() % max_terms);
    for (unsigned t = 0; t < nterms; ++t) {
        IntPoly::Exponents e(vars.size(), 0);
        unsigned budget = rng() % (max_deg + 1);
        for (unsigned d = 0; d < budget; ++d) e[rng() % vars.size()] += 1;
        f.add_term(std::move(e), Int(coeff(rng)));
    }
    return f;
}

// Independent oracle: evaluate f at integer truncated series by direct
// monomial expansion with exact integer convolution.
std::vector<Int> eval_at_series(const IntPoly& f,
                                const std::vector<std::vector<Int>>& series, unsigned k) {
    std::vector<Int> acc(k + 1, 0);
    for (const auto& [e, c] : f.terms()) {
        std::vector<Int> prod(k + 1, 0);
        prod[0] = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (unsigned rep = 0; rep < e[i]; ++rep) {
                std::vector<Int> next(k + 1, 0);
                for (unsigned a = 0; a <= k; ++a)
                    for (unsigned b = 0; a + b <= k; ++b)
                        next[a + b] += prod[a] * series[i][b];
                prod = std::move(next);
            }
        }
        for (unsigned u = 0; u <= k; ++u) acc[u] += prod[u];
    }
    return acc;
}

}  // namespace

TEST_CASE("parse_poly basic forms") {
    auto f = parse_poly("x^2 + y^2 + z^2", {"x", "y", "z"});
    CHECK(f.terms().size() == 3);
    for (const auto& [e, c] : f.terms()) CHECK(c == 1);

    auto g = parse_poly("x*y^2", {"x", "y"});
    REQUIRE(g.terms().size() == 1);
    CHECK(g.terms().begin()->first == IntPoly::Exponents{1, 2});
    CHECK(g.terms().begin()->second == 1);

    auto z = parse_poly("0", {"x"});
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
}

TEST_CASE("parse_poly errors carry position") {
    CHECK_THROWS_AS(parse_poly("x + w", {"x", "y"}), ParseError);
    CHECK_THROWS_AS(parse_poly("x ++ y", {"x", "y"}), ParseError);
    CHECK_THROWS_AS(parse_poly("x^99999999", {"x"}), ParseError);
    try {
        parse_poly("x + w", {"x", "y"});
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("canonical printing matches the jet regression string") {
    auto vars = jet_variables({"x1", "x2"}, 1);
    auto f = parse_poly("x1*x2^2", {"x1", "x2"});
    auto j1 = jet_coefficient(f, 1, 1);
    CHECK(j1.to_string() == "x1(1)*x2^2 + 2*x1*x2*x2(1)");
    CHECK(j1 == parse_poly("x1(1)*x2^2 + 2*x1*x2*x2(1)", vars));
    CHECK(parse_poly("x^2 + y^2 + z^2", {"x", "y", "z"}).to_string() == "x^2 + y^2 + z^2");
}

TEST_CASE("parse/print round trip on random polynomials") {
    std::mt19937_64 rng(20240811);
    std::vector<std::string> vars = {"x", "y", "z"};
    for (int i = 0; i < 200; ++i) {
        IntPoly f = random_poly(rng, vars, 4, 6);
        CHECK(parse_poly(f.to_string(), vars) == f);
    }
}

TEST_CASE("eval_mod examples") {
    auto f = parse_poly("x^2", {"x"});
    CHECK(eval_mod(f, {Int(3)}, Int(9)) == 0);

    auto g = parse_poly("x*y^2", {"x", "y"});
    CHECK(eval_mod(g, {Int(1), Int(2)}, Int(5)) == 4);

    auto h = parse_poly("x^2 + y^2 + z^2", {"x", "y", "z"});
    std::vector<Int> pt = {Int(1), Int(2), Int(2)};
    CHECK(eval_mod(h, pt, Int(3)) == mod_floor(h.evaluate(pt), Int(3)));
    CHECK(eval_mod(h, pt, Int(3)) == 0);
}

TEST_CASE("eval_mod rejects modulus mismatch") {
    auto g = parse_poly("x*y", {"x", "y"});
    std::vector<ResidueElement> pt = {make_residue(Int(1), 5, 1), make_residue(Int(2), 5, 2)};
    CHECK_THROWS_AS(eval_mod(g, pt), ValidationError);
}

TEST_CASE("eval_mod is a ring homomorphism") {
    std::mt19937_64 rng(7);
    std::vector<std::string> vars = {"x", "y"};
    Int m = int_pow(3, 4);
    for (int i = 0; i < 100; ++i) {
        IntPoly f = random_poly(rng, vars, 3, 4);
        IntPoly g = random_poly(rng, vars, 3, 4);
        std::vector<Int> pt = {Int(rng() % 81), Int(rng() % 81)};
        CHECK(eval_mod(f + g, pt, m) == mod_floor(eval_mod(f, pt, m) + eval_mod(g, pt, m), m));
        CHECK(eval_mod(f * g, pt, m) == mod_floor(eval_mod(f, pt, m) * eval_mod(g, pt, m), m));
    }
}

TEST_CASE("jet_coefficient worked example and trivial level") {
    auto f = parse_poly("x1*x2^2", {"x1", "x2"});
    auto coeffs = jet_coefficients(f, 1);
    CHECK(coeffs[0] == f.with_variables(jet_variables({"x1", "x2"}, 1)));
    CHECK(coeffs[1].to_string() == "x1(1)*x2^2 + 2*x1*x2*x2(1)");

    // u = 0 is the level-0 renaming (names unchanged at level 0)
    auto g = parse_poly("x^2 - 3*x + 1", {"x"});
    CHECK(jet_coefficient(g, 0, 2) == g.with_variables(jet_variables({"x"}, 2)));

    // (x + x(1) t + x(2) t^2)^2 has t^2 coefficient x(1)^2 + 2 x x(2)
    auto h = parse_poly("x^2", {"x"});
    auto jvars = jet_variables({"x"}, 2);
    CHECK(jet_coefficient(h, 2, 2) == parse_poly("2*x*x(2) + x(1)^2", jvars));

    CHECK_THROWS_AS(jet_coefficient(h, 3, 2), ValidationError);
}

TEST_CASE("substitution identity against independent series oracle") {
    std::mt19937_64 rng(42);
    std::vector<std::string> vars = {"x", "y", "z"};
    std::uniform_int_distribution<int> val(-9, 9);
    for (int trial = 0; trial < 60; ++trial) {
        IntPoly f = random_poly(rng, vars, 3, 5);
        unsigned k = rng() % 4;
        auto jvars = jet_variables(vars, k);
        // one integer per jet variable; series[i][j] = value of x_i^(j)
        std::vector<Int> assignment(jvars.size());
        for (auto& a : assignment) a = Int(val(rng));
        std::vector<std::vector<Int>> series(vars.size(), std::vector<Int>(k + 1));
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (unsigned j = 0; j <= k; ++j) series[i][j] = assignment[j * vars.size() + i];

        auto coeffs = jet_coefficients(f, k);
        auto oracle = eval_at_series(f, series, k);
        for (unsigned u = 0; u <= k; ++u)
            CHECK(coeffs[u].evaluate(assignment) == oracle[u]);
    }
}

TEST_CASE("product rule at order 1") {
    std::mt19937_64 rng(99);
    std::vector<std::string> vars = {"x", "y"};
    for (int trial = 0; trial < 40; ++trial) {
        IntPoly f = random_poly(rng, vars, 3, 4);
        IntPoly g = random_poly(rng, vars, 3, 4);
        unsigned k = 1 + rng() % 2;
        auto jvars = jet_variables(vars, k);
        IntPoly f0 = f.with_variables(jvars);
        IntPoly g0 = g.with_variables(jvars);
        CHECK(jet_coefficient(f * g, 1, k) ==
              jet_coefficient(f, 1, k) * g0 + f0 * jet_coefficient(g, 1, k));
    }
}

TEST_CASE("first jet coefficient is the chain rule expression") {
    std::mt19937_64 rng(1234);
    std::vector<std::string> vars = {"x", "y", "z"};
    for (int trial = 0; trial < 40; ++trial) {
        IntPoly f = random_poly(rng, vars, 3, 5);
        unsigned k = 1 + rng() % 3;
        auto jvars = jet_variables(vars, k);
        IntPoly expect(jvars);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            IntPoly xi1 = IntPoly::variable(jvars, vars.size() + i);
            expect = expect + f.partial_derivative(i).with_variables(jvars) * xi1;
        }
        CHECK(jet_coefficient(f, 1, k) == expect);
    }
}

TEST_CASE("partial derivatives") {
    CHECK(parse_poly("x^2", {"x"}).partial_derivative("x").to_string() == "2*x");
    CHECK(parse_poly("x*y^2", {"x", "y"}).partial_derivative("y").to_string() == "2*x*y");
    CHECK(parse_poly("7", {"x"}).partial_derivative("x").is_zero());
    CHECK_THROWS_AS(parse_poly("x", {"x"}).partial_derivative("q"), ValidationError);
}
