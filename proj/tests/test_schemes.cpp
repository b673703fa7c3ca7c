#include <doctest.h>

#include <set>

#include "jetcount/residue.hpp"
#include "jetcount/scheme.hpp"

using namespace jetcount;

namespace {

AffineScheme line() { return affine_space("A1", {"x"}); }

PolyMorphism squaring(unsigned m = 2) {
    IntPoly comp({"x"});
    comp.add_term({m}, Int(1));
    return make_morphism(line(), affine_space("A1y", {"y"}), {comp});
}

PolyMorphism product_map() {
    auto src = affine_space("A2", {"x", "y"});
    return make_morphism(src, affine_space("A1z", {"z"}), {parse_poly("x*y", src.vars)});
}

PolyMorphism sum_of_squares(unsigned n) {
    std::vector<std::string> vars;
    std::string text;
    for (unsigned i = 0; i < n; ++i) {
        vars.push_back(std::string(1, "xyzw"[i]));
        text += (i ? " + " : "") + vars.back() + "^2";
    }
    auto src = affine_space("A" + std::to_string(n), vars);
    return make_morphism(src, affine_space("A1t", {"t"}), {parse_poly(text, vars)});
}

}  // namespace

TEST_CASE("jet_prolong worked example") {
    auto x = make_scheme("X", {"x1", "x2"}, {parse_poly("x1*x2^2", {"x1", "x2"})}, 1);
    auto jet = jet_prolong(x, 1);
    REQUIRE(jet.scheme.vars.size() == 4);
    REQUIRE(jet.scheme.equations.size() == 2);
    CHECK(jet.scheme.equations[0].to_string() == "x1*x2^2");
    CHECK(jet.scheme.equations[1].to_string() == "x1(1)*x2^2 + 2*x1*x2*x2(1)");
    CHECK(jet.scheme.declared_dim == 2);
}

TEST_CASE("jets of affine space stay affine") {
    auto jet = jet_prolong(line(), 2);
    CHECK(jet.scheme.vars == std::vector<std::string>{"x", "x(1)", "x(2)"});
    CHECK(jet.scheme.equations.empty());
    CHECK(jet.scheme.declared_dim == 3);
}

TEST_CASE("jet_prolong of V(x^2)") {
    auto x = make_scheme("X", {"x"}, {parse_poly("x^2", {"x"})}, 0, true);
    auto jet = jet_prolong(x, 1);
    REQUIRE(jet.scheme.equations.size() == 2);
    CHECK(jet.scheme.equations[0] == parse_poly("x^2", jet.scheme.vars));
    CHECK(jet.scheme.equations[1] == parse_poly("2*x*x(1)", jet.scheme.vars));
    CHECK(jet.scheme.complete_intersection);
}

TEST_CASE("J_0 is the identity prolongation") {
    auto x = make_scheme("X", {"x", "y"}, {parse_poly("x^2 - y", {"x", "y"})}, 1);
    auto jet = jet_prolong(x, 0);
    CHECK(jet.scheme.vars == x.vars);
    CHECK(jet.scheme.equations[0] == x.equations[0]);
    CHECK(jet.scheme.declared_dim == x.declared_dim);
}

TEST_CASE("jet_morphism components ordered by level then coordinate") {
    auto phi = squaring();
    auto jet = jet_morphism(phi, 1);
    REQUIRE(jet.morphism);
    const auto& comps = jet.morphism->components;
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == parse_poly("x^2", jet.scheme.vars));
    CHECK(comps[1] == parse_poly("2*x*x(1)", jet.scheme.vars));
    CHECK(jet.morphism->relative_dim() == 0);

    auto prod = product_map();
    auto jp = jet_morphism(prod, 1);
    CHECK(jp.morphism->components[0] == parse_poly("x*y", jp.scheme.vars));
    CHECK(jp.morphism->components[1] == parse_poly("x(1)*y + x*y(1)", jp.scheme.vars));
    CHECK(jp.morphism->relative_dim() == 2);

    auto j0 = jet_morphism(prod, 0);
    CHECK(j0.morphism->components.size() == 1);
    CHECK(j0.morphism->components[0] == prod.components[0]);
}

TEST_CASE("truncation compatibility: lower jets are prefixes") {
    auto x = make_scheme("X", {"x", "y"},
                         {parse_poly("x^2 + y^3", {"x", "y"}), parse_poly("x*y", {"x", "y"})},
                         0);
    auto big = jet_prolong(x, 3);
    for (unsigned k2 = 0; k2 < 3; ++k2) {
        auto small = jet_prolong(x, k2);
        REQUIRE(big.scheme.equations.size() >= small.scheme.equations.size());
        for (std::size_t i = 0; i < small.scheme.equations.size(); ++i)
            CHECK(big.scheme.equations[i].to_string() ==
                  small.scheme.equations[i].to_string());
    }
}

TEST_CASE("is_singular_point on x -> x^2") {
    auto phi = squaring();
    CHECK(is_singular_point(phi, {0}, 5));
    CHECK_FALSE(is_singular_point(phi, {3}, 5));
}

TEST_CASE("is_singular_point on the 3-variable quadric") {
    auto phi = sum_of_squares(3);
    // gradient (2,4,4) mod 3 is nonzero; brute-force check of all 1x3 minors
    FpPoint pt = {1, 2, 2};
    std::vector<Int> grad;
    bool any_nonzero = false;
    for (std::size_t i = 0; i < 3; ++i) {
        Int gi = eval_mod(phi.components[0].partial_derivative(i),
                          std::vector<Int>(pt.begin(), pt.end()), Int(3));
        if (gi != 0) any_nonzero = true;
    }
    CHECK(any_nonzero);
    CHECK_FALSE(is_singular_point(phi, pt, 3));
    CHECK(is_singular_point(phi, {0, 0, 0}, 3));
}

TEST_CASE("is_singular_point validates inputs") {
    auto phi = squaring();
    PolyMorphism no_ci = phi;
    no_ci.source.complete_intersection = false;
    CHECK_THROWS_AS(is_singular_point(no_ci, {0}, 5), ValidationError);

    auto x = make_scheme("X", {"x"}, {parse_poly("x^2", {"x"})}, 0, true);
    auto incl = make_morphism(x, affine_space("A1y", {"y"}),
                              {parse_poly("x", x.vars)});
    CHECK_THROWS_AS(is_singular_point(incl, {1}, 5), ValidationError);  // not on V(x^2)
}

TEST_CASE("singular_reduction_set examples") {
    CHECK(singular_reduction_set(squaring(), 3) == std::vector<FpPoint>{{0}});

    auto ident = make_morphism(line(), affine_space("A1y", {"y"}),
                               {parse_poly("x", {"x"})});
    CHECK(singular_reduction_set(ident, 5).empty());

    auto four = sum_of_squares(4);
    CHECK(singular_reduction_set(four, 3) == std::vector<FpPoint>{{0, 0, 0, 0}});
}

TEST_CASE("singular_reduction_set respects floor and budget") {
    CHECK_THROWS_AS(singular_reduction_set(squaring(), 2, 3), ValidationError);
    Budget tiny{2};
    CHECK_THROWS_AS(singular_reduction_set(sum_of_squares(4), 3, 3, tiny), BudgetError);
}

TEST_CASE("smooth locus correspondence between jets and base") {
    for (unsigned p : {5u, 7u}) {
        for (unsigned k : {1u, 2u}) {
            for (const auto& phi : {squaring(), product_map(), sum_of_squares(3)}) {
                auto jet = jet_morphism(phi, k);
                const std::size_t m = phi.source.vars.size();
                const std::size_t jm = jet.scheme.vars.size();
                // affine sources: every vector is a point of J_k(X)
                std::uint64_t total = 1;
                for (std::size_t i = 0; i < jm; ++i) total *= p;
                std::uint64_t step = std::max<std::uint64_t>(1, total / 200);
                for (std::uint64_t idx = 0; idx < total; idx += step) {
                    FpPoint jpt(jm);
                    std::uint64_t v = idx;
                    for (std::size_t i = 0; i < jm; ++i) {
                        jpt[i] = static_cast<unsigned>(v % p);
                        v /= p;
                    }
                    FpPoint base(jpt.begin(), jpt.begin() + m);  // level-0 block
                    CHECK(is_singular_point(*jet.morphism, jpt, p) ==
                          is_singular_point(phi, base, p));
                }
            }
        }
    }
}

TEST_CASE("jet Jacobian is block upper-triangular with constant diagonal") {
    auto f = parse_poly("x1*x2^2", {"x1", "x2"});
    const unsigned k = 2;
    const std::size_t m = 2;
    auto coeffs = jet_coefficients(f, k);
    auto jvars = jet_variables({"x1", "x2"}, k);
    for (unsigned u2 = 0; u2 <= k; ++u2) {
        for (unsigned u1 = 0; u1 <= k; ++u1) {
            for (std::size_t i = 0; i < m; ++i) {
                IntPoly d = coeffs[u2].partial_derivative(u1 * m + i);
                if (u1 > u2) {
                    CHECK(d.is_zero());
                } else if (u1 == u2) {
                    CHECK(d == f.partial_derivative(i).with_variables(jvars));
                }
            }
        }
    }
}

TEST_CASE("validate_morphism catches components missing the target") {
    auto tgt = make_scheme("D", {"u", "v"}, {parse_poly("u - v", {"u", "v"})}, 1);
    auto good = make_morphism(line(), tgt, {parse_poly("x", {"x"}), parse_poly("x", {"x"})});
    CHECK(validate_morphism(good) > 0);
    auto bad = make_morphism(line(), tgt,
                             {parse_poly("x", {"x"}), parse_poly("x + 1", {"x"})});
    CHECK_THROWS_AS(validate_morphism(bad), ValidationError);
}

TEST_CASE("definition file round trip") {
    const std::string text = R"(# quadric cone and its defining map
[X]
vars = x, y, z
dim = 3
ci = yes

[Y]
vars = t
dim = 1

[cone]
vars = x, y, z
eqs = x^2 + y^2 + z^2
dim = 2

[phi]
source = X
target = Y
maps = x^2 + y^2 + z^2
)";
    auto defs = parse_definition_file(text);
    REQUIRE(defs.schemes.count("X"));
    REQUIRE(defs.schemes.count("cone"));
    REQUIRE(defs.morphisms.count("phi"));
    CHECK(defs.schemes.at("X").complete_intersection);
    CHECK(defs.schemes.at("cone").equations.size() == 1);
    CHECK(defs.morphisms.at("phi").components[0].to_string() == "x^2 + y^2 + z^2");
}

TEST_CASE("definition file rejects malformed input") {
    CHECK_THROWS_AS(parse_definition_file("[X]\nvars = x\ndim = 1\ncolor = red\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_definition_file("[X]\nvars = x\n"), ParseError);  // missing dim
    CHECK_THROWS_AS(parse_definition_file("vars = x\n"), ParseError);  // key before section
    CHECK_THROWS_AS(parse_definition_file("[phi]\nsource = A\ntarget = B\nmaps = x\n"),
                    ParseError);  // unknown schemes
    CHECK_THROWS_AS(parse_definition_file("[X]\nvars = x\ndim = 2\n"), ParseError);
}

TEST_CASE("definition file rejects duplicate sections") {
    CHECK_THROWS_AS(parse_definition_file("[X]\nvars = x\ndim = 1\n\n[X]\nvars = y\ndim = 1\n"),
                    ParseError);
}
