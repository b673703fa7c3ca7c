#include <doctest.h>

#include <random>

#include "jetcount/presburger.hpp"

using namespace jetcount;

namespace {

ConstructibleFunction cf(const std::string& text) { return parse_constructible(text); }

// Test-side folding to sum c_i s^(a_i) q^(b_i s) at fixed q; independent of
// the implementation's normal form.
Rat folded_eval(const ConstructibleFunction& f, const Rat& q, const Int& s) {
    Rat acc(0);
    for (const auto& t : f.terms) {
        REQUIRE(t.alpha.intercept.get_den() == 1);
        Rat c = rat_pow(q, t.alpha.intercept.get_num().get_si());
        unsigned a = 0;
        for (const auto& b : t.betas) {
            if (b.slope != 0) {
                REQUIRE(b.intercept == 0);
                c *= b.slope;
                ++a;
            } else {
                c *= b.intercept;
            }
        }
        for (int d : t.denominators) c /= Rat(1) - rat_pow(q, static_cast<long>(d));
        REQUIRE(t.alpha.slope.get_den() == 1);
        acc += c * rat_pow(Rat(s), static_cast<long>(a)) *
               rat_pow(q, t.alpha.slope.get_num().get_si() * s.get_si());
    }
    return acc;
}

}  // namespace

TEST_CASE("eval_constructible examples") {
    CHECK(eval_constructible(cf("q^(-s)"), Rat(5), Int(3)) == Rat(1, 125));
    CHECK(eval_constructible(cf("s^2*q^(-s)*geom(-2)"), Rat(2), Int(2)) == Rat(4, 3));
    // q^(k - ceil(k/2)) on the even subsequence is q^(s/2)
    CHECK(eval_constructible(cf("s >= 0 mod 2 0 ; q^(s/2)"), Rat(3), Int(4)) == Rat(9));
}

TEST_CASE("eval_constructible rejects bad inputs") {
    CHECK_THROWS_AS(eval_constructible(cf("q^(s)"), Rat(1), Int(2)), ValidationError);
    CHECK_THROWS_AS(eval_constructible(cf("q^(s)"), Rat(1, 2), Int(2)), ValidationError);
    CHECK_THROWS_AS(eval_constructible(cf("s >= 0 mod 2 0 ; q^(s/2)"), Rat(2), Int(3)),
                    ValidationError);  // s outside the progression
    CHECK_THROWS_AS(cf("q^(s/2)"), ValidationError);  // s/2 not integral on all of N
}

TEST_CASE("classify_nonneg three documented answers") {
    auto yes = classify_nonneg(cf("q^(s)*geom(-1)"));
    CHECK(yes.answer == NonnegAnswer::Yes);

    auto cex = classify_nonneg(cf("s >= 1 ; 1 - q^(s)"));
    REQUIRE(cex.answer == NonnegAnswer::Counterexample);
    CHECK(cex.s == 1);
    CHECK(cex.q == Rat(2));
    CHECK(cex.value == Rat(-1));

    auto unk = classify_nonneg(cf("q^(s) - 1"));
    CHECK(unk.answer == NonnegAnswer::Unknown);
}

TEST_CASE("classify yes implies nonnegative sampled values") {
    const char* inputs[] = {"q^(s)*geom(-1)", "s*q^(-s)", "2*s^2*q^(-2s)*geom(-1,-2)",
                            "s >= 1 mod 2 1 ; q^(s/2 - 1/2)"};
    for (const char* text : inputs) {
        auto f = cf(text);
        if (classify_nonneg(f).answer != NonnegAnswer::Yes) continue;
        for (Int s = f.domain.first(); s <= 12; s = f.domain.next(s))
            for (int qi : {2, 3, 7})
                CHECK(eval_constructible(f, Rat(qi), s) >= 0);
    }
}

TEST_CASE("sup_over_domain bounded examples") {
    auto r1 = sup_over_domain(cf("s*q^(-s)"), Rat(2));
    REQUIRE(r1.bounded);
    CHECK(r1.sup == Rat(1, 2));
    CHECK(r1.argmax == 1);  // value 1/2 also at s = 2; smallest-s tie-break

    auto r3 = sup_over_domain(cf("s >= 1 ; q^(-s)"), Rat(3));
    REQUIRE(r3.bounded);
    CHECK(r3.sup == Rat(1, 3));
    CHECK(r3.argmax == 1);
}

TEST_CASE("sup_over_domain unbounded with usable witness") {
    auto f = cf("q^(s)");
    auto r = sup_over_domain(f, Rat(2));
    REQUIRE_FALSE(r.bounded);
    Int s = unbounded_witness_s(f, Rat(2), r.witness_term, Rat(1000000));
    CHECK(eval_term(f.terms[r.witness_term], f.domain, Rat(2), s) > Rat(1000000));

    // b = 0 with a > 0 is also unbounded
    auto g = cf("s");
    CHECK_FALSE(sup_over_domain(g, Rat(2)).bounded);
}

TEST_CASE("sup_over_domain refusals") {
    CHECK_THROWS_AS(sup_over_domain(cf("s >= 1 ; 1 - q^(s)"), Rat(2)), ValidationError);
    // (2s - 1) is affine but not a monomial
    auto f = cf("s >= 1 ; (2s - 1)*q^(-s)");
    CHECK(classify_nonneg(f).answer == NonnegAnswer::Yes);
    CHECK_THROWS_AS(sup_over_domain(f, Rat(2)), ValidationError);
}

TEST_CASE("bounded sup dominates a brute-force sweep to 4x the tail bound") {
    const char* inputs[] = {"s*q^(-s)", "s^3*q^(-s)*geom(-1)", "q^(-2s)*s^2 + 3*q^(-s)",
                            "s >= 2 mod 3 2 ; s*q^(-s)"};
    for (const char* text : inputs) {
        auto f = cf(text);
        for (int qi : {2, 3}) {
            auto r = sup_over_domain(f, Rat(qi));
            REQUIRE(r.bounded);
            Int limit = r.tail_bound * 4;
            bool attained = false;
            for (Int s = f.domain.first(); s <= limit; s = f.domain.next(s)) {
                Rat v = eval_constructible(f, Rat(qi), s);
                CHECK(v <= r.sup);
                if (s == r.argmax) {
                    CHECK(v == r.sup);
                    attained = true;
                }
            }
            CHECK(attained);
        }
    }
}

TEST_CASE("normal-form folding agrees with direct evaluation") {
    std::mt19937_64 rng(5150);
    const char* inputs[] = {"s*q^(-s)*geom(-1)", "3*s^2*q^(2s+1)", "q^(-s) + 2*s*q^(s-3)",
                            "5*geom(-1,2)*q^(s)"};
    for (const char* text : inputs) {
        auto f = cf(text);
        for (int trial = 0; trial < 13; ++trial) {
            Rat q(2 + static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 2));
            if (q <= 1) continue;
            Int s(static_cast<unsigned long>(rng() % 10));
            CHECK(eval_constructible(f, q, s) == folded_eval(f, q, s));
        }
    }
}

TEST_CASE("eval_motivic residue point-count factors") {
    // #V(u^2 - c) with parameter c
    auto vsq = make_scheme("V", {"u", "c"}, {parse_poly("u^2 - c", {"u", "c"})}, 0);
    MotivicFunctionDesc f1{{MotivicSummand{vsq, 1, cf("1")}}};
    CHECK(eval_motivic(f1, 5, {Int(1)}, Int(0)) == Rat(2));
    CHECK(eval_motivic(f1, 5, {Int(2)}, Int(0)) == Rat(0));
    CHECK(eval_motivic(f1, 5, {Int(0)}, Int(0)) == Rat(1));

    MotivicFunctionDesc f2{{MotivicSummand{affine_space("A1", {"u"}), 0, cf("q^(-s)")}}};
    CHECK(eval_motivic(f2, 3, {}, Int(1)) == Rat(1));

    auto xy = make_scheme("XY", {"x", "y"}, {parse_poly("x*y", {"x", "y"})}, 1);
    MotivicFunctionDesc f3{{MotivicSummand{xy, 0, cf("q^(-1)")}}};
    CHECK(eval_motivic(f3, 7, {}, Int(0)) == Rat(13, 7));
}

TEST_CASE("text format round-trips") {
    const char* inputs[] = {"q^(-s)", "s^2*q^(-s)*geom(-2)", "s >= 0 mod 2 0 ; q^(s/2)",
                            "1 - q^(s)", "(2s - 1)*q^(-s)", "s >= 3 ; 4*s*geom(-1,-2)"};
    for (const char* text : inputs) {
        auto f = cf(text);
        std::string printed = constructible_to_text(f);
        auto g = parse_constructible(printed);
        CHECK(constructible_to_text(g) == printed);
        // same values too
        for (Int s = f.domain.first(); s <= 8; s = f.domain.next(s))
            CHECK(eval_constructible(f, Rat(2), s) == eval_constructible(g, Rat(2), s));
    }
}
