#ifndef JETCOUNT_PRESBURGER_HPP
#define JETCOUNT_PRESBURGER_HPP

#include <optional>

#include "jetcount/counting.hpp"

namespace jetcount {

// Affine-linear function of s with rational coefficients; must be
// integer-valued on the domain it is used with (e.g. s/2 on even s).
struct AffineFn {
    Rat slope;
    Rat intercept;

    Rat eval_rat(const Rat& s) const { return slope * s + intercept; }
    Int eval_int(const Int& s) const;
    bool is_constant() const { return slope == 0; }
    std::string to_string() const;
};

// {s in N : s >= start, s = residue mod modulus}; modulus 1 is plain N.
struct PresDomain {
    Int start = 0;
    unsigned modulus = 1;
    unsigned residue = 0;

    Int first() const;
    Int next(const Int& s) const { return s + modulus; }
    bool contains(const Int& s) const;
    // smallest domain point >= bound
    Int first_at_least(const Rat& bound) const;
};

// One summand q^alpha(s) * prod_j beta_j(s) * prod_j 1/(1 - q^a_j).
struct PresTerm {
    AffineFn alpha;
    std::vector<AffineFn> betas;
    std::vector<int> denominators;  // the a_j, each nonzero
};

struct ConstructibleFunction {
    PresDomain domain;
    std::vector<PresTerm> terms;
};

// Validates denominators, domain shape, and integrality of alpha/beta on
// the domain; throws ValidationError.
void validate_constructible(const ConstructibleFunction& f);

// Exact value of the defining sum at rational q > 1 and integer s in the
// domain.
Rat eval_constructible(const ConstructibleFunction& f, const Rat& q, const Int& s);

// Value of a single term (used for unboundedness witnesses).
Rat eval_term(const PresTerm& t, const PresDomain& domain, const Rat& q, const Int& s);

enum class NonnegAnswer { Yes, Unknown, Counterexample };

struct NonnegReport {
    NonnegAnswer answer = NonnegAnswer::Unknown;
    // populated for Counterexample
    Int s;
    Rat q;
    Rat value;
};

// Three-valued formal non-negativity check: "yes" via the term-wise sign
// rule (beta signs by endpoint analysis, denominator signs by the sign of
// 1 - q^a), "counterexample" via grid sampling, "unknown" otherwise.
NonnegReport classify_nonneg(const ConstructibleFunction& f);

struct SupResult {
    bool bounded = false;
    // bounded case
    Rat sup;
    Int argmax;
    Int tail_bound;  // last domain point that had to be inspected
    // unbounded case
    std::size_t witness_term = 0;
};

// Exact supremum over the domain at fixed rational q > 1. Requires
// classify_nonneg(f) == Yes and every beta-product monomial in s (each
// factor a constant or a pure multiple of s); refuses otherwise. A term
// c*s^a*q^(b s) is unbounded iff c > 0 and b > 0, or b = 0 with a > 0;
// otherwise all terms are non-increasing past a rational tail bound
// computed with 1/ln(q) <= (q+1)/(2(q-1)), and the maximum over the finite
// prefix is the supremum (ties resolved toward the smallest s).
SupResult sup_over_domain(const ConstructibleFunction& f, const Rat& q);

// For an unbounded witness term, returns an explicit s in the domain whose
// standalone term value exceeds `threshold`.
Int unbounded_witness_s(const ConstructibleFunction& f, const Rat& q,
                        std::size_t term_index, const Rat& threshold);

// ---- Motivic functions: residue point-count factors ----

// Counting scheme with parameter slots: the last `param_count` variables
// are substituted with residue values before counting over F_p.
struct MotivicSummand {
    AffineScheme scheme;
    std::size_t param_count = 0;
    ConstructibleFunction factor;
};

struct MotivicFunctionDesc {
    std::vector<MotivicSummand> summands;
};

// sum_i #Y_i(F_p; parameters) * f_i(p, s), exact.
Rat eval_motivic(const MotivicFunctionDesc& h, unsigned p, const std::vector<Int>& params,
                 const Int& s, const Budget& budget = {}, unsigned prime_floor = 3);

// ---- Text format ----
//
//   function ::= [domain ';'] [sign] term {sign term}
//   domain   ::= 's' '>=' integer ['mod' natural natural]
//   term     ::= factor {'*' factor}
//   factor   ::= integer | 's' ['^' natural] | 'q' '^' exponent
//              | 'geom' '(' int {',' int} ')' | '(' affine ')'
//   exponent ::= '(' affine ')' | integer
//   affine   ::= part {('+'|'-') part}
//   part     ::= integer | [integer] 's' ['/' natural]
ConstructibleFunction parse_constructible(const std::string& text);
std::string constructible_to_text(const ConstructibleFunction& f);

}  // namespace jetcount

#endif
