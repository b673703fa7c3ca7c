#include "jetcount/presburger.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace jetcount {

Int AffineFn::eval_int(const Int& s) const {
    Rat v = eval_rat(Rat(s));
    if (v.get_den() != 1)
        throw ValidationError("affine function not integer-valued at s = " + s.get_str());
    return Int(v.get_num());
}

std::string AffineFn::to_string() const {
    std::ostringstream out;
    bool have = false;
    if (slope != 0) {
        Int num = slope.get_num(), den = slope.get_den();
        if (num == -1)
            out << "-";
        else if (num != 1)
            out << num.get_str();
        out << "s";
        if (den != 1) out << "/" << den.get_str();
        have = true;
    }
    if (intercept != 0 || !have) {
        Rat c = intercept;
        if (have) {
            out << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        out << c.get_num().get_str();
        if (c.get_den() != 1) out << "/" << c.get_den().get_str();
    }
    return out.str();
}

Int PresDomain::first() const {
    Int s = start < 0 ? Int(0) : start;
    if (modulus == 1) return s;
    Int rem = mod_floor(s, Int(modulus));
    Int shift = mod_floor(Int(residue) - rem, Int(modulus));
    return s + shift;
}

bool PresDomain::contains(const Int& s) const {
    if (s < start || s < 0) return false;
    return modulus == 1 || mod_floor(s, Int(modulus)) == residue;
}

Int PresDomain::first_at_least(const Rat& bound) const {
    Int lo;
    mpz_cdiv_q(lo.get_mpz_t(), bound.get_num().get_mpz_t(), bound.get_den().get_mpz_t());
    PresDomain shifted{std::max(lo, start), modulus, residue};
    return shifted.first();
}

void validate_constructible(const ConstructibleFunction& f) {
    if (f.domain.modulus < 1) throw ValidationError("domain modulus must be >= 1");
    if (f.domain.residue >= f.domain.modulus)
        throw ValidationError("domain residue out of range");
    if (f.domain.start < 0) throw ValidationError("domain start must be a natural");
    Int s0 = f.domain.first();
    for (const auto& t : f.terms) {
        for (int a : t.denominators)
            if (a == 0) throw ValidationError("geometric-series exponent must be nonzero");
        auto check_integral = [&](const AffineFn& fn) {
            Rat step = fn.slope * Rat(f.domain.modulus);
            if (step.get_den() != 1 || fn.eval_rat(Rat(s0)).get_den() != 1)
                throw ValidationError("affine function '" + fn.to_string() +
                                      "' not integer-valued on the domain");
        };
        check_integral(t.alpha);
        for (const auto& b : t.betas) check_integral(b);
    }
}

Rat eval_term(const PresTerm& t, const PresDomain& domain, const Rat& q, const Int& s) {
    if (q <= 1) throw ValidationError("q must exceed 1 (pole of 1/(1-q^a) at q = 1)");
    if (!domain.contains(s))
        throw ValidationError("s = " + s.get_str() + " outside the domain");
    Rat v = rat_pow(q, t.alpha.eval_int(s));
    for (const auto& b : t.betas) v *= Rat(b.eval_int(s));
    for (int a : t.denominators) v /= (Rat(1) - rat_pow(q, static_cast<long>(a)));
    return v;
}

Rat eval_constructible(const ConstructibleFunction& f, const Rat& q, const Int& s) {
    if (q <= 1) throw ValidationError("q must exceed 1 (pole of 1/(1-q^a) at q = 1)");
    Rat acc(0);
    for (const auto& t : f.terms) acc += eval_term(t, f.domain, q, s);
    return acc;
}

namespace {

enum class Sign { NonNeg, NonPos, Zero, Indet };

Sign beta_sign_on_domain(const AffineFn& b, const PresDomain& dom) {
    Rat at_first = b.eval_rat(Rat(dom.first()));
    if (b.slope == 0) {
        if (at_first == 0) return Sign::Zero;
        return at_first > 0 ? Sign::NonNeg : Sign::NonPos;
    }
    if (b.slope > 0) return at_first >= 0 ? Sign::NonNeg : Sign::Indet;
    return at_first <= 0 ? Sign::NonPos : Sign::Indet;
}

// Provably >= 0 on the whole domain for every real q > 1.
bool term_provably_nonneg(const PresTerm& t, const PresDomain& dom) {
    int flips = 0;
    for (const auto& b : t.betas) {
        switch (beta_sign_on_domain(b, dom)) {
            case Sign::Zero:
                return true;  // term vanishes identically
            case Sign::NonPos:
                ++flips;
                break;
            case Sign::NonNeg:
                break;
            case Sign::Indet:
                return false;
        }
    }
    for (int a : t.denominators)
        if (a > 0) ++flips;  // 1 - q^a < 0 for q > 1
    return flips % 2 == 0;
}

}  // namespace

NonnegReport classify_nonneg(const ConstructibleFunction& f) {
    validate_constructible(f);
    NonnegReport rep;
    bool all_nonneg = true;
    for (const auto& t : f.terms)
        if (!term_provably_nonneg(t, f.domain)) {
            all_nonneg = false;
            break;
        }
    if (all_nonneg) {
        rep.answer = NonnegAnswer::Yes;
        return rep;
    }
    // grid sampling; integer bases first so counterexample witnesses stay small
    static const std::pair<int, int> kSampleQ[] = {{2, 1}, {3, 1}, {5, 1}, {3, 2}};
    for (Int s = f.domain.first(); s <= 16; s = f.domain.next(s)) {
        for (const auto& [num, den] : kSampleQ) {
            Rat q(num, den);
            Rat v = eval_constructible(f, q, s);
            if (v < 0) {
                rep.answer = NonnegAnswer::Counterexample;
                rep.s = s;
                rep.q = q;
                rep.value = v;
                return rep;
            }
        }
    }
    if (f.domain.first() > 16) {
        // domain starts beyond the default grid; sample its first few points
        Int s = f.domain.first();
        for (int i = 0; i < 8; ++i, s = f.domain.next(s)) {
            for (const auto& [num, den] : kSampleQ) {
                Rat q(num, den);
                Rat v = eval_constructible(f, q, s);
                if (v < 0) {
                    rep.answer = NonnegAnswer::Counterexample;
                    rep.s = s;
                    rep.q = q;
                    rep.value = v;
                    return rep;
                }
            }
        }
    }
    rep.answer = NonnegAnswer::Unknown;
    return rep;
}

namespace {

struct NormalTerm {
    int sign = 0;    // sign of the folded coefficient (q-powers are positive)
    unsigned a = 0;  // power of s
    Rat b;           // slope of the q-exponent
};

NormalTerm fold_term(const PresTerm& t, const Rat& q) {
    NormalTerm n;
    n.sign = 1;
    n.b = t.alpha.slope;
    for (const auto& beta : t.betas) {
        if (beta.slope != 0 && beta.intercept != 0)
            throw ValidationError("beta factor '" + beta.to_string() +
                                  "' is not a monomial in s; sup_over_domain refuses "
                                  "non-monomial beta products");
        if (beta.slope != 0) {
            n.a += 1;
            if (beta.slope < 0) n.sign = -n.sign;
        } else {
            if (beta.intercept == 0) n.sign = 0;
            if (beta.intercept < 0) n.sign = -n.sign;
        }
    }
    for (int a : t.denominators)
        if (Rat(1) - rat_pow(q, static_cast<long>(a)) < 0) n.sign = -n.sign;
    return n;
}

}  // namespace

SupResult sup_over_domain(const ConstructibleFunction& f, const Rat& q) {
    if (q <= 1) throw ValidationError("q must exceed 1");
    if (classify_nonneg(f).answer != NonnegAnswer::Yes)
        throw ValidationError("sup_over_domain requires classify_nonneg = yes");

    SupResult res;
    // rational upper bound on 1/ln q, valid for all q > 1
    Rat inv_ln_q_ub = (q + 1) / (Rat(2) * (q - 1));
    Rat tail(0);
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        NormalTerm n = fold_term(f.terms[i], q);
        if (n.sign == 0) continue;
        if (n.b > 0 || (n.b == 0 && n.a > 0)) {
            res.bounded = false;
            res.witness_term = i;
            return res;
        }
        if (n.b < 0 && n.a > 0) {
            Rat bound = Rat(n.a) * inv_ln_q_ub / (-n.b);
            tail = std::max(tail, bound);
        }
    }

    res.bounded = true;
    Int last = f.domain.first_at_least(tail);
    Int first = f.domain.first();
    if (last < first) last = first;
    res.tail_bound = last;
    bool have = false;
    for (Int s = first; s <= last; s = f.domain.next(s)) {
        Rat v = eval_constructible(f, q, s);
        if (!have || v > res.sup) {
            res.sup = v;
            res.argmax = s;
            have = true;
        }
    }
    return res;
}

Int unbounded_witness_s(const ConstructibleFunction& f, const Rat& q,
                        std::size_t term_index, const Rat& threshold) {
    if (term_index >= f.terms.size())
        throw ValidationError("witness term index out of range");
    const PresTerm& t = f.terms[term_index];
    Int s = f.domain.first();
    for (int guard = 0; guard < 100000; ++guard, s = f.domain.next(s)) {
        if (eval_term(t, f.domain, q, s) > threshold) return s;
    }
    throw Error("no witness found below iteration guard; term may not be unbounded");
}

Rat eval_motivic(const MotivicFunctionDesc& h, unsigned p, const std::vector<Int>& params,
                 const Int& s, const Budget& budget, unsigned prime_floor) {
    if (p < prime_floor)
        throw ValidationError("prime " + std::to_string(p) + " below configured floor " +
                              std::to_string(prime_floor));
    Rat acc(0);
    for (const auto& summand : h.summands) {
        if (params.size() != summand.param_count)
            throw ValidationError("parameter arity mismatch in motivic function");
        const auto& sch = summand.scheme;
        if (summand.param_count > sch.vars.size())
            throw ValidationError("parameter slots exceed scheme arity");
        std::size_t n_free = sch.vars.size() - summand.param_count;
        std::vector<std::string> free_vars(sch.vars.begin(), sch.vars.begin() + n_free);
        std::vector<IntPoly> eqs;
        for (const auto& f : sch.equations) {
            IntPoly g = f;
            for (std::size_t i = 0; i < summand.param_count; ++i)
                g = g.substituted(n_free + i, params[i]);
            eqs.push_back(g.restricted_to_prefix(n_free));
        }
        AffineScheme counted;
        counted.name = sch.name;
        counted.vars = free_vars;
        counted.equations = std::move(eqs);
        counted.declared_dim = 0;
        Int count = count_points_naive(counted, p, 1, budget).count;
        acc += Rat(count) * eval_constructible(summand.factor, Rat(p), s);
    }
    return acc;
}

// ---- text format ----

namespace {

struct PLexer {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool accept_word(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) == 0) {
            // must not be a prefix of a longer identifier
            std::size_t end = pos + w.size();
            if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) ||
                                   s[end] == '_'))
                return false;
            pos = end;
            return true;
        }
        return false;
    }
    Int integer() {
        skip_ws();
        std::size_t at = pos;
        bool neg = accept('-');
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer", at);
        Int v(s.substr(start, pos - start));
        return neg ? Int(-v) : v;
    }
};

AffineFn parse_affine(PLexer& lx) {
    AffineFn fn{Rat(0), Rat(0)};
    bool first = true;
    while (true) {
        int sign = 1;
        if (lx.accept('+')) {
            sign = 1;
        } else if (lx.accept('-')) {
            sign = -1;
        } else if (!first) {
            break;
        }
        first = false;
        Int coeff = 1;
        bool saw_coeff = false;
        if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
            coeff = lx.integer();
            saw_coeff = true;
        }
        if (lx.accept_word("s")) {
            Rat slope(coeff);
            if (lx.accept('/')) {
                Int den = lx.integer();
                if (den <= 0) throw ParseError("slope denominator must be positive", lx.pos);
                slope /= Rat(den);
            }
            fn.slope += sign * slope;
        } else if (saw_coeff) {
            Rat part(coeff);
            if (lx.accept('/')) {
                Int den = lx.integer();
                if (den <= 0)
                    throw ParseError("intercept denominator must be positive", lx.pos);
                part /= Rat(den);
            }
            fn.intercept += sign * part;
        } else {
            throw ParseError("expected affine part", lx.pos);
        }
    }
    return fn;
}

PresTerm parse_term(PLexer& lx) {
    PresTerm t;
    t.alpha = AffineFn{Rat(0), Rat(0)};
    bool first_factor = true;
    while (true) {
        if (!first_factor && !lx.accept('*')) break;
        first_factor = false;
        char c = lx.peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.betas.push_back(AffineFn{Rat(0), Rat(lx.integer())});
        } else if (lx.accept_word("geom")) {
            if (!lx.accept('(')) throw ParseError("expected '(' after geom", lx.pos);
            while (true) {
                Int a = lx.integer();
                if (!a.fits_sint_p() || a == 0)
                    throw ParseError("geom exponent must be a small nonzero integer", lx.pos);
                t.denominators.push_back(static_cast<int>(a.get_si()));
                if (lx.accept(',')) continue;
                if (lx.accept(')')) break;
                throw ParseError("expected ',' or ')' in geom", lx.pos);
            }
        } else if (lx.accept_word("q")) {
            if (!lx.accept('^')) throw ParseError("expected '^' after q", lx.pos);
            if (lx.accept('(')) {
                t.alpha = parse_affine(lx);
                if (!lx.accept(')')) throw ParseError("expected ')'", lx.pos);
            } else {
                t.alpha = AffineFn{Rat(0), Rat(lx.integer())};
            }
        } else if (lx.accept_word("s")) {
            unsigned e = 1;
            if (lx.accept('^')) {
                Int v = lx.integer();
                if (v < 0 || v > 64) throw ParseError("s-power out of range", lx.pos);
                e = static_cast<unsigned>(v.get_ui());
            }
            for (unsigned i = 0; i < e; ++i)
                t.betas.push_back(AffineFn{Rat(1), Rat(0)});
        } else if (lx.accept('(')) {
            t.betas.push_back(parse_affine(lx));
            if (!lx.accept(')')) throw ParseError("expected ')'", lx.pos);
        } else {
            throw ParseError("expected factor", lx.pos);
        }
    }
    return t;
}

}  // namespace

ConstructibleFunction parse_constructible(const std::string& text) {
    PLexer lx{text};
    ConstructibleFunction f;

    // optional domain clause "s >= s0 [mod r c] ;"
    std::size_t save = lx.pos;
    if (lx.accept_word("s")) {
        if (lx.accept('>')) {
            if (!lx.accept('=')) throw ParseError("expected '>='", lx.pos);
            f.domain.start = lx.integer();
            if (lx.accept_word("mod")) {
                Int r = lx.integer();
                Int c = lx.integer();
                if (r <= 0 || c < 0 || c >= r)
                    throw ParseError("domain congruence out of range", lx.pos);
                f.domain.modulus = static_cast<unsigned>(r.get_ui());
                f.domain.residue = static_cast<unsigned>(c.get_ui());
            }
            if (!lx.accept(';')) throw ParseError("expected ';' after domain clause", lx.pos);
        } else {
            lx.pos = save;  // it was the variable s starting a term
        }
    }

    bool first = true;
    while (lx.peek() != '\0') {
        int sign = 1;
        if (lx.accept('+')) {
            sign = 1;
        } else if (lx.accept('-')) {
            sign = -1;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms", lx.pos);
        }
        first = false;
        PresTerm t = parse_term(lx);
        if (sign < 0) t.betas.push_back(AffineFn{Rat(0), Rat(-1)});
        f.terms.push_back(std::move(t));
    }
    validate_constructible(f);
    return f;
}

std::string constructible_to_text(const ConstructibleFunction& f) {
    std::ostringstream out;
    if (f.domain.start != 0 || f.domain.modulus != 1) {
        out << "s >= " << f.domain.start.get_str();
        if (f.domain.modulus != 1)
            out << " mod " << f.domain.modulus << " " << f.domain.residue;
        out << " ; ";
    }
    if (f.terms.empty()) return out.str() + "0";
    bool first = true;
    for (const auto& t : f.terms) {
        // fold constant betas into one integer coefficient
        Int c(1);
        unsigned spow = 0;
        std::vector<const AffineFn*> affine;
        for (const auto& b : t.betas) {
            if (b.slope == 0 && b.intercept.get_den() == 1) {
                c *= b.intercept.get_num();
            } else if (b.intercept == 0 && b.slope == 1) {
                ++spow;
            } else {
                affine.push_back(&b);
            }
        }
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        Int ca = abs(c);
        std::vector<std::string> factors;
        if (spow == 1)
            factors.push_back("s");
        else if (spow > 1)
            factors.push_back("s^" + std::to_string(spow));
        if (!(t.alpha.slope == 0 && t.alpha.intercept == 0))
            factors.push_back("q^(" + t.alpha.to_string() + ")");
        if (!t.denominators.empty()) {
            std::string g = "geom(";
            for (std::size_t i = 0; i < t.denominators.size(); ++i)
                g += (i ? "," : "") + std::to_string(t.denominators[i]);
            factors.push_back(g + ")");
        }
        for (const AffineFn* b : affine) factors.push_back("(" + b->to_string() + ")");
        if (factors.empty() || ca != 1)
            factors.insert(factors.begin(), ca.get_str());
        for (std::size_t i = 0; i < factors.size(); ++i)
            out << (i ? "*" : "") << factors[i];
    }
    return out.str();
}

}  // namespace jetcount
