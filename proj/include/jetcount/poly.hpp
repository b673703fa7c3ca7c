#ifndef JETCOUNT_POLY_HPP
#define JETCOUNT_POLY_HPP

#include <map>
#include <string>
#include <vector>

#include "jetcount/common.hpp"

namespace jetcount {

// Exponents beyond this are rejected by the parser and arithmetic.
inline constexpr unsigned kMaxExponent = 1u << 20;

// Multivariate polynomial with arbitrary-precision integer coefficients,
// in sparse canonical form: no zero coefficients, no repeated exponent
// vectors. Terms are kept in the canonical print order: total degree
// descending, ties broken by the rightmost differing exponent (smaller
// exponent first). Immutable in spirit; all operations return new values.
class IntPoly {
public:
    using Exponents = std::vector<unsigned>;

    struct TermOrder {
        bool operator()(const Exponents& a, const Exponents& b) const;
    };

    using TermMap = std::map<Exponents, Int, TermOrder>;

    IntPoly() = default;  // zero polynomial in zero variables
    explicit IntPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static IntPoly constant(std::vector<std::string> vars, Int c);
    static IntPoly variable(std::vector<std::string> vars, std::size_t index);

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // Degree of the zero polynomial is -1 (reporting convention).
    long degree() const;

    // Adds c * x^e, merging with an existing term and dropping zeros.
    void add_term(Exponents e, const Int& c);

    IntPoly operator-() const;
    IntPoly operator+(const IntPoly& o) const;
    IntPoly operator-(const IntPoly& o) const;
    IntPoly operator*(const IntPoly& o) const;
    IntPoly operator*(const Int& c) const;
    bool operator==(const IntPoly& o) const {
        return vars_ == o.vars_ && terms_ == o.terms_;
    }

    IntPoly partial_derivative(std::size_t var_index) const;
    IntPoly partial_derivative(const std::string& var) const;

    // Exact evaluation over the integers.
    Int evaluate(const std::vector<Int>& point) const;

    // Same polynomial over a variable superset; every current variable must
    // appear in `super` (matched by name).
    IntPoly with_variables(const std::vector<std::string>& super) const;

    // Renames variables positionally; `names` must have the same arity.
    IntPoly renamed(const std::vector<std::string>& names) const;

    // Partial evaluation: substitutes an integer for one variable. The
    // variable list is unchanged, its exponent becomes zero in every term.
    IntPoly substituted(std::size_t var_index, const Int& value) const;

    // Drops trailing variables; every term must have exponent zero there.
    IntPoly restricted_to_prefix(std::size_t n_vars) const;

    std::string to_string() const;

private:
    std::size_t var_index_checked(const std::string& var) const;

    std::vector<std::string> vars_;
    TermMap terms_;
};

// Parses the polynomial text grammar:
//   poly   ::= [sign] term {sign term}
//   term   ::= integer ['*' factors] | factors
//   factors::= factor {'*' factor}
//   factor ::= variable ['(' natural ')'] ['^' natural]
// Variables match [A-Za-z][A-Za-z0-9_]*; a parenthesized level after a name
// forms a jet variable ("x1(2)"). Whitespace is insignificant.
IntPoly parse_poly(const std::string& text, const std::vector<std::string>& variables);

// ---- Jet prolongation at the polynomial level ----

// "x" at level 0, "x(level)" otherwise.
std::string jet_variable_name(const std::string& base, unsigned level);

// Level-major jet variable set: x1,..,xm, x1(1),..,xm(1), ..., xm(k).
std::vector<std::string> jet_variables(const std::vector<std::string>& vars, unsigned k);

// All coefficients f^(0), ..., f^(k) of f(sum_j x^(j) t^j) as polynomials in
// the jet variable set of depth k. No factorial normalization and no
// division, so the construction is uniform in the characteristic.
std::vector<IntPoly> jet_coefficients(const IntPoly& f, unsigned k);

// The t^u coefficient alone; requires u <= k.
IntPoly jet_coefficient(const IntPoly& f, unsigned u, unsigned k);

}  // namespace jetcount

#endif
