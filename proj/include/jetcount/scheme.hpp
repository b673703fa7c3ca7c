#ifndef JETCOUNT_SCHEME_HPP
#define JETCOUNT_SCHEME_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jetcount/poly.hpp"

namespace jetcount {

// Closed subscheme of affine m-space cut out by integer polynomials. An
// empty equation list means affine space itself. `declared_dim` is the
// generic dimension of the Q-points locus, supplied by the caller; the
// complete_intersection flag asserts that the presentation has exactly
// m - declared_dim equations cutting a complete intersection.
struct AffineScheme {
    std::string name;
    std::vector<std::string> vars;
    std::vector<IntPoly> equations;
    unsigned declared_dim = 0;
    bool complete_intersection = false;
};

AffineScheme make_scheme(std::string name, std::vector<std::string> vars,
                         std::vector<IntPoly> equations, unsigned declared_dim,
                         bool complete_intersection = false);

AffineScheme affine_space(std::string name, std::vector<std::string> vars);

struct PolyMorphism {
    AffineScheme source;
    AffineScheme target;
    std::vector<IntPoly> components;  // over source.vars, one per target var

    // d = dim X - dim Y
    long relative_dim() const {
        return static_cast<long>(source.declared_dim) -
               static_cast<long>(target.declared_dim);
    }
};

PolyMorphism make_morphism(AffineScheme source, AffineScheme target,
                           std::vector<IntPoly> components);

// Result of prolonging a scheme (and optionally a morphism) to jet level k.
struct JetSystem {
    unsigned level = 0;
    AffineScheme scheme;
    std::optional<PolyMorphism> morphism;
};

// J_k(X): (k+1)*m variables, (k+1)*l equations ordered by level then by
// original equation; level-0 variables coincide with X's. declared_dim
// becomes (k+1)*dim(X) as a reporting convention.
JetSystem jet_prolong(const AffineScheme& x, unsigned k);

// J_k(phi): prolonged source and target, components ordered by level then
// by target coordinate; relative_dim scales by (k+1).
JetSystem jet_morphism(const PolyMorphism& phi, unsigned k);

// ---- Linear algebra over F_p ----

using FpMatrix = std::vector<std::vector<unsigned>>;

// Row echelon rank; deterministic pivoting (first nonzero in row-major order).
unsigned fp_rank(FpMatrix m, unsigned p);

struct FpSolution {
    bool consistent = false;
    std::vector<unsigned> particular;      // one solution of A x = b
    std::vector<std::vector<unsigned>> null_basis;
};

FpSolution fp_solve(FpMatrix a, std::vector<unsigned> b, unsigned p);

// ---- Singular loci of morphisms over F_p ----

using FpPoint = std::vector<unsigned>;

// True iff the stacked Jacobian of (source equations, morphism components)
// at `point` has rank < l + n over F_p. Requires the source to be flagged
// as a complete intersection with l = m - declared_dim, and the point to
// satisfy the source equations mod p.
bool is_singular_point(const PolyMorphism& phi, const FpPoint& point, unsigned p);

// All F_p points of the source scheme at which is_singular_point holds,
// sorted lexicographically.
std::vector<FpPoint> singular_reduction_set(const PolyMorphism& phi, unsigned p,
                                            unsigned prime_floor = 3,
                                            const Budget& budget = {});

// Samples F_p points of the source and checks that the components land in
// the target (target equations vanish on images). Throws ValidationError
// with a witness on failure. Returns the number of points checked.
std::size_t validate_morphism(const PolyMorphism& phi, unsigned p = 97,
                              std::size_t samples = 64, std::uint64_t seed = 1);

// ---- Definition files ----

// Line-oriented key-value format with bracketed sections:
//
//   [X]
//   vars = x, y
//   eqs = x^2 + y^2; x*y      (optional; absent means affine space)
//   dim = 1
//   ci = yes                  (optional; default no)
//
//   [phi]
//   source = X
//   target = Y
//   maps = x^2 + y^2; x*y
//
// Unknown keys are rejected with the offending line number.
struct DefinitionFile {
    std::map<std::string, AffineScheme> schemes;
    std::map<std::string, PolyMorphism> morphisms;
};

DefinitionFile parse_definition_file(const std::string& text);

}  // namespace jetcount

#endif
