#ifndef JETCOUNT_COUNTING_HPP
#define JETCOUNT_COUNTING_HPP

#include <optional>

#include "jetcount/scheme.hpp"

namespace jetcount {

enum class CountMethod { Naive, Tree, Auto };
enum class FiberFilter { All, SingularReduction };

struct CountResult {
    Int count;
    std::uint64_t nodes_visited = 0;
    CountMethod method_used = CountMethod::Naive;
    double wall_seconds = 0.0;
};

// Exact #X(Z/p^kZ) by full enumeration of (Z/p^kZ)^m. Work estimate
// p^(k*m) * #equations is checked against the budget before running.
CountResult count_points_naive(const AffineScheme& x, unsigned p, unsigned k,
                               const Budget& budget = {});

// Exact #X(Z/p^kZ) by level-by-level lifting: solutions mod p^(j+1) above a
// solution x mod p^j are x + p^j v with J(x) v = -F(x)/p^j over F_p. When
// the scheme is flagged complete-intersection and the Jacobian has full
// rank l at the mod-p root, the subtree is counted closed-form as
// p^((k-j)(m-l)). Residuals are tracked as exact integers.
CountResult count_points_tree(const AffineScheme& x, unsigned p, unsigned k,
                              const Budget& budget = {});

// Exact #X(F_p[t]/(t^e)) by enumeration with truncated-series arithmetic.
CountResult count_points_jetring(const AffineScheme& x, unsigned p, unsigned e,
                                 const Budget& budget = {});

// Counts source points of phi^{-1}(y) mod p^k; with FiberFilter::
// SingularReduction only points whose mod-p reduction lies in
// singular_reduction_set(phi, p) are counted (the tree prunes at level 1).
// `singular_set`, when supplied, must equal singular_reduction_set(phi, p).
CountResult count_fiber(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                        unsigned k, FiberFilter filter = FiberFilter::All,
                        CountMethod method = CountMethod::Auto, const Budget& budget = {},
                        unsigned prime_floor = 3,
                        const std::vector<FpPoint>* singular_set = nullptr);

// The augmented system (source equations, components - y) cutting the fiber
// inside the source ambient space; exposed for reuse by measures/tests.
AffineScheme fiber_scheme(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                          unsigned k);

// A whole counting request as one value: a scheme alone, or a morphism
// fiber over y mod p^k, with filter and method selection.
struct CountQuery {
    AffineScheme scheme;
    std::optional<PolyMorphism> morphism;  // when set, count the fiber over y
    std::vector<Int> y;
    unsigned p = 3;
    unsigned k = 1;
    FiberFilter filter = FiberFilter::All;
    CountMethod method = CountMethod::Auto;
};

CountResult run_query(const CountQuery& q, const Budget& budget = {},
                      unsigned prime_floor = 3);

}  // namespace jetcount

#endif
