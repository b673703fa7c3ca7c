#ifndef JETCOUNT_DIAGNOSTICS_HPP
#define JETCOUNT_DIAGNOSTICS_HPP

#include "jetcount/measures.hpp"

namespace jetcount {

// Grid scan request: every (p in primes, k <= k_max, y per fiber policy).
// Fiber policy: all target points mod p^k when the ambient count p^(k*n)
// is within `fiber_cap`, otherwise a seeded rejection sample of
// `fiber_cap` distinct target points. Deterministic given the seed.
struct ScanSpec {
    PolyMorphism morphism;
    std::string label;  // used in artifact echoes
    std::vector<unsigned> primes;
    unsigned k_max = 1;
    std::uint64_t fiber_cap = 200;
    std::uint64_t seed = 0;
    Budget budget;
    unsigned prime_floor = 3;
    CountMethod method = CountMethod::Auto;
    unsigned jobs = 1;
};

struct GHTable {
    ScanSpec spec;  // echo (morphism included for re-evaluation)
    std::vector<GHRecord> rows;  // sorted by (p, k, y)
    bool truncated = false;      // some cells refused by the budget
    std::vector<unsigned> advisory_primes;  // below the floor; excluded from verdicts
    std::vector<std::string> notes;
};

GHTable scan_gh(const ScanSpec& spec);

enum class Outcome { Consistent, Refuted, Inconclusive, Smooth };

struct RowKey {
    unsigned p = 0;
    unsigned k = 0;
    std::vector<Int> y;
};

struct Verdict {
    std::string kind;  // "FRS" | "E-smooth" | "jet-flat"
    Outcome outcome = Outcome::Inconclusive;
    // E-smooth: fitted exponent, or the infinite-E smooth convention
    std::optional<Int> fitted_E;
    bool E_infinite = false;
    // jet-flat: epsilon fitted exactly over the pure-p-power rows; when
    // flagged (non-pure-power) rows could push the true maximum further,
    // the conservative interval [epsilon_int_lo, epsilon] is attached
    std::optional<Rat> epsilon;
    std::optional<Rat> epsilon_int_lo;
    bool epsilon_exact = false;
    // empirical constants (max of h*p, max of |g(y,k)-g(r1(y),1)|*p)
    Rat C1;
    Rat C2;
    std::vector<RowKey> witnesses;
    std::vector<std::string> notes;
};

// Empirical (FRS) check. Refuted when some fiber group (p, r1(y)) shows
// strictly geometric growth of g across levels (g(k2) > g(k1) with
// g(k2)^2 >= g(k1)^2 * p^(k2-k1)); consistent when no growth trend is
// detected in k and the per-prime maxima of h*p and |delta g|*p do not
// trend upward faster than sqrt(p); inconclusive otherwise.
Verdict frs_diagnostic(const GHTable& table);

// Fits E from rows with h > 0 shared across >= 2 primes: per prime
// -log_p(h), exact for pure p-powers, floats otherwise; primes must agree
// within 0.2. E-hat is the minimum over (k, y-class). All-zero h yields
// the smooth (E = infinity) convention.
Verdict esmooth_diagnostic(const GHTable& table);

// epsilon-hat = 1 - max over rows with g > 1 of log_p(g) / (k * dimY).
// Rows whose g is an exact p-power contribute exact rationals; rows with
// non-pure-power g are flagged rather than fitted, and when their integer
// log brackets could exceed the pure maximum the verdict carries a
// conservative interval alongside the fitted value.
Verdict jetflat_diagnostic(const GHTable& table, unsigned dim_y);

std::string table_to_csv(const GHTable& table);
std::string verdict_to_json_text(const Verdict& v, const GHTable& table);

}  // namespace jetcount

#endif
