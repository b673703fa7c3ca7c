#ifndef JETCOUNT_MEASURES_HPP
#define JETCOUNT_MEASURES_HPP

#include "jetcount/counting.hpp"

namespace jetcount {

// One (p, k, y) cell of a g/h table. g = raw_count / p^(k*d) and
// h = singular_count / p^(k*d) with d the morphism's relative dimension.
struct GHRecord {
    unsigned p = 0;
    unsigned k = 0;
    std::vector<Int> y;
    Int raw_count;
    Int singular_count;
    Rat g;
    Rat h;
};

GHRecord gh_record(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                   unsigned k, CountMethod method = CountMethod::Auto,
                   const Budget& budget = {}, unsigned prime_floor = 3,
                   const std::vector<FpPoint>* singular_set = nullptr);

// #phi^{-1}(y mod p^k) / p^(k*d), exact.
Rat g_value(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p, unsigned k,
            CountMethod method = CountMethod::Auto, const Budget& budget = {});

// Same count restricted to points reducing into the singular locus of phi.
Rat h_value(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p, unsigned k,
            CountMethod method = CountMethod::Auto, const Budget& budget = {},
            unsigned prime_floor = 3);

// Lang-Weil component-count estimate from prime-field point counts:
// ratios #Z(F_p)/p^dim; C is the rounded largest-prime ratio; stable iff
// every ratio is strictly within 1/2 of C (a half-way rounding tie is
// reported as not stable).
struct ComponentEstimate {
    std::vector<unsigned> primes;
    std::vector<Rat> ratios;
    Int C;
    bool stable = false;
};

ComponentEstimate estimate_components(const AffineScheme& z, std::vector<unsigned> primes,
                                      const Budget& budget = {}, unsigned prime_floor = 3);

// Least-squares slope of log #Z(F_p) against log p.
struct DimensionEstimate {
    double slope = 0.0;
    double residual = 0.0;        // sum of squared residuals of the fit
    bool lower_bound_only = false;  // some prime had zero points
};

DimensionEstimate estimate_dimension(const AffineScheme& z, std::vector<unsigned> primes,
                                     const Budget& budget = {}, unsigned prime_floor = 3);

// Per-prime deviations |#Z(F_p)/p^dim - C| * sqrt(p); the maximum is the
// empirical Lang-Weil constant for this scheme family.
struct LangWeilRow {
    unsigned p = 0;
    Int count;
    Rat ratio;
    Rat deviation;       // |ratio - C|, exact
    double scaled = 0.0;  // deviation * sqrt(p)
};

struct LangWeilReport {
    Int C;
    std::vector<LangWeilRow> rows;
    double max_scaled = 0.0;
};

LangWeilReport langweil_check(const AffineScheme& z, const Int& C,
                              std::vector<unsigned> primes, const Budget& budget = {},
                              unsigned prime_floor = 3);

// CSV export, header: p,k,y,raw_count,singular_count,g_num,g_den,h_num,h_den
// with y serialized as colon-separated residues.
std::string gh_csv_header();
std::string gh_csv_row(const GHRecord& r);

}  // namespace jetcount

#endif
