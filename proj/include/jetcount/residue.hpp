#ifndef JETCOUNT_RESIDUE_HPP
#define JETCOUNT_RESIDUE_HPP

#include <vector>

#include "jetcount/common.hpp"
#include "jetcount/poly.hpp"

namespace jetcount {

// Element of Z/p^kZ held as the canonical representative in [0, p^k).
struct ResidueElement {
    Int value;
    Int modulus;
};

ResidueElement make_residue(const Int& value, unsigned p, unsigned k);

// f(point) mod p^k with eager reduction at every step. All point entries
// must share `modulus`.
Int eval_mod(const IntPoly& f, const std::vector<Int>& point, const Int& modulus);
ResidueElement eval_mod(const IntPoly& f, const std::vector<ResidueElement>& point);

// Element of F_p[t]/(t^e): e coefficients in [0, p), constant term first.
class TruncatedSeries {
public:
    TruncatedSeries(unsigned p, unsigned e) : p_(p), coeffs_(e, 0) {
        if (e == 0) throw ValidationError("truncation length must be >= 1");
    }
    TruncatedSeries(unsigned p, std::vector<unsigned> coeffs);

    unsigned p() const { return p_; }
    unsigned length() const { return static_cast<unsigned>(coeffs_.size()); }
    const std::vector<unsigned>& coeffs() const { return coeffs_; }
    bool is_zero() const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scaled(const Int& c) const;
    TruncatedSeries pow(unsigned e) const;

private:
    void check_compatible(const TruncatedSeries& o) const;

    unsigned p_;
    std::vector<unsigned> coeffs_;
};

// f(point) in F_p[t]/(t^e).
TruncatedSeries eval_series(const IntPoly& f, const std::vector<TruncatedSeries>& point);

}  // namespace jetcount

#endif
