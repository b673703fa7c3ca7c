#include "jetcount/residue.hpp"

namespace jetcount {

ResidueElement make_residue(const Int& value, unsigned p, unsigned k) {
    require_prime(p);
    if (k == 0) throw ValidationError("modulus exponent must be >= 1");
    Int m = int_pow(p, k);
    return ResidueElement{mod_floor(value, m), m};
}

Int eval_mod(const IntPoly& f, const std::vector<Int>& point, const Int& modulus) {
    if (point.size() != f.vars().size())
        throw ValidationError("point arity mismatch in eval_mod");
    if (modulus <= 0) throw ValidationError("modulus must be positive");
    Int acc = 0;
    Int t, pw;
    for (const auto& [e, c] : f.terms()) {
        t = mod_floor(c, modulus);
        for (std::size_t i = 0; i < e.size() && t != 0; ++i) {
            if (e[i] == 0) continue;
            mpz_powm_ui(pw.get_mpz_t(), point[i].get_mpz_t(), e[i], modulus.get_mpz_t());
            t = mod_floor(t * pw, modulus);
        }
        acc = mod_floor(acc + t, modulus);
    }
    return acc;
}

ResidueElement eval_mod(const IntPoly& f, const std::vector<ResidueElement>& point) {
    if (point.empty())
        throw ValidationError("cannot infer the modulus from an empty point");
    const Int& m = point.front().modulus;
    std::vector<Int> values;
    values.reserve(point.size());
    for (const auto& r : point) {
        if (r.modulus != m)
            throw ValidationError("modulus mismatch among eval_mod inputs");
        values.push_back(r.value);
    }
    return ResidueElement{eval_mod(f, values, m), m};
}

TruncatedSeries::TruncatedSeries(unsigned p, std::vector<unsigned> coeffs)
    : p_(p), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ValidationError("truncation length must be >= 1");
    for (unsigned c : coeffs_)
        if (c >= p_) throw ValidationError("series coefficient out of range");
}

bool TruncatedSeries::is_zero() const {
    for (unsigned c : coeffs_)
        if (c != 0) return false;
    return true;
}

void TruncatedSeries::check_compatible(const TruncatedSeries& o) const {
    if (p_ != o.p_ || coeffs_.size() != o.coeffs_.size())
        throw ValidationError("truncated series ring mismatch");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r(p_, length());
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        r.coeffs_[i] = (coeffs_[i] + o.coeffs_[i]) % p_;
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r(p_, length());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; i + j < coeffs_.size(); ++j) {
            unsigned long prod = static_cast<unsigned long>(coeffs_[i]) * o.coeffs_[j];
            r.coeffs_[i + j] = static_cast<unsigned>((r.coeffs_[i + j] + prod) % p_);
        }
    }
    return r;
}

TruncatedSeries TruncatedSeries::scaled(const Int& c) const {
    Int cm = mod_floor(c, Int(p_));
    unsigned long cv = cm.get_ui();
    TruncatedSeries r(p_, length());
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        r.coeffs_[i] = static_cast<unsigned>((coeffs_[i] * cv) % p_);
    return r;
}

TruncatedSeries TruncatedSeries::pow(unsigned e) const {
    TruncatedSeries r(p_, length());
    r.coeffs_[0] = 1 % p_;
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
}

TruncatedSeries eval_series(const IntPoly& f, const std::vector<TruncatedSeries>& point) {
    if (point.size() != f.vars().size())
        throw ValidationError("point arity mismatch in eval_series");
    if (point.empty()) throw ValidationError("eval_series needs at least one variable");
    unsigned p = point.front().p();
    unsigned e = point.front().length();
    TruncatedSeries acc(p, e);
    std::vector<unsigned> one(e, 0);
    one[0] = 1 % p;
    for (const auto& [expo, c] : f.terms()) {
        TruncatedSeries prod(p, one);
        for (std::size_t i = 0; i < expo.size(); ++i)
            if (expo[i] != 0) prod = prod * point[i].pow(expo[i]);
        acc = acc + prod.scaled(c);
    }
    return acc;
}

}  // namespace jetcount
