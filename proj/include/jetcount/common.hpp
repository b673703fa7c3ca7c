#ifndef JETCOUNT_COMMON_HPP
#define JETCOUNT_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace jetcount {

using Int = mpz_class;
using Rat = mpq_class;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Syntax errors in any of the text formats. `position` is a byte offset
// into the parsed text (or a line number for line-oriented formats).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Thrown when an operation would exceed its work budget. `required` is the
// estimated (or consumed-so-far) work, `allowed` the configured limit.
class BudgetError : public Error {
public:
    BudgetError(const Int& required, std::uint64_t allowed)
        : Error("work budget exceeded: required " + required.get_str() +
                " evaluation steps, allowed " + std::to_string(allowed)),
          required_(required), allowed_(allowed) {}
    const Int& required() const { return required_; }
    std::uint64_t allowed() const { return allowed_; }

private:
    Int required_;
    std::uint64_t allowed_;
};

struct Budget {
    std::uint64_t limit = 100000000;  // evaluation steps
};

inline bool is_prime(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline void require_prime(unsigned long p) {
    if (!is_prime(p))
        throw ValidationError(std::to_string(p) + " is not prime");
}

inline Int int_pow(const Int& base, unsigned long exp) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline Int int_pow(unsigned long base, unsigned long exp) {
    return int_pow(Int(base), exp);
}

// Floor modulus: result always in [0, m) for m > 0.
inline Int mod_floor(const Int& a, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

// q^e for rational q != 0 and signed integer e.
inline Rat rat_pow(const Rat& q, long e) {
    if (e == 0) return Rat(1);
    Rat r;
    unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(r.get_num().get_mpz_t(), q.get_num().get_mpz_t(), mag);
    mpz_pow_ui(r.get_den().get_mpz_t(), q.get_den().get_mpz_t(), mag);
    r.canonicalize();
    if (e < 0) return Rat(1) / r;
    return r;
}

inline Rat rat_pow(const Rat& q, const Int& e) {
    if (!e.fits_slong_p())
        throw Error("exponent too large: " + e.get_str());
    return rat_pow(q, e.get_si());
}

}  // namespace jetcount

#endif
