#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mindeg {

// Exact arithmetic carriers. mpq_class keeps values canonical (gcd 1,
// positive denominator) through every operation, which is exactly the
// invariant the coefficient layer relies on.
using Integer = mpz_class;
using Rational = mpq_class;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A dual-route identity (map-count routes, kernel routes, pinned-value
// consistency) failed. The CLI maps this to exit code 2.
struct self_check_error : error {
    using error::error;
};

inline Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline Integer binomial(const Integer& n, unsigned long k) {
    Integer r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

inline Integer int_pow(const Integer& b, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Rational rat_pow(const Rational& b, long e) {
    Rational r;
    if (e >= 0) {
        mpz_pow_ui(r.get_num_mpz_t(), b.get_num_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(r.get_den_mpz_t(), b.get_den_mpz_t(), static_cast<unsigned long>(e));
    } else {
        if (b == 0) throw error("rat_pow: zero to negative power");
        mpz_pow_ui(r.get_num_mpz_t(), b.get_den_mpz_t(), static_cast<unsigned long>(-e));
        mpz_pow_ui(r.get_den_mpz_t(), b.get_num_mpz_t(), static_cast<unsigned long>(-e));
    }
    r.canonicalize();
    return r;
}

// Generalized binomial coefficient binom(r, k) = r(r-1)...(r-k+1)/k!
// for rational r; drives (1+g)^r, sqrt and friends.
inline Rational binomial_rat(const Rational& r, unsigned long k) {
    Rational num(1);
    for (unsigned long i = 0; i < k; ++i) num *= r - Rational(static_cast<long>(i));
    return num / Rational(factorial(k));
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const Integer& z) { return z.get_str(); }

// Accepts "p", "p/q", with optional sign; rejects anything else.
inline Rational rational_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw error("bad rational literal: '" + s + "'");
    q.canonicalize();
    return q;
}

}  // namespace mindeg
