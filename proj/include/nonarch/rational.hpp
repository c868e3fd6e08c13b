#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace nonarch {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientPrecisionError : public Error {
public:
    explicit InsufficientPrecisionError(const std::string& what = "insufficient precision")
        : Error(what) {}
};

class DivisionByZeroError : public Error {
public:
    explicit DivisionByZeroError(const std::string& what = "division by zero") : Error(what) {}
};

inline Integer pow_int(long base, long exp) {
    if (exp < 0) throw Error("pow_int: negative exponent");
    Integer r = 1, b = base;
    while (exp > 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

/// q^e for (possibly negative) integer e, as an exact rational.
inline Rational pow_rat(long base, long exp) {
    if (exp >= 0) return Rational(pow_int(base, exp));
    return Rational(1, pow_int(base, -exp));
}

/// p-adic valuation of a nonzero integer.
inline long ord_p(const Integer& n, long p) {
    if (n == 0) throw Error("ord_p: zero");
    Integer m = abs(n);
    long v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

/// p-adic valuation of a nonzero rational.
inline long ord_p(const Rational& r, long p) {
    if (r == 0) throw Error("ord_p: zero");
    return ord_p(numerator(r), p) - ord_p(denominator(r), p);
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational rational_from_string(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw Error("bad rational literal: " + s);
    }
}

}  // namespace nonarch
