#pragma once

#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "nonarch/cyclotomic.hpp"
#include "nonarch/rational.hpp"

namespace nonarch {

enum class FieldChar { zero, positive };

/// Which local field we are working in: Q_p (char zero, uniformizer p) or
/// F_p((t)) (char positive, uniformizer t). Residue degree is fixed to 1.
struct FieldSpec {
    long p = 5;
    FieldChar chr = FieldChar::zero;
    int residue_degree = 1;

    bool operator==(const FieldSpec& o) const {
        return p == o.p && chr == o.chr && residue_degree == o.residue_degree;
    }

    void validate() const {
        if (residue_degree != 1) throw Error("FieldSpec: residue degree must be 1");
        if (p < 2) throw Error("FieldSpec: p must be >= 2");
        for (long d = 2; d * d <= p; ++d)
            if (p % d == 0) throw Error("FieldSpec: p must be prime");
    }
};

inline constexpr long kInfiniteOrd = LONG_MAX;

/// A local-field element known to finite (or infinite) digit precision.
///
/// Three kinds: the exact zero; an exact element (a rational in Q_p, a
/// Laurent polynomial in F_p((t))); or a truncated element: the digit window
/// sum_{i=0}^{m-1} d_i pi^{v+i} with d_0 != 0 plus an unknown tail in
/// p^{v+m}. Arithmetic tracks precision pessimistically and raises
/// InsufficientPrecisionError instead of guessing. Immutable after
/// construction.
class Element {
public:
    Element() : kind_(Kind::exact_zero) {}

    static Element zero(const FieldSpec& f) {
        Element e;
        e.field_ = f;
        e.kind_ = Kind::exact_zero;
        return e;
    }

    static Element from_rational(const FieldSpec& f, const Rational& r) {
        Element e;
        e.field_ = f;
        if (r == 0) {
            e.kind_ = Kind::exact_zero;
            return e;
        }
        if (f.chr == FieldChar::zero) {
            e.kind_ = Kind::exact;
            e.rat_ = r;
            e.val_ = ord_p(r, f.p);
        } else {
            // The image of a rational constant under Z -> F_p.
            Integer num = numerator(r) % f.p;
            Integer den = denominator(r) % f.p;
            if (den == 0) throw Error("from_rational: denominator divisible by p in F_p((t))");
            long n = static_cast<long>(num.convert_to<long>());
            long d = static_cast<long>(den.convert_to<long>());
            long v = ((n % f.p) + f.p) % f.p;
            if (v == 0) {
                e.kind_ = Kind::exact_zero;
                return e;
            }
            long digit = (v * mod_inverse(((d % f.p) + f.p) % f.p, f.p)) % f.p;
            e.kind_ = Kind::exact;
            e.val_ = 0;
            e.digits_ = {digit};
        }
        return e;
    }

    static Element from_integer(const FieldSpec& f, long n) {
        return from_rational(f, Rational(n));
    }

    /// Element with the given digit window; exact means the tail is exactly
    /// zero, otherwise the tail is unknown beyond pi^{val+digits.size()}.
    static Element from_digits(const FieldSpec& f, long val, std::vector<long> digits,
                               bool truncated = false) {
        for (auto& d : digits) {
            d %= f.p;
            if (d < 0) d += f.p;
        }
        // normalize: leading digit nonzero
        size_t lead = 0;
        while (lead < digits.size() && digits[lead] == 0) ++lead;
        if (lead == digits.size()) {
            if (truncated)
                throw InsufficientPrecisionError("all-zero truncated digit window");
            return zero(f);
        }
        val += static_cast<long>(lead);
        digits.erase(digits.begin(), digits.begin() + static_cast<long>(lead));
        if (!truncated) {
            if (f.chr == FieldChar::zero) {
                Rational r = 0;
                for (size_t i = 0; i < digits.size(); ++i)
                    r += Rational(digits[i]) * pow_rat(f.p, val + static_cast<long>(i));
                return from_rational(f, r);
            }
            while (!digits.empty() && digits.back() == 0) digits.pop_back();
            Element e;
            e.field_ = f;
            e.kind_ = Kind::exact;
            e.val_ = val;
            e.digits_ = std::move(digits);
            return e;
        }
        Element e;
        e.field_ = f;
        e.kind_ = Kind::truncated;
        e.val_ = val;
        e.digits_ = std::move(digits);
        return e;
    }

    const FieldSpec& field() const { return field_; }
    bool is_exact_zero() const { return kind_ == Kind::exact_zero; }
    bool is_exact() const { return kind_ != Kind::truncated; }
    bool is_truncated() const { return kind_ == Kind::truncated; }

    /// Valuation; kInfiniteOrd for the exact zero.
    long ord() const {
        if (kind_ == Kind::exact_zero) return kInfiniteOrd;
        return val_;
    }

    /// Leading digit (angular component); 0 iff the element is zero.
    long ac() const {
        if (kind_ == Kind::exact_zero) return 0;
        return digit(val_);
    }

    /// First position at which digits are no longer certified.
    long known_upto() const {
        if (kind_ != Kind::truncated) return kInfiniteOrd;
        return val_ + static_cast<long>(digits_.size());
    }

    /// Digit at position i (coefficient of pi^i); throws past the precision.
    long digit(long i) const {
        switch (kind_) {
            case Kind::exact_zero:
                return 0;
            case Kind::truncated: {
                if (i < val_) return 0;
                if (i >= known_upto())
                    throw InsufficientPrecisionError("digit beyond certified window");
                return digits_[static_cast<size_t>(i - val_)];
            }
            case Kind::exact:
                if (field_.chr == FieldChar::positive) {
                    if (i < val_ || i >= val_ + static_cast<long>(digits_.size())) return 0;
                    return digits_[static_cast<size_t>(i - val_)];
                } else {
                    if (i < val_) return 0;
                    return rational_digit(rat_, field_.p, i);
                }
        }
        return 0;
    }

    /// The exact rational value (char zero, exact elements only).
    const Rational& rational_value() const {
        if (field_.chr != FieldChar::zero) throw Error("rational_value: char-positive element");
        if (kind_ == Kind::truncated) throw InsufficientPrecisionError("truncated element");
        static const Rational kZero = 0;
        return kind_ == Kind::exact_zero ? kZero : rat_;
    }

    /// Value of the certified digit window as an exact rational (char zero).
    Rational known_part_rational() const {
        if (field_.chr != FieldChar::zero) throw Error("known_part_rational: wrong field");
        if (kind_ == Kind::exact_zero) return 0;
        if (kind_ == Kind::exact) return rat_;
        Rational r = 0;
        for (size_t i = 0; i < digits_.size(); ++i)
            r += Rational(digits_[i]) * pow_rat(field_.p, val_ + static_cast<long>(i));
        return r;
    }

    Element operator-() const {
        if (kind_ == Kind::exact_zero) return *this;
        Element e = *this;
        if (field_.chr == FieldChar::zero) {
            if (kind_ == Kind::exact) {
                e.rat_ = -rat_;
                return e;
            }
            // negate the window value, keep the same certified range
            return window_of_rational(field_, -known_part_rational(), val_, known_upto(), true);
        }
        for (auto& d : e.digits_)
            if (d != 0) d = field_.p - d;
        return e;
    }

    friend Element operator+(const Element& a, const Element& b) {
        a.check_same_field(b);
        if (a.kind_ == Kind::exact_zero) return b;
        if (b.kind_ == Kind::exact_zero) return a;
        const FieldSpec& f = a.field_;
        if (f.chr == FieldChar::zero) {
            Rational s = a.known_part_rational() + b.known_part_rational();
            long cap = std::min(a.known_upto(), b.known_upto());
            if (cap == kInfiniteOrd) return from_rational(f, s);
            if (s == 0 || ord_p(s, f.p) >= cap)
                throw InsufficientPrecisionError("addition cancelled all certified digits");
            return window_of_rational(f, s, ord_p(s, f.p), cap, true);
        }
        // char positive: digitwise, no carries
        long lo = std::min(a.val_, b.val_);
        long cap = std::min(a.known_upto(), b.known_upto());
        bool exact = cap == kInfiniteOrd;
        long hi = exact ? std::max(a.val_ + static_cast<long>(a.digits_.size()),
                                   b.val_ + static_cast<long>(b.digits_.size()))
                        : cap;
        std::vector<long> ds;
        ds.reserve(static_cast<size_t>(hi - lo));
        for (long i = lo; i < hi; ++i) ds.push_back((a.digit(i) + b.digit(i)) % f.p);
        return from_digits(f, lo, std::move(ds), !exact);
    }

    friend Element operator-(const Element& a, const Element& b) { return a + (-b); }

    friend Element operator*(const Element& a, const Element& b) {
        a.check_same_field(b);
        if (a.kind_ == Kind::exact_zero || b.kind_ == Kind::exact_zero)
            return zero(a.field_.p != 0 ? a.field_ : b.field_);
        const FieldSpec& f = a.field_;
        bool exact = a.is_exact() && b.is_exact();
        if (f.chr == FieldChar::zero) {
            Rational prod = a.known_part_rational() * b.known_part_rational();
            if (exact) return from_rational(f, prod);
            long cap = std::min(cap_add(a.val_, b.known_upto()), cap_add(b.val_, a.known_upto()));
            return window_of_rational(f, prod, a.val_ + b.val_, cap, true);
        }
        long cap = exact ? kInfiniteOrd
                         : std::min(cap_add(a.val_, b.known_upto()), cap_add(b.val_, a.known_upto()));
        long v = a.val_ + b.val_;
        size_t len = exact ? a.digits_.size() + b.digits_.size() - 1
                           : static_cast<size_t>(cap - v);
        std::vector<long> ds(len, 0);
        for (size_t i = 0; i < a.digits_.size(); ++i)
            for (size_t j = 0; j < b.digits_.size(); ++j)
                if (i + j < len) ds[i + j] = (ds[i + j] + a.digits_[i] * b.digits_[j]) % f.p;
        return from_digits(f, v, std::move(ds), !exact);
    }

    /// Multiplicative inverse. Exact rationals invert exactly; everything
    /// else is certified to `precision` relative digits (or the input's own
    /// relative precision, whichever is smaller).
    Element inv(int precision = kDefaultInvPrecision) const {
        if (kind_ == Kind::exact_zero) throw DivisionByZeroError();
        const FieldSpec& f = field_;
        if (f.chr == FieldChar::zero) {
            if (kind_ == Kind::exact) return from_rational(f, 1 / rat_);
            long m = static_cast<long>(digits_.size());
            Rational r = 1 / known_part_rational();
            // 1/(u(1+e)) with e in p^m O differs from 1/u by relative p^m
            return window_of_rational(f, r, -val_, -val_ + m, true);
        }
        long m = kind_ == Kind::truncated ? static_cast<long>(digits_.size())
                                          : static_cast<long>(precision);
        bool exact_result = kind_ == Kind::exact && digits_.size() == 1;
        // Newton-free digitwise long division: find q with q*this = 1.
        std::vector<long> q(static_cast<size_t>(m), 0);
        std::vector<long> rem(static_cast<size_t>(m), 0);
        rem[0] = 1;
        long lead_inv = mod_inverse(digits_[0], f.p);
        for (long i = 0; i < m; ++i) {
            long qi = (rem[static_cast<size_t>(i)] * lead_inv) % f.p;
            q[static_cast<size_t>(i)] = qi;
            if (qi != 0)
                for (size_t j = 0; j < digits_.size() && i + static_cast<long>(j) < m; ++j) {
                    auto& r = rem[static_cast<size_t>(i) + j];
                    r = ((r - qi * digits_[j]) % f.p + f.p) % f.p;
                }
        }
        return from_digits(f, -val_, std::move(q), !exact_result);
    }

    friend Element operator/(const Element& a, const Element& b) { return a * b.inv(); }

    /// Multiply by pi^e.
    Element shift(long e) const {
        if (kind_ == Kind::exact_zero) return *this;
        Element r = *this;
        r.val_ += e;
        if (field_.chr == FieldChar::zero && kind_ == Kind::exact) r.rat_ = rat_ * pow_rat(field_.p, e);
        return r;
    }

    /// Three-valued equality: certified equal, certified different, unknown.
    friend std::optional<bool> certified_equal(const Element& a, const Element& b) {
        try {
            Element d = a - b;
            return d.is_exact_zero() ? std::optional<bool>(true) : std::optional<bool>(false);
        } catch (const InsufficientPrecisionError&) {
            return std::nullopt;
        }
    }

    static constexpr int kDefaultInvPrecision = 12;

private:
    enum class Kind { exact_zero, exact, truncated };

    static long cap_add(long a, long b) {
        if (a == kInfiniteOrd || b == kInfiniteOrd) return kInfiniteOrd;
        return a + b;
    }

    static long mod_inverse(long a, long p) {
        long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
        while (nr != 0) {
            long q = r / nr;
            long tmp = t - q * nt;
            t = nt;
            nt = tmp;
            tmp = r - q * nr;
            r = nr;
            nr = tmp;
        }
        if (r != 1) throw Error("mod_inverse: not invertible");
        return ((t % p) + p) % p;
    }

    /// Digit at position i of a nonzero rational with p-free denominator
    /// after scaling by p^{-ord}.
    static long rational_digit(const Rational& r, long p, long i) {
        long v = ord_p(r, p);
        if (i < v) return 0;
        // unit part u = r / p^v; digit i of r = digit (i - v) of u
        Rational u = r * pow_rat(p, -v);
        Integer num = numerator(u), den = denominator(u);
        Integer mod = pow_int(p, i - v + 1);
        Integer deninv = invmod_big(den % mod, mod);
        Integer n = ((num % mod) * deninv) % mod;
        if (n < 0) n += mod;
        Integer d = (n / pow_int(p, i - v)) % p;
        return static_cast<long>(d.convert_to<long>());
    }

    static Integer invmod_big(Integer a, const Integer& m) {
        Integer t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
        while (nr != 0) {
            Integer q = r / nr;
            Integer tmp = t - q * nt;
            t = nt;
            nt = tmp;
            tmp = r - q * nr;
            r = nr;
            nr = tmp;
        }
        if (r != 1) throw Error("invmod_big: not invertible");
        return ((t % m) + m) % m;
    }

    static Element window_of_rational(const FieldSpec& f, const Rational& r, long val, long cap,
                                      bool truncated) {
        std::vector<long> ds;
        ds.reserve(static_cast<size_t>(cap - val));
        for (long i = val; i < cap; ++i) ds.push_back(rational_digit(r, f.p, i));
        return from_digits(f, val, std::move(ds), truncated);
    }

    void check_same_field(const Element& o) const {
        if (kind_ != Kind::exact_zero && o.kind_ != Kind::exact_zero && !(field_ == o.field_))
            throw Error("elements from different fields");
    }

    FieldSpec field_{0, FieldChar::zero, 1};
    Kind kind_;
    Rational rat_;
    long val_ = 0;
    std::vector<long> digits_;
};

/// ord and angular component, as a pair (App-B interface of the valued field).
inline std::pair<long, long> ord_ac(const Element& a) { return {a.ord(), a.ac()}; }

/// The fixed additive character with conductor p: on Q_p,
/// Lambda(x) = e^{2 pi i {x/p}_p}; on F_p((t)), Lambda(x) = zeta_p^{c_{-1}+c_0}.
/// Both restrict on the integers to zeta_p^{x mod p}.
inline CycValue character(const Element& a, int level_cap = 16) {
    if (a.is_exact_zero()) return CycValue(Rational(1));
    const FieldSpec& f = a.field();
    long v = a.ord();
    if (f.chr == FieldChar::positive) {
        if (a.is_truncated() && a.known_upto() < 1)
            throw InsufficientPrecisionError("character: digits up to t^0 required");
        long k = (a.digit(-1) + a.digit(0)) % f.p;
        return CycValue::root_of_unity(f.p, 1, k);
    }
    if (v >= 1) return CycValue(Rational(1));
    int level = static_cast<int>(1 - v);
    if (level > level_cap) throw Error("character: level cap exceeded");
    if (a.is_truncated() && a.known_upto() < 1)
        throw InsufficientPrecisionError("character: digits up to p^0 required");
    long k = 0, pw = 1;
    for (long i = v; i <= 0; ++i) {
        k += a.digit(i) * pw;
        pw *= f.p;
    }
    return CycValue::root_of_unity(f.p, level, k);
}

enum class ArithOp { add, mul, neg, inv };

/// Spec-facing dispatcher over the field operations.
inline Element arith(ArithOp op, const Element& a, const Element* b = nullptr) {
    switch (op) {
        case ArithOp::add:
            if (!b) throw Error("arith: add needs two operands");
            return a + *b;
        case ArithOp::mul:
            if (!b) throw Error("arith: mul needs two operands");
            return a * *b;
        case ArithOp::neg:
            return -a;
        case ArithOp::inv:
            return a.inv();
    }
    throw Error("arith: bad op");
}

}  // namespace nonarch
