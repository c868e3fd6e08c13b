#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "nonarch/rational.hpp"

namespace nonarch {

/// Exact element of Q(zeta_{p^m}), the value type of characters and of all
/// integrals. Values are kept in canonical form: exponents live in
/// [0, phi(p^m)) after reduction modulo the p^m-th cyclotomic polynomial
/// (sum_{i=0}^{p-1} zeta^{i p^{m-1}} = 0), and the level m is minimized, so
/// equality is coefficient-wise. Level 0 means a plain rational.
class CycValue {
public:
    CycValue() : p_(0), level_(0) {}

    /*implicit*/ CycValue(const Rational& r) : p_(0), level_(0) {
        if (r != 0) coeffs_[0] = r;
    }
    /*implicit*/ CycValue(long n) : CycValue(Rational(n)) {}

    /// zeta_{p^level}^k scaled by `scale`.
    static CycValue root_of_unity(long p, int level, long k, const Rational& scale = 1) {
        CycValue v;
        if (scale == 0) return v;
        v.p_ = p;
        v.level_ = level;
        long mod = modulus(p, level);
        k %= mod;
        if (k < 0) k += mod;
        v.coeffs_[k] = scale;
        v.canonicalize();
        return v;
    }

    long prime() const { return p_; }
    int level() const { return level_; }
    const std::map<long, Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_rational() const { return level_ == 0; }

    Rational rational_value() const {
        if (!is_rational()) throw Error("CycValue: not rational");
        if (coeffs_.empty()) return 0;
        return coeffs_.begin()->second;
    }

    CycValue operator-() const {
        CycValue v = *this;
        for (auto& [k, c] : v.coeffs_) c = -c;
        return v;
    }

    CycValue& operator+=(const CycValue& o) {
        CycValue rhs = o;
        match_levels(*this, rhs);
        for (const auto& [k, c] : rhs.coeffs_) {
            auto it = coeffs_.find(k);
            if (it == coeffs_.end())
                coeffs_[k] = c;
            else {
                it->second += c;
                if (it->second == 0) coeffs_.erase(it);
            }
        }
        canonicalize();
        return *this;
    }

    CycValue& operator-=(const CycValue& o) { return *this += -o; }

    CycValue& operator*=(const CycValue& o) {
        CycValue rhs = o;
        match_levels(*this, rhs);
        long mod = modulus(p_, level_);
        std::map<long, Rational> prod;
        for (const auto& [ka, ca] : coeffs_)
            for (const auto& [kb, cb] : rhs.coeffs_) {
                long k = (ka + kb) % mod;
                auto it = prod.find(k);
                if (it == prod.end())
                    prod[k] = ca * cb;
                else
                    it->second += ca * cb;
            }
        coeffs_ = std::move(prod);
        canonicalize();
        return *this;
    }

    CycValue& scale_by(const Rational& r) {
        if (r == 0) {
            coeffs_.clear();
            p_ = 0;
            level_ = 0;
            return *this;
        }
        for (auto& [k, c] : coeffs_) c *= r;
        return *this;
    }

    friend CycValue operator+(CycValue a, const CycValue& b) { return a += b; }
    friend CycValue operator-(CycValue a, const CycValue& b) { return a -= b; }
    friend CycValue operator*(CycValue a, const CycValue& b) { return a *= b; }

    bool operator==(const CycValue& o) const {
        return p_ == o.p_ && level_ == o.level_ && coeffs_ == o.coeffs_;
    }
    bool operator!=(const CycValue& o) const { return !(*this == o); }

    /// Complex conjugation, zeta -> zeta^{-1}.
    CycValue conj() const {
        if (level_ == 0) return *this;
        long mod = modulus(p_, level_);
        CycValue v;
        v.p_ = p_;
        v.level_ = level_;
        for (const auto& [k, c] : coeffs_) {
            long kk = k == 0 ? 0 : mod - k;
            auto it = v.coeffs_.find(kk);
            if (it == v.coeffs_.end())
                v.coeffs_[kk] = c;
            else
                it->second += c;
        }
        v.canonicalize();
        return v;
    }

    /// v * conj(v); a totally real value, rational in most computations here.
    CycValue abs_squared() const { return *this * conj(); }

    bool is_real() const { return *this == conj(); }

    /// Numeric image under the embedding zeta -> exp(2 pi i / p^m); for real
    /// values only, used for trend comparisons (never for equality checks).
    long double real_approx() const {
        long double s = 0;
        long mod = level_ == 0 ? 1 : modulus(p_, level_);
        for (const auto& [k, c] : coeffs_) {
            long double cd = static_cast<long double>(numerator(c).convert_to<double>()) /
                             static_cast<long double>(denominator(c).convert_to<double>());
            s += cd * std::cos(2.0L * 3.14159265358979323846264338327950288L *
                               static_cast<long double>(k) / static_cast<long double>(mod));
        }
        return s;
    }

    /// Exact when values are equal or both rational; otherwise numeric with a
    /// loud failure if the gap is below the certification margin.
    static int compare_real(const CycValue& a, const CycValue& b) {
        if (a == b) return 0;
        if (!a.is_real() || !b.is_real()) throw Error("compare_real: non-real value");
        if (a.is_rational() && b.is_rational())
            return a.rational_value() < b.rational_value() ? -1 : 1;
        long double d = a.real_approx() - b.real_approx();
        if (std::abs(d) < 1e-12L)
            throw Error("compare_real: values too close to order numerically");
        return d < 0 ? -1 : 1;
    }

private:
    static long modulus(long p, int level) {
        long m = 1;
        for (int i = 0; i < level; ++i) m *= p;
        return m;
    }

    static void match_levels(CycValue& a, CycValue& b) {
        if (a.p_ == 0 && b.p_ != 0) a.p_ = b.p_;
        if (b.p_ == 0 && a.p_ != 0) b.p_ = a.p_;
        if (a.p_ != b.p_ && a.p_ != 0 && b.p_ != 0)
            throw Error("CycValue: mixing roots of unity for different primes");
        int lvl = std::max(a.level_, b.level_);
        a.raise_to(lvl);
        b.raise_to(lvl);
    }

    void raise_to(int level) {
        if (level_ == level) return;
        long factor = 1;
        for (int i = level_; i < level; ++i) factor *= p_;
        std::map<long, Rational> up;
        for (const auto& [k, c] : coeffs_) up[k * factor] = c;
        coeffs_ = std::move(up);
        level_ = level;
    }

    void canonicalize() {
        if (level_ > 0) {
            long mod = modulus(p_, level_);
            long phi = mod / p_ * (p_ - 1);
            long step = mod / p_;  // p^{m-1}
            // zeta^{phi + j} = -sum_{i=0}^{p-2} zeta^{i*step + j}, 0 <= j < step
            bool changed = true;
            while (changed) {
                changed = false;
                for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
                    if (it->first < phi) break;
                    long k = it->first;
                    Rational c = it->second;
                    coeffs_.erase(k);
                    long j = k - phi;
                    for (long i = 0; i + 1 < p_; ++i) {
                        long kk = i * step + j;
                        auto jt = coeffs_.find(kk);
                        if (jt == coeffs_.end())
                            coeffs_[kk] = -c;
                        else {
                            jt->second += -c;
                            if (jt->second == 0) coeffs_.erase(jt);
                        }
                    }
                    changed = true;
                    break;
                }
            }
        }
        // Minimize the level: a value supported on exponents divisible by p
        // lies in the subfield one level down.
        while (level_ > 0) {
            bool divisible = true;
            for (const auto& [k, c] : coeffs_)
                if (k % p_ != 0) {
                    divisible = false;
                    break;
                }
            if (!divisible) break;
            std::map<long, Rational> down;
            for (const auto& [k, c] : coeffs_) down[k / p_] = c;
            coeffs_ = std::move(down);
            --level_;
        }
        if (level_ == 0) p_ = 0;
    }

    long p_;
    int level_;
    std::map<long, Rational> coeffs_;
};

/// Dense integer-count accumulator for large character sums: counts per raw
/// exponent mod p^level, converted to a CycValue once at the end.
struct ExpCounter {
    long p;
    int level;
    std::vector<long long> counts;

    ExpCounter(long p_, int level_) : p(p_), level(level_) {
        long mod = 1;
        for (int i = 0; i < level; ++i) mod *= p;
        counts.assign(static_cast<size_t>(mod), 0);
    }

    void add(long exponent, long long weight = 1) {
        long mod = static_cast<long>(counts.size());
        long k = exponent % mod;
        if (k < 0) k += mod;
        counts[static_cast<size_t>(k)] += weight;
    }

    void merge(const ExpCounter& o) {
        for (size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    }

    CycValue to_value(const Rational& scale) const {
        CycValue v;
        for (long k = 0; k < static_cast<long>(counts.size()); ++k)
            if (counts[static_cast<size_t>(k)] != 0)
                v += CycValue::root_of_unity(p, level, k,
                                             scale * Rational(counts[static_cast<size_t>(k)]));
        return v;
    }
};

}  // namespace nonarch
