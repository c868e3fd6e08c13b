#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nonarch/field.hpp"

namespace nonarch {

/// Arithmetic in O/p^k on packed machine words. Values are stored as
/// sum d_i p^i with digits d_i < p regardless of characteristic; addition
/// and multiplication carry in Z/p^k and are carry-free in F_p[t]/t^k.
class ResidueRing {
public:
    ResidueRing(long p, int k, FieldChar chr) : p_(p), k_(k), chr_(chr) {
        if (k > kMaxDigits) throw Error("ResidueRing: too many digits");
        mod_ = 1;
        for (int i = 0; i < k; ++i) {
            mod_ *= static_cast<uint64_t>(p);
            if (mod_ > (uint64_t{1} << 40)) throw Error("ResidueRing: modulus too large");
        }
        pow_.resize(static_cast<size_t>(k) + 1);
        pow_[0] = 1;
        for (int i = 1; i <= k; ++i) pow_[static_cast<size_t>(i)] = pow_[static_cast<size_t>(i - 1)] * static_cast<uint64_t>(p);
    }

    long p() const { return p_; }
    int k() const { return k_; }
    FieldChar characteristic() const { return chr_; }
    uint64_t size() const { return mod_; }

    uint64_t from_long(long n) const {
        if (chr_ == FieldChar::zero) {
            long m = static_cast<long>(mod_);
            return static_cast<uint64_t>(((n % m) + m) % m);
        }
        // digit image of the integer under Z -> F_p, a constant polynomial
        long r = ((n % p_) + p_) % p_;
        return static_cast<uint64_t>(r);
    }

    uint64_t add(uint64_t a, uint64_t b) const {
        if (chr_ == FieldChar::zero) {
            uint64_t s = a + b;
            return s >= mod_ ? s - mod_ : s;
        }
        uint64_t out = 0;
        for (int i = 0; i < k_; ++i) {
            uint64_t da = (a / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_);
            uint64_t db = (b / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_);
            out += ((da + db) % static_cast<uint64_t>(p_)) * pow_[static_cast<size_t>(i)];
        }
        return out;
    }

    uint64_t neg(uint64_t a) const {
        if (chr_ == FieldChar::zero) return a == 0 ? 0 : mod_ - a;
        uint64_t out = 0;
        for (int i = 0; i < k_; ++i) {
            uint64_t d = (a / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_);
            if (d != 0) out += (static_cast<uint64_t>(p_) - d) * pow_[static_cast<size_t>(i)];
        }
        return out;
    }

    uint64_t sub(uint64_t a, uint64_t b) const { return add(a, neg(b)); }

    uint64_t mul(uint64_t a, uint64_t b) const {
        if (chr_ == FieldChar::zero)
            return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % mod_);
        uint64_t acc[kMaxDigits] = {0};
        for (int i = 0; i < k_; ++i) {
            uint64_t da = (a / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_);
            if (da == 0) continue;
            for (int j = 0; i + j < k_; ++j) {
                uint64_t db = (b / pow_[static_cast<size_t>(j)]) % static_cast<uint64_t>(p_);
                if (db != 0) acc[i + j] = (acc[i + j] + da * db) % static_cast<uint64_t>(p_);
            }
        }
        uint64_t out = 0;
        for (int i = 0; i < k_; ++i) out += acc[i] * pow_[static_cast<size_t>(i)];
        return out;
    }

    bool is_unit(uint64_t a) const { return a % static_cast<uint64_t>(p_) != 0; }

    uint64_t inv(uint64_t a) const {
        if (!is_unit(a)) throw Error("ResidueRing: non-unit inverse");
        if (chr_ == FieldChar::zero) {
            // extended Euclid mod p^k
            long m = static_cast<long>(mod_);
            long t = 0, nt = 1, r = m, nr = static_cast<long>(a);
            while (nr != 0) {
                long q = r / nr;
                long tmp = t - q * nt;
                t = nt;
                nt = tmp;
                tmp = r - q * nr;
                r = nr;
                nr = tmp;
            }
            return static_cast<uint64_t>(((t % m) + m) % m);
        }
        // power series inverse, digit by digit
        uint64_t lead = a % static_cast<uint64_t>(p_);
        uint64_t lead_inv = 1;
        for (uint64_t c = 1; c < static_cast<uint64_t>(p_); ++c)
            if ((c * lead) % static_cast<uint64_t>(p_) == 1) {
                lead_inv = c;
                break;
            }
        uint64_t q = 0;
        uint64_t rem = 1;  // want q*a = 1
        for (int i = 0; i < k_; ++i) {
            uint64_t ri = (rem / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_);
            uint64_t qi = (ri * lead_inv) % static_cast<uint64_t>(p_);
            if (qi != 0) {
                q += qi * pow_[static_cast<size_t>(i)];
                // rem -= qi * t^i * a
                uint64_t shifted = 0;
                for (int j = 0; i + j < k_; ++j) {
                    uint64_t dj = (a / pow_[static_cast<size_t>(j)]) % static_cast<uint64_t>(p_);
                    shifted += ((qi * dj) % static_cast<uint64_t>(p_)) * pow_[static_cast<size_t>(i + j)];
                }
                rem = sub(rem, shifted);
            }
        }
        return q;
    }

    long digit(uint64_t a, int i) const {
        return static_cast<long>((a / pow_[static_cast<size_t>(i)]) % static_cast<uint64_t>(p_));
    }

    /// Reduce to O/p^j for j <= k.
    uint64_t project(uint64_t a, int j) const { return a % pow_[static_cast<size_t>(j)]; }

    uint64_t power_of_p(int i) const { return pow_[static_cast<size_t>(i)]; }

private:
    static constexpr int kMaxDigits = 24;

    long p_;
    int k_;
    FieldChar chr_;
    uint64_t mod_;
    std::vector<uint64_t> pow_;
};

/// sl2 coordinates (a, b, c) packed into one word per coordinate.
struct RingVec3 {
    uint64_t a, b, c;
    bool operator==(const RingVec3& o) const { return a == o.a && b == o.b && c == o.c; }
};

/// Ad(k) for k = [[x,y],[z,w]] acting on packed coordinates.
inline RingVec3 ring_adjoint(const ResidueRing& R, uint64_t x, uint64_t y, uint64_t z, uint64_t w,
                             const RingVec3& v) {
    uint64_t xw = R.mul(x, w), yz = R.mul(y, z);
    uint64_t a2 = R.add(R.mul(v.a, R.add(xw, yz)),
                        R.sub(R.mul(v.c, R.mul(w, y)), R.mul(v.b, R.mul(x, z))));
    uint64_t b2 = R.sub(R.sub(R.mul(v.b, R.mul(x, x)), R.mul(v.c, R.mul(y, y))),
                        R.mul(R.from_long(2), R.mul(v.a, R.mul(x, y))));
    uint64_t c2 = R.add(R.sub(R.mul(v.c, R.mul(w, w)), R.mul(v.b, R.mul(z, z))),
                        R.mul(R.from_long(2), R.mul(v.a, R.mul(z, w))));
    return {a2, b2, c2};
}

/// Trace-form pairing 2 a1 a2 + b1 c2 + c1 b2 in the ring.
inline uint64_t ring_pairing(const ResidueRing& R, const RingVec3& u, const RingVec3& v) {
    return R.add(R.mul(R.from_long(2), R.mul(u.a, v.a)),
                 R.add(R.mul(u.b, v.c), R.mul(u.c, v.b)));
}

/// Enumerate SL2(O/p^k): (x,y,z,w) with xw - yz = 1. The visitor receives
/// each element exactly once.
template <typename Visit>
void enumerate_sl2(const ResidueRing& R, Visit&& visit) {
    const uint64_t n = R.size();
    // case x unit: y, z free, w = (1 + y z) / x
    for (uint64_t x = 0; x < n; ++x) {
        if (!R.is_unit(x)) continue;
        uint64_t xinv = R.inv(x);
        for (uint64_t y = 0; y < n; ++y)
            for (uint64_t z = 0; z < n; ++z) {
                uint64_t w = R.mul(R.add(R.from_long(1), R.mul(y, z)), xinv);
                visit(x, y, z, w);
            }
    }
    // case x non-unit: need y z = x w - 1, a unit, so y unit; z determined
    for (uint64_t x = 0; x < n; ++x) {
        if (R.is_unit(x)) continue;
        for (uint64_t y = 0; y < n; ++y) {
            if (!R.is_unit(y)) continue;
            uint64_t yinv = R.inv(y);
            for (uint64_t w = 0; w < n; ++w) {
                uint64_t z = R.mul(R.sub(R.mul(x, w), R.from_long(1)), yinv);
                visit(x, y, z, w);
            }
        }
    }
}

/// Orbit of a coordinate vector under SL2(O/p^k), by breadth-first closure
/// under the elementary generators (they generate SL2 over these rings).
inline std::vector<RingVec3> sl2_orbit(const ResidueRing& R, const RingVec3& start) {
    const uint64_t n = R.size();
    auto pack = [&](const RingVec3& v) { return (v.a * n + v.b) * n + v.c; };
    std::unordered_set<uint64_t> seen;
    std::vector<RingVec3> orbit{start};
    seen.insert(pack(start));
    seen.reserve(1 << 20);
    uint64_t one = R.from_long(1), zero = 0;
    std::vector<std::array<uint64_t, 4>> gens;
    gens.push_back({one, one, zero, one});            // upper elementary
    gens.push_back({one, zero, one, one});            // lower elementary
    gens.push_back({one, R.neg(one), zero, one});
    gens.push_back({one, zero, R.neg(one), one});
    for (size_t head = 0; head < orbit.size(); ++head) {
        RingVec3 v = orbit[head];
        for (const auto& g : gens) {
            RingVec3 w = ring_adjoint(R, g[0], g[1], g[2], g[3], v);
            if (seen.insert(pack(w)).second) orbit.push_back(w);
        }
    }
    return orbit;
}

}  // namespace nonarch
