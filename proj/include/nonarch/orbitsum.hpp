#pragma once

#include <map>

#include "nonarch/chevalley.hpp"
#include "nonarch/moyprasad.hpp"
#include "nonarch/residue.hpp"

namespace nonarch {

class NotRegularError : public Error {
public:
    explicit NotRegularError(const std::string& what = "element is not regular semisimple")
        : Error(what) {}
};

/// Element of sl2 as coordinates (a, b, c) for a H + b E + c F.
struct LieElement {
    FieldSpec field;
    Element a, b, c;

    static LieElement make(const FieldSpec& f, Element a_, Element b_, Element c_) {
        return LieElement{f, std::move(a_), std::move(b_), std::move(c_)};
    }
    static LieElement from_rationals(const FieldSpec& f, const Rational& a_, const Rational& b_,
                                     const Rational& c_) {
        return {f, Element::from_rational(f, a_), Element::from_rational(f, b_),
                Element::from_rational(f, c_)};
    }

    std::vector<Element> coords() const { return {a, b, c}; }

    long min_ord() const { return std::min({a.ord(), b.ord(), c.ord()}); }
    bool is_zero() const { return a.is_exact_zero() && b.is_exact_zero() && c.is_exact_zero(); }
};

/// <X, Y> = Tr(XY) = 2 aX aY + bX cY + cX bY.
inline Element trace_form(const LieElement& X, const LieElement& Y) {
    Element two = Element::from_integer(X.field, 2);
    return two * (X.a * Y.a) + X.b * Y.c + X.c * Y.b;
}

/// q0 = a^2 + bc, the orbit invariant.
inline Element quadratic_invariant(const LieElement& Y) {
    return Y.a * Y.a + Y.b * Y.c;
}

namespace chartdetail {

/// Square root with the leading digits certified: Newton lifting digit by
/// digit. Returns nullopt when the square class is nontrivial.
inline std::optional<Element> sqrt_digits(const Element& u, int digits) {
    const FieldSpec& f = u.field();
    if (u.is_exact_zero()) return std::nullopt;
    long v = u.ord();
    if (v % 2 != 0) return std::nullopt;
    // leading digit must be a quadratic residue
    long lead = u.ac();
    long root0 = -1;
    for (long r = 1; r < f.p; ++r)
        if ((r * r) % f.p == lead) {
            root0 = r;
            break;
        }
    if (root0 < 0) return std::nullopt;
    // x with x^2 = u to the requested relative precision
    std::vector<long> xd{root0};
    for (int j = 1; j < digits; ++j) {
        // (x + e pi^{v/2 + j})^2 = u  =>  2 x0 e = (u - x^2)/pi^{2(v/2)+j} mod p
        Element x = Element::from_digits(f, v / 2, xd);
        Element diff = u - x * x;  // exact inputs: exact difference or zero
        if (diff.is_exact_zero()) break;  // x is already an exact square root
        long need = v + j;
        if (diff.ord() > need) {
            xd.push_back(0);
            continue;
        }
        if (diff.ord() < need) throw Error("sqrt_digits: lifting failed");
        long dlead = diff.ac();
        // e = dlead / (2 root0) mod p
        long inv = 1;
        long denom = (2 * root0) % f.p;
        for (long c = 1; c < f.p; ++c)
            if ((c * denom) % f.p == 1) {
                inv = c;
                break;
            }
        xd.push_back((dlead * inv) % f.p);
    }
    while (static_cast<int>(xd.size()) < digits) xd.push_back(0);
    return Element::from_digits(f, v / 2, xd, true);
}

inline long digit_at(const Element& e, long pos) { return e.digit(pos); }

}  // namespace chartdetail

/// The mass decomposition of an orbit window: total weights per ambient
/// p^delta-coset, with an exact representative per touched coset. The
/// integral of any f that is constant on p^delta g(O)-cosets over the
/// truncated orbit {min ord >= -window} is then sum over keys of
/// weight * f(rep).
struct OrbitChartSum {
    int window = 0;
    int delta = 1;
    std::map<uint64_t, Rational> weights;
    std::map<uint64_t, LieElement> reps;

    Rational total_mass() const {
        Rational s = 0;
        for (const auto& [k, w] : weights) s += w;
        return s;
    }
};

/// Exact truncated-orbit mass tables for a regular semisimple sl2 element.
///
/// The orbit {a^2 + bc = q0} is split along ord b <= ord c (chart b, with
/// coordinates (a,b) and density |4 q0 / b|) and ord c < ord b (chart c,
/// symmetric). Each chart is enumerated shell by shell with the near-root
/// refinement of ord(q0 - a^2) resolved exactly; around a square root of q0
/// the remaining geometric series is summed in closed form instead of being
/// enumerated.
class OrbitChartEngine {
public:
    OrbitChartEngine(const FieldSpec& f, const Element& q0) : f_(f), q0_(q0) {
        if (q0_.is_exact_zero()) throw NotRegularError();
        q_ = f.p;
        abs4q0_ = pow_rat(q_, -(Element::from_integer(f, 4) * q0_).ord());
        root_ = chartdetail::sqrt_digits(q0_, 40);
    }

    OrbitChartSum run(int window, int delta) const {
        OrbitChartSum out;
        out.window = window;
        out.delta = delta;
        for (int swap = 0; swap < 2; ++swap) {
            Walk walk{*this, window, delta, swap == 1, out};
            walk.top();
        }
        return out;
    }

private:
    struct Walk {
        const OrbitChartEngine& eng;
        int N;
        int delta;
        bool swapped;  // false: primary coordinate is b (off 0); true: c (off 1)
        OrbitChartSum& out;

        const FieldSpec& f() const { return eng.f_; }
        long q() const { return eng.q_; }

        void top() {
            std::vector<long> digits;
            descend(digits, -N, static_cast<long>(delta));
        }

        // enumerate a-digits in positions [-N, t)
        void descend(std::vector<long>& digits, long lo, long t) {
            if (static_cast<long>(digits.size()) < t - lo) {
                for (long d = 0; d < q(); ++d) {
                    digits.push_back(d);
                    descend(digits, lo, t);
                    digits.pop_back();
                }
                return;
            }
            process(digits, lo, t);
        }

        void process(std::vector<long>& digits, long lo, long t) {
            Element a0 = window_value(digits, lo);
            Element g0 = eng.q0_ - a0 * a0;
            long variation = a0.is_exact_zero()
                                 ? 2 * t
                                 : std::min(a0.ord() + t, 2 * t);
            if (!g0.is_exact_zero() && g0.ord() < variation) {
                shell_loop(digits, lo, t, a0, g0);
                return;
            }
            // unresolved: the coset hugs a root of q0 - a^2
            if (eng.root_.has_value() && eng.root_->ord() >= -N) {
                long k = eng.root_->ord();
                long Lmin = std::max({static_cast<long>(delta), k + 1,
                                      2 * static_cast<long>(delta) - k - 1,
                                      static_cast<long>(delta) - k, lo + 1});
                if (t >= Lmin) {
                    int sign = root_coset_sign(digits, lo, t);
                    if (sign != 0) {
                        tail(digits, lo, t, sign);
                        return;
                    }
                }
            }
            if (t - lo > 60) throw Error("orbital: a-refinement did not terminate");
            for (long d = 0; d < q(); ++d) {
                digits.push_back(d);
                process(digits, lo, t + 1);
                digits.pop_back();
            }
        }

        // +1 / -1 when the coset center matches +root / -root mod p^t, else 0
        int root_coset_sign(const std::vector<long>& digits, long lo, long t) const {
            const Element& s = *eng.root_;
            bool plus = true, minus = true;
            Element ms = -s;
            for (long pos = lo; pos < t; ++pos) {
                long d = pos - lo < static_cast<long>(digits.size())
                             ? digits[static_cast<size_t>(pos - lo)]
                             : 0;
                if (s.digit(pos) != d) plus = false;
                if (ms.digit(pos) != d) minus = false;
            }
            if (plus) return 1;
            if (minus) return -1;
            return 0;
        }

        void shell_loop(const std::vector<long>& digits, long lo, long t, const Element& a0,
                        const Element& g0) {
            long lambda = g0.ord();
            long off = swapped ? 1 : 0;
            long j_hi = floor_div(lambda - off, 2);
            j_hi = std::min(j_hi, lambda + N);  // keep ord of the computed coordinate >= -N
            Rational a_measure = pow_rat(q(), -t);
            for (long j = -N; j <= j_hi; ++j) {
                // primary coordinate resolved to absolute depth delta (at least
                // one digit); extra digits when c needs them
                long depth_b = std::max<long>(delta, j + 1);
                long rel = depth_b - j;
                std::vector<long> bd(static_cast<size_t>(rel), 0);
                bd[0] = 1;
                while (true) {
                    Element b0 = Element::from_digits(f(), j, bd);
                    emit(a0, b0, g0, t, j, rel, a_measure);
                    // increment the digit vector (leading digit stays nonzero)
                    size_t i = 0;
                    while (i < bd.size()) {
                        if (++bd[i] < q()) break;
                        bd[i] = i == 0 ? 1 : 0;
                        ++i;
                    }
                    if (i == bd.size()) break;
                }
            }
            (void)digits;
            (void)lo;
        }

        void emit(const Element& a0, const Element& b0, const Element& g0, long t, long j,
                  long rel, const Rational& a_measure) {
            Element c0 = g0 * b0.inv(static_cast<int>(
                             std::max<long>(rel + static_cast<long>(delta), 4)));
            // weight = |4 q0| q^{j} da db with da = q^{-t}, db = q^{-(j+rel)}
            Rational w = eng.abs4q0_ * a_measure * pow_rat(q(), -rel);
            add_key(a0, b0, c0, w);
        }

        void tail(const std::vector<long>& digits, long lo, long t, int sign) {
            // the a-set {a = sign*root mod p^t}; all of it pairs with the
            // p^delta-coset of sign*root in the a-coordinate
            Element s_rep = root_rep(sign);
            long k = eng.root_->ord();
            long off = swapped ? 1 : 0;
            (void)digits;
            (void)lo;
            // resolved primary shells j in [-N, delta)
            Rational a_mass = pow_rat(q(), -t);
            for (long j = -N; j < static_cast<long>(delta); ++j) {
                long rel = static_cast<long>(delta) - j;
                std::vector<long> bd(static_cast<size_t>(rel), 0);
                bd[0] = 1;
                while (true) {
                    Element b0 = Element::from_digits(f(), j, bd);
                    Rational w = eng.abs4q0_ * pow_rat(q(), j) * a_mass * pow_rat(q(), -(j + rel));
                    add_key(s_rep, b0, Element::zero(f()), w);
                    size_t i = 0;
                    while (i < bd.size()) {
                        if (++bd[i] < q()) break;
                        bd[i] = i == 0 ? 1 : 0;
                        ++i;
                    }
                    if (i == bd.size()) break;
                }
            }
            // deep primary shells j in [delta, floor((l+k-off)/2)], summed in
            // closed form over the exact root distance l >= t
            Rational S = lump_sum(t, k, off);
            Rational w = eng.abs4q0_ * (1 - Rational(1, q())) * (1 - Rational(1, q())) * S;
            if (w != 0) add_key(s_rep, Element::zero(f()), Element::zero(f()), w);
        }

        /// sum_{l >= max(L, 2 delta - k + off)} q^{-l} (floor((l+k-off)/2) - delta + 1)
        Rational lump_sum(long L, long k, long off) const {
            long Lstar = std::max(L, 2 * static_cast<long>(delta) - k + off);
            // n(l) = (l + k - off - 2 delta + 2 - eps(l)) / 2, eps = (l+k-off) mod 2
            Rational qq(q());
            Rational G0 = pow_rat(q(), -Lstar) * qq / (qq - 1);
            Rational G1 = pow_rat(q(), -Lstar) * (Rational(Lstar) * qq / (qq - 1) + qq / ((qq - 1) * (qq - 1)));
            // sum of q^{-l} over l >= Lstar with (l + k - off) odd
            long first_odd = Lstar + (((Lstar + k - off) % 2 + 2) % 2 == 1 ? 0 : 1);
            Rational Godd = pow_rat(q(), -first_odd) * qq * qq / (qq * qq - 1);
            Rational A = Rational(k - off - 2 * static_cast<long>(delta) + 2);
            return (G1 + A * G0 - Godd) / 2;
        }

        Element root_rep(int sign) const {
            // exact representative of the root's p^delta-coset
            std::vector<long> ds;
            Element s = sign > 0 ? *eng.root_ : -*eng.root_;
            long k = s.ord();
            for (long pos = k; pos < static_cast<long>(delta); ++pos) ds.push_back(s.digit(pos));
            if (ds.empty()) ds.push_back(0);
            return Element::from_digits(f(), k, ds);
        }

        Element window_value(const std::vector<long>& digits, long lo) const {
            return Element::from_digits(f(), lo, digits);
        }

        void add_key(const Element& a0, const Element& b0, const Element& c0, const Rational& w) {
            // keys are the ambient p^delta-cosets; the chart-c walk swaps the
            // roles of the second and third coordinates back
            const Element& bb = swapped ? c0 : b0;
            const Element& cc = swapped ? b0 : c0;
            uint64_t key = pack(a0, bb, cc);
            auto it = out.weights.find(key);
            if (it == out.weights.end()) {
                out.weights.emplace(key, w);
                out.reps.emplace(key, LieElement{f(), truncate(a0), truncate(bb), truncate(cc)});
            } else {
                it->second += w;
            }
        }

        Element truncate(const Element& e) const {
            std::vector<long> ds;
            for (long pos = -N; pos < static_cast<long>(delta); ++pos) ds.push_back(e.digit(pos));
            Element t = Element::from_digits(f(), -N, ds);
            return t;
        }

        uint64_t pack(const Element& a0, const Element& b0, const Element& c0) const {
            uint64_t key = 0;
            for (const Element* e : {&a0, &b0, &c0})
                for (long pos = -N; pos < static_cast<long>(delta); ++pos)
                    key = key * static_cast<uint64_t>(q()) +
                          static_cast<uint64_t>(e->digit(pos));
            return key;
        }

        static long floor_div(long a, long b) {
            long qd = a / b;
            if ((a % b != 0) && ((a < 0) != (b < 0))) --qd;
            return qd;
        }
    };

    FieldSpec f_;
    Element q0_;
    long q_;
    Rational abs4q0_;
    std::optional<Element> root_;
};

/// Mass tables of the truncated orbit of X (regular semisimple).
inline OrbitChartSum orbit_chart_sum(const LieElement& X, int window, int delta) {
    Element q0 = quadratic_invariant(X);
    if (q0.is_exact_zero()) throw NotRegularError();
    OrbitChartEngine eng(X.field, q0);
    return eng.run(window, delta);
}

}  // namespace nonarch
