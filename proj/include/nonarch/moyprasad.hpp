#pragma once

#include <optional>

#include "nonarch/chevalley.hpp"
#include "nonarch/optimal.hpp"

namespace nonarch {

class PointOutsideAlcoveError : public Error {
public:
    explicit PointOutsideAlcoveError(const std::string& what = "point outside the alcove closure")
        : Error(what) {}
};

inline Rational ceil_rational(const Rational& r) {
    Integer num = numerator(r), den = denominator(r);
    Integer q = num / den;  // truncation toward zero
    if (q * den < num) q += 1;
    return Rational(q);
}

inline Rational floor_rational(const Rational& r) {
    Integer num = numerator(r), den = denominator(r);
    Integer q = num / den;
    if (q * den > num) q -= 1;
    return Rational(q);
}

/// Least integer >= r (or > r when strict).
inline long int_threshold(const Rational& r, bool strict) {
    Rational t = strict ? floor_rational(r) + 1 : ceil_rational(r);
    return static_cast<long>(numerator(t).convert_to<long>());
}

/// A Moy-Prasad lattice as a shift per basis line: the line for basis vector
/// v_i is pi^{shift_i} O v_i, and membership is coordinate-wise.
struct LatticeDescription {
    std::vector<std::pair<size_t, long>> shifts;  // (basis index, shift)
    RatVec point;
    Rational level;
    bool strict = false;

    long shift_of(size_t basis_index) const {
        for (const auto& [b, s] : shifts)
            if (b == basis_index) return s;
        throw Error("shift_of: no such basis line");
    }

    /// Haar volume with vol(O^dim) = 1: q^{-sum of shifts}.
    Rational volume(long q) const {
        long total = 0;
        for (const auto& [b, s] : shifts) total += s;
        return pow_rat(q, -total);
    }
};

/// The lattice g_{x,r} (or g_{x,r+} when strict): the torus lines get the
/// least integer >= r (> r), the root line of gradient alpha the least n
/// with alpha(x) + n >= r (> r); only that non-redundant n is kept.
inline LatticeDescription mp_lattice(const ChevalleyModel& model, const Alcove& alcove,
                                     const RatVec& x, const Rational& r, bool strict = false) {
    if (!alcove.contains_closure(x)) throw PointOutsideAlcoveError();
    LatticeDescription L;
    L.point = x;
    L.level = r;
    L.strict = strict;
    for (size_t b = 0; b < model.dim(); ++b) {
        if (model.basis[b].kind == BasisLine::Kind::torus) {
            L.shifts.emplace_back(b, int_threshold(r, strict));
        } else {
            Rational ax = model.root_value(b, x);
            L.shifts.emplace_back(b, int_threshold(r - ax, strict));
        }
    }
    return L;
}

/// Coordinate-wise membership test; exact whenever the coordinate valuations
/// are certified (they always are for well-formed elements).
inline bool lattice_member(const std::vector<Element>& coords, const LatticeDescription& L) {
    for (const auto& [b, s] : L.shifts) {
        long v = coords[b].ord();
        if (v != kInfiniteOrd && v < s) return false;
    }
    return true;
}

inline bool lattice_member(const Matrix& Y, const ChevalleyModel& model,
                           const LatticeDescription& L, const FieldSpec& f) {
    return lattice_member(model.from_matrix(Y, f), L);
}

/// Depth-r subgroup membership for SL-type models at r > 0, via
/// g - 1 = s I + X0 with s on the central line (threshold as the torus) and
/// X0 in g_{x,r}. Equivalent to the generator description for these models;
/// the generator route stays in the tests as the oracle.
inline bool group_member(const Matrix& g, const ChevalleyModel& model, const Alcove& alcove,
                         const RatVec& x, const Rational& r, const FieldSpec& f) {
    if (r <= 0) throw Error("group_member: r must be > 0");
    if (model.id != "sl2") throw Error("group_member: only sl2 in v1");
    Element det = g.at(0, 0) * g.at(1, 1) - g.at(0, 1) * g.at(1, 0);
    auto det_ok = certified_equal(det, Element::from_integer(f, 1));
    if (!det_ok.has_value()) throw InsufficientPrecisionError("group_member: det undecided");
    if (!*det_ok) throw Error("group_member: determinant is not 1");

    Element one = Element::from_integer(f, 1);
    Element half = Element::from_rational(f, Rational(1, 2));
    Element w00 = g.at(0, 0) - one, w11 = g.at(1, 1) - one;
    Element s = (w00 + w11) * half;                    // central component
    std::vector<Element> X0{(w00 - w11) * half, g.at(0, 1), g.at(1, 0)};

    LatticeDescription L = mp_lattice(model, alcove, x, r, false);
    long torus_shift = int_threshold(r, false);
    long sv = s.ord();
    if (sv != kInfiniteOrd && sv < torus_shift) return false;
    return lattice_member(X0, L);
}

/// Depth of a nonzero element: the largest r with Y in g_r, computed from
/// the Newton slopes of the characteristic polynomial of ad(Y). For sl2 this
/// is ord(a^2 + bc)/2. Nilpotent elements lie in every g_r; they get the
/// unbounded marker instead of a value.
struct DepthResult {
    bool nilpotent = false;  // depth >= every tested level
    Rational value;          // meaningful when !nilpotent
};

/// Elementary symmetric functions e_1..e_d of the eigenvalues of ad(Y),
/// via exact power sums and Newton's identities. The characteristic
/// polynomial is det(tI - ad Y) = sum_k (-1)^k e_k t^{d-k}.
inline std::vector<Element> adjoint_elementary_symmetric(const std::vector<Element>& Y,
                                                         const ChevalleyModel& model,
                                                         const FieldSpec& f) {
    auto M = model.ad(Y, f);
    const size_t d = model.dim();
    std::vector<std::vector<Element>> Mk = M;
    std::vector<Element> traces;  // power sums tr(M^k)
    for (size_t k = 1; k <= d; ++k) {
        Element t = Element::zero(f);
        for (size_t i = 0; i < d; ++i) t = t + Mk[i][i];
        traces.push_back(t);
        if (k == d) break;
        std::vector<std::vector<Element>> next(d, std::vector<Element>(d, Element::zero(f)));
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j)
                for (size_t l = 0; l < d; ++l)
                    if (!Mk[i][l].is_exact_zero() && !M[l][j].is_exact_zero())
                        next[i][j] = next[i][j] + Mk[i][l] * M[l][j];
        Mk = std::move(next);
    }
    std::vector<Element> e(d + 1, Element::zero(f));
    e[0] = Element::from_integer(f, 1);
    for (size_t k = 1; k <= d; ++k) {
        Element acc = Element::zero(f);
        long sign = 1;
        for (size_t i = 1; i <= k; ++i) {
            Element term = e[k - i] * traces[i - 1];
            acc = sign > 0 ? acc + term : acc - term;
            sign = -sign;
        }
        e[k] = acc * Element::from_rational(f, Rational(1, static_cast<long>(k)));
    }
    return e;
}

inline DepthResult depth(const std::vector<Element>& Y, const ChevalleyModel& model,
                         const FieldSpec& f) {
    bool all_zero = true;
    for (const auto& c : Y) all_zero &= c.is_exact_zero();
    if (all_zero) throw Error("depth: zero element");

    const size_t d = model.dim();
    std::vector<Element> e = adjoint_elementary_symmetric(Y, model, f);

    DepthResult res;
    bool found = false;
    for (size_t k = 1; k <= d; ++k) {
        if (e[k].is_exact_zero()) continue;
        Rational slope = Rational(e[k].ord()) / Rational(static_cast<long>(k));
        if (!found || slope < res.value) {
            res.value = slope;
            found = true;
        }
    }
    res.nilpotent = !found;
    return res;
}

/// depth(Y) >= r, with nilpotent elements in every g_r.
inline bool in_g_domain(const std::vector<Element>& Y, const ChevalleyModel& model,
                        const FieldSpec& f, const Rational& r) {
    DepthResult d = depth(Y, model, f);
    return d.nilpotent || d.value >= r;
}

}  // namespace nonarch
