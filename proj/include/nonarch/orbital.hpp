#pragma once

#include <functional>

#include "nonarch/integrate.hpp"
#include "nonarch/orbitsum.hpp"

namespace nonarch {

class NotStabilizedError : public Error {
public:
    explicit NotStabilizedError(const std::string& what = "window sums did not stabilize")
        : Error(what) {}
};

class SupportNotCertifiedError : public Error {
public:
    explicit SupportNotCertifiedError(const std::string& what =
                                          "kernel support not certified on the tested shells")
        : Error(what) {}
};

namespace orbdetail {
inline const ChevalleyModel& sl2_model() {
    static const ChevalleyModel m = ChevalleyModel::sl2();
    return m;
}
}  // namespace orbdetail

/// Coefficient of t^1 in det(tI - ad Y) on the adjoint representation; for
/// sl2 this equals -4(a^2 + bc).
inline Element discriminant(const LieElement& Y) {
    auto e = adjoint_elementary_symmetric(Y.coords(), orbdetail::sl2_model(), Y.field);
    return e[2];
}

enum class ElementClass { regular_semisimple, nilpotent_nonzero, zero, undecided };

inline ElementClass classify(const LieElement& Y) {
    try {
        Element q0 = quadratic_invariant(Y);
        if (!q0.is_exact_zero()) return ElementClass::regular_semisimple;
        return Y.is_zero() ? ElementClass::zero : ElementClass::nilpotent_nonzero;
    } catch (const InsufficientPrecisionError&) {
        return ElementClass::undecided;
    }
}

inline DepthResult lie_depth(const LieElement& Y) {
    return depth(Y.coords(), orbdetail::sl2_model(), Y.field);
}

// ---------------------------------------------------------------------------
// the eta kernel

namespace orbdetail {

/// Integral ring coordinates of pi^{-v} Z at the given depth; throws when
/// the digits are not certified that far.
inline RingVec3 ring_coords(const ResidueRing& R, const LieElement& Z, long v) {
    auto conv = [&](const Element& e) -> uint64_t {
        uint64_t out = 0;
        for (int i = R.k() - 1; i >= 0; --i)
            out = out * static_cast<uint64_t>(R.p()) +
                  static_cast<uint64_t>(e.digit(v + i));
        return out;
    };
    return {conv(Z.a), conv(Z.b), conv(Z.c)};
}

/// Lambda(pi^{v} u) for integral u given mod p^{level}, level = 1 - v >= 1:
/// the exponent of the level-p^{level} root of unity.
inline long character_exponent(const ResidueRing& R, uint64_t u, long v, int level) {
    if (R.characteristic() == FieldChar::zero)
        return static_cast<long>(R.project(u, level));
    // zeta_p^{c_{-1} + c_0} with x = t^v u: positions -1-v and -v of x
    long e = R.digit(u, static_cast<int>(level - 1));
    if (level >= 2) e += R.digit(u, static_cast<int>(level - 2));
    (void)v;
    return e % R.p();
}

inline long sl2_group_size_exponent(int m) { return 3 * m - 2; }

}  // namespace orbdetail

/// eta(X, Y, m): the average of Lambda(<Ad(k)X, Y>) over SL2(O/p^m) with
/// exact lifts; independent of the lifts once m >= max(1, 1 - vX - vY).
inline CycValue eta(const LieElement& X, const LieElement& Y, int m) {
    const FieldSpec& f = X.field;
    if (X.is_zero() || Y.is_zero()) return CycValue(Rational(1));
    long vX = X.min_ord(), vY = Y.min_ord();
    long mstar = std::max<long>(1, 1 - vX - vY);
    if (m < mstar) throw Error("eta: depth below the certified sufficiency bound");

    ResidueRing R(f.p, m, f.chr);
    RingVec3 X0 = orbdetail::ring_coords(R, X, vX);
    RingVec3 Y0 = orbdetail::ring_coords(R, Y, vY);
    long v = vX + vY;
    int level = static_cast<int>(std::max<long>(0, 1 - v));
    if (v >= 1 || level == 0) return CycValue(Rational(1));
    if (level > m) throw Error("eta: level exceeds ring depth");

    ExpCounter counter(f.p, level);
    enumerate_sl2(R, [&](uint64_t x, uint64_t y, uint64_t z, uint64_t w) {
        RingVec3 W = ring_adjoint(R, x, y, z, w, X0);
        uint64_t arg = ring_pairing(R, W, Y0);
        counter.add(orbdetail::character_exponent(R, arg, v, level));
    });
    Rational group_size =
        pow_rat(f.p, orbdetail::sl2_group_size_exponent(m)) * Rational(f.p * f.p - 1);
    return counter.to_value(1 / group_size);
}

/// eta truncated by the depth-r domain: eta when depth(Y) >= r (nilpotent
/// elements lie in every g_r), zero otherwise.
inline CycValue eta_r(const LieElement& X, const LieElement& Y, const Rational& r, int m) {
    if (!Y.is_zero()) {
        DepthResult d = lie_depth(Y);
        if (!d.nilpotent && d.value < r) return CycValue();
    }
    return eta(X, Y, m);
}

/// The function Z -> eta~_Y(Z) = avg_k Lambda(<Ad(k)Y, Z>), evaluated through
/// the pushforward of the K-orbit of Y mod p^level; exact by orbit-stabilizer
/// uniformity. Orbit lists are cached per level.
class EtaKernel {
public:
    EtaKernel(const LieElement& Y, int level_cap = 4) : Y_(Y), cap_(level_cap) {
        if (Y.is_zero()) throw Error("EtaKernel: zero element");
        vY_ = Y.min_ord();
    }

    const LieElement& base() const { return Y_; }

    CycValue value_at(const LieElement& Z) const {
        if (Z.is_zero()) return CycValue(Rational(1));
        long vZ = Z.min_ord();
        long v = vY_ + vZ;
        if (v >= 1) return CycValue(Rational(1));
        int level = static_cast<int>(1 - v);
        if (level > cap_)
            throw SupportNotCertifiedError("eta kernel: level budget exceeded at a deep shell");
        const auto& [ring, orbit] = orbit_at(level);
        RingVec3 Z0 = orbdetail::ring_coords(*ring, Z, vZ);
        ExpCounter counter(Y_.field.p, level);
        for (const RingVec3& W : orbit) {
            uint64_t arg = ring_pairing(*ring, W, Z0);
            counter.add(orbdetail::character_exponent(*ring, arg, v, level));
        }
        return counter.to_value(Rational(1, static_cast<long>(orbit.size())));
    }

private:
    using Entry = std::pair<std::unique_ptr<ResidueRing>, std::vector<RingVec3>>;

    const Entry& orbit_at(int level) const {
        auto it = orbits_.find(level);
        if (it != orbits_.end()) return it->second;
        auto ring = std::make_unique<ResidueRing>(Y_.field.p, level, Y_.field.chr);
        RingVec3 Y0 = orbdetail::ring_coords(*ring, Y_, vY_);
        auto orbit = sl2_orbit(*ring, Y0);
        auto [jt, ok] = orbits_.emplace(level, Entry{std::move(ring), std::move(orbit)});
        return jt->second;
    }

    LieElement Y_;
    int cap_;
    long vY_ = 0;
    mutable std::map<int, Entry> orbits_;
};

// ---------------------------------------------------------------------------
// orbit charts and orbital integrals

/// One chart of the orbit of X: on {b != 0}, coordinates (a, b) with
/// c = (q0 - a^2)/b and symplectic density 4 q0 / b; the {c != 0} chart is
/// the mirror image.
struct OrbitChart {
    LieElement base;
    Element q0;
    enum class Id { b_nonzero, c_nonzero } id;

    Element density_at(const LieElement& Z) const {
        const Element& denom = id == Id::b_nonzero ? Z.b : Z.c;
        if (denom.is_exact_zero()) throw Error("OrbitChart: point off the chart");
        return Element::from_integer(base.field, 4) * q0 * denom.inv();
    }
};

inline OrbitChart orbit_chart(const LieElement& X, OrbitChart::Id id = OrbitChart::Id::b_nonzero) {
    if (classify(X) != ElementClass::regular_semisimple) throw NotRegularError();
    return OrbitChart{X, quadratic_invariant(X), id};
}

/// Integral of f over the orbit of X truncated to {min ord >= -window},
/// with the symplectic measure. f must be constant on ambient
/// p^delta-cosets.
struct OrbitalValue {
    CycValue value;
    int window = 0;
    bool stabilized = false;  // value at window and window+1 agree
};

inline CycValue orbital_sum_apply(const OrbitChartSum& sum,
                                  const std::function<CycValue(const LieElement&)>& f) {
    CycValue acc;
    for (const auto& [key, w] : sum.weights) {
        CycValue v = f(sum.reps.at(key));
        v.scale_by(w);
        acc += v;
    }
    return acc;
}

inline OrbitalValue orbital_integral(const LieElement& X,
                                     const std::function<CycValue(const LieElement&)>& f,
                                     int delta, int window, bool check_stability = true) {
    OrbitalValue out;
    out.window = window;
    out.value = orbital_sum_apply(orbit_chart_sum(X, window, delta), f);
    if (check_stability) {
        CycValue wider = orbital_sum_apply(orbit_chart_sum(X, window + 1, delta), f);
        out.stabilized = wider == out.value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fourier transforms of test functions (separable tables)

/// One-dimensional coset table: values on the cosets of p^depth inside
/// pi^{val_lo} O, zero outside.
struct OneDimTable {
    long val_lo = 0;
    int depth = 1;
    std::vector<CycValue> values;  // indexed by digits little-endian

    size_t size() const { return values.size(); }

    static size_t expected(long p, long val_lo, int depth) {
        size_t n = 1;
        for (long i = val_lo; i < depth; ++i) n *= static_cast<size_t>(p);
        return n;
    }
};

/// Separable test function f(a H + b E + c F) = fa(a) fb(b) fc(c).
struct SeparableFunction {
    std::string name;
    OneDimTable fa, fb, fc;

    CycValue at(const FieldSpec& f, const LieElement& Z) const {
        return lookup(f, fa, Z.a) * lookup(f, fb, Z.b) * lookup(f, fc, Z.c);
    }

    static CycValue lookup(const FieldSpec& f, const OneDimTable& t, const Element& x) {
        if (!x.is_exact_zero() && x.ord() < t.val_lo) return CycValue();
        size_t idx = 0, scale = 1;
        for (long pos = t.val_lo; pos < t.depth; ++pos) {
            idx += static_cast<size_t>(x.digit(pos)) * scale;
            scale *= static_cast<size_t>(f.p);
        }
        return t.values[idx];
    }
};

namespace orbdetail {

inline Element decode_coset(const FieldSpec& f, long val_lo, long depth, size_t index) {
    std::vector<long> ds;
    for (long pos = val_lo; pos < depth; ++pos) {
        ds.push_back(static_cast<long>(index % static_cast<size_t>(f.p)));
        index /= static_cast<size_t>(f.p);
    }
    return Element::from_digits(f, val_lo, ds);
}

/// hat g(y) = int g(x) Lambda(coeff * x * y) dx, exactly, as a table over the
/// certified dual support. The dual box and constancy come from the
/// conductor: the output vanishes for ord(y) < 1 - depth - ord(coeff) and is
/// constant on cosets of p^{1 - val_lo - ord(coeff)}.
inline OneDimTable fourier_one_dim(const FieldSpec& f, const OneDimTable& g, long coeff) {
    long vc = ord_p(Rational(coeff), f.p);
    OneDimTable out;
    out.val_lo = 1 - g.depth - vc;
    out.depth = static_cast<int>(std::max<long>(out.val_lo, 1 - g.val_lo - vc));
    out.values.assign(OneDimTable::expected(f.p, out.val_lo, out.depth), CycValue());

    // summation depth: the integrand g(x) Lambda(coeff x y) must be constant
    // on the summation cosets for every y in the output box
    long D = std::max<long>(g.depth, 1 - out.val_lo - vc);
    Rational coset_measure = pow_rat(f.p, -D);
    size_t nx = OneDimTable::expected(f.p, g.val_lo, static_cast<int>(D));
    Element cf = Element::from_integer(f, coeff);

    for (size_t yi = 0; yi < out.values.size(); ++yi) {
        Element y = decode_coset(f, out.val_lo, out.depth, yi);
        CycValue acc;
        for (size_t xi = 0; xi < nx; ++xi) {
            Element x = decode_coset(f, g.val_lo, D, xi);
            CycValue gv = SeparableFunction::lookup(f, g, x);
            if (gv.is_zero()) continue;
            CycValue term = gv * character(x * y * cf);
            term.scale_by(coset_measure);
            acc += term;
        }
        out.values[yi] = acc;
    }
    return out;
}

}  // namespace orbdetail

/// hat f(Y) = int f(X) Lambda(<X, Y>) dX for a separable f: the pairing
/// splits as 2 aX aY + bX cY + cX bY, so the transform is three
/// one-dimensional transforms with the b/c tables exchanged.
inline SeparableFunction fourier_transform(const FieldSpec& f, const SeparableFunction& g) {
    SeparableFunction out;
    out.name = "hat(" + g.name + ")";
    out.fa = orbdetail::fourier_one_dim(f, g.fa, 2);
    out.fc = orbdetail::fourier_one_dim(f, g.fb, 1);  // b pairs against c
    out.fb = orbdetail::fourier_one_dim(f, g.fc, 1);  // c pairs against b
    return out;
}

/// Pointwise Fourier transform of a (not necessarily separable) function
/// given by an evaluator on a support box.
inline CycValue fourier_at(const FieldSpec& f, const Box& support, int constancy,
                           const std::function<CycValue(const LieElement&)>& func,
                           const LieElement& Y) {
    long vY = Y.is_zero() ? 0 : Y.min_ord();
    IntegrationJob job;
    job.field = f;
    job.box = support;
    job.depth = std::max<int>(constancy, static_cast<int>(1 + std::max<long>(0, -vY)));
    job.refine = false;
    job.integrand = [&](const std::vector<Element>& x) {
        LieElement Z{f, x[0], x[1], x[2]};
        CycValue v = func(Z);
        if (v.is_zero()) return v;
        return v * character(trace_form(Z, Y));
    };
    return integrate(job).value;
}

// ---------------------------------------------------------------------------
// the two routes to mu-hat

enum class MuRoute { direct, huntsinger };

struct MuHatParams {
    int start_window = 0;   // direct route: first truncation window tried
    int max_window = 3;     // direct route: give up past this window
    int support_window = 0; // huntsinger: claimed support radius of eta~_{Y,l}
    int eta_level_cap = 4;  // orbit enumeration budget for the eta kernel
};

struct MuHatReport {
    CycValue value;
    MuRoute route = MuRoute::direct;
    int window = 0;
    bool stabilized = false;
    bool support_certified = false;  // huntsinger only
    Rational cutoff_level;           // huntsinger: the integer l <= depth(X)
    int constancy_delta = 1;
};

/// Direct route: Phi_X applied to Z -> Lambda(<Z, Y>) over growing windows,
/// accepted when two consecutive windows agree exactly.
inline MuHatReport mu_hat_direct(const LieElement& X, const LieElement& Y,
                                 const MuHatParams& params = {}) {
    if (classify(X) != ElementClass::regular_semisimple ||
        classify(Y) != ElementClass::regular_semisimple)
        throw NotRegularError("mu_hat: both arguments must be regular semisimple");
    MuHatReport rep;
    rep.route = MuRoute::direct;
    long vY = Y.min_ord();
    int delta = static_cast<int>(1 + std::max<long>(0, -vY));
    rep.constancy_delta = delta;
    auto f = [&](const LieElement& Z) { return character(trace_form(Z, Y)); };

    CycValue prev;
    bool have_prev = false;
    for (int N = params.start_window; N <= params.max_window + 1; ++N) {
        CycValue cur = orbital_sum_apply(orbit_chart_sum(X, N, delta), f);
        if (have_prev && cur == prev) {
            rep.value = prev;
            rep.window = N - 1;
            rep.stabilized = true;
            return rep;
        }
        prev = cur;
        have_prev = true;
    }
    rep.value = prev;
    rep.window = params.max_window + 1;
    rep.stabilized = false;
    return rep;
}

/// Huntsinger route: Phi_X(eta~_{Y,l}) with l = floor(depth(X)), so the
/// depth cutoff is identically 1 on the orbit; the kernel's compact support
/// is certified by requiring it to vanish on the outermost two tested
/// shells of the truncation window.
inline MuHatReport mu_hat_huntsinger(const LieElement& X, const LieElement& Y,
                                     const MuHatParams& params = {}) {
    if (classify(X) != ElementClass::regular_semisimple ||
        classify(Y) != ElementClass::regular_semisimple)
        throw NotRegularError("mu_hat: both arguments must be regular semisimple");
    MuHatReport rep;
    rep.route = MuRoute::huntsinger;
    DepthResult dX = lie_depth(X);
    rep.cutoff_level = floor_rational(dX.value);

    long vY = Y.min_ord();
    int delta = static_cast<int>(1 + std::max<long>(0, -vY));
    rep.constancy_delta = delta;
    EtaKernel kernel(Y, params.eta_level_cap);

    int S = params.support_window;
    OrbitChartSum sum = orbit_chart_sum(X, S + 2, delta);
    CycValue inner;
    bool outer_vanishes = true;
    for (const auto& [key, w] : sum.weights) {
        const LieElement& rep_z = sum.reps.at(key);
        long shell = rep_z.min_ord();
        CycValue v = kernel.value_at(rep_z);
        if (shell >= -S) {
            v.scale_by(w);
            inner += v;
        } else if (!v.is_zero()) {
            outer_vanishes = false;
        }
    }
    rep.value = inner;
    rep.support_certified = outer_vanishes;
    rep.stabilized = outer_vanishes;
    return rep;
}

inline MuHatReport mu_hat(const LieElement& X, const LieElement& Y, MuRoute route,
                          const MuHatParams& params = {}) {
    return route == MuRoute::direct ? mu_hat_direct(X, Y, params)
                                    : mu_hat_huntsinger(X, Y, params);
}

/// The orbit of zero is the origin: Phi_0(f) = f(0) and mu-hat is constant 1.
inline CycValue mu_hat_zero_orbit() { return CycValue(Rational(1)); }

// ---------------------------------------------------------------------------
// niceness scan

struct NicenessCell {
    long shell = 0;
    LieElement Y;
    CycValue mu;           // direct-route value
    bool stabilized = false;
    long disc_ord = 0;     // ord of the discriminant
    CycValue weighted;     // |D(Y)| * |mu|^2, the squared niceness statistic
};

struct NicenessReport {
    LieElement X;
    std::vector<NicenessCell> cells;
    std::vector<std::string> errors;  // per-cell failures; the scan continues

    /// Partial L1 sums: increment per shell is q^{-3 v} * mean |mu| over the
    /// shell samples (numeric; the trend statistic, not an exact value).
    std::vector<long double> l1_increments(long q) const {
        std::map<long, std::pair<long double, int>> acc;
        for (const auto& c : cells) {
            long double a = c.mu.abs_squared().real_approx();
            acc[c.shell].first += std::sqrt(std::max<long double>(a, 0));
            acc[c.shell].second += 1;
        }
        std::vector<long double> out;
        for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
            long v = it->first;
            long double mean = it->second.first / it->second.second;
            out.push_back(std::pow(static_cast<long double>(q), -3.0L * v) * mean);
        }
        return out;
    }
};

/// Deterministic unit-level regular semisimple sample, scaled per shell.
inline std::vector<LieElement> niceness_samples(const FieldSpec& f, long shell) {
    std::vector<std::array<long, 3>> base{{1, 0, 0}, {1, 1, 0}, {0, 1, 1},
                                          {1, 1, 1}, {2, 1, 0}, {1, 0, 2}};
    std::vector<LieElement> out;
    for (const auto& [a, b, c] : base) {
        LieElement Y = LieElement::from_rationals(f, Rational(a), Rational(b), Rational(c));
        LieElement scaled{f, Y.a.shift(shell), Y.b.shift(shell), Y.c.shift(shell)};
        if (classify(scaled) == ElementClass::regular_semisimple) out.push_back(scaled);
    }
    return out;
}

inline NicenessReport niceness_scan(const LieElement& X, const std::vector<long>& shells,
                                    const MuHatParams& params = {}) {
    NicenessReport rep;
    rep.X = X;
    for (long v : shells) {
        for (const LieElement& Y : niceness_samples(X.field, v)) {
            try {
                MuHatReport mh = mu_hat_direct(X, Y, params);
                NicenessCell cell;
                cell.shell = v;
                cell.Y = Y;
                cell.mu = mh.value;
                cell.stabilized = mh.stabilized;
                cell.disc_ord = discriminant(Y).ord();
                cell.weighted = cell.mu.abs_squared();
                cell.weighted.scale_by(pow_rat(X.field.p, -cell.disc_ord));
                rep.cells.push_back(std::move(cell));
            } catch (const Error& e) {
                rep.errors.push_back(e.what());
            }
        }
    }
    return rep;
}

}  // namespace nonarch
