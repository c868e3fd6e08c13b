#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "nonarch/rootdata.hpp"

namespace nonarch {

/// Permutation of the simple roots preserving the Cartan matrix (the
/// unramified-twist datum). Identity by default.
struct DiagramPermutation {
    std::vector<size_t> map;  // simple index -> simple index

    static DiagramPermutation identity(size_t rank) {
        DiagramPermutation t;
        t.map.resize(rank);
        for (size_t i = 0; i < rank; ++i) t.map[i] = i;
        return t;
    }

    void validate(const RootSystem& rs) const {
        if (map.size() != rs.rank) throw Error("tau: wrong size");
        std::vector<bool> seen(rs.rank, false);
        for (size_t i : map) {
            if (i >= rs.rank || seen[i]) throw Error("tau: not a permutation");
            seen[i] = true;
        }
        for (size_t i = 0; i < rs.rank; ++i)
            for (size_t j = 0; j < rs.rank; ++j)
                if (rs.cartan[i][j] != rs.cartan[map[i]][map[j]])
                    throw Error("tau: does not preserve the Cartan matrix");
    }

    Root apply(const RootSystem& rs, const Root& r) const {
        Root out(rs.rank, 0);
        for (size_t i = 0; i < rs.rank; ++i) out[map[i]] = r[i];
        return out;
    }
};

/// The affine roots taking values strictly between 0 and 1 on the open
/// alcove. For an affine function that decides at the alcove vertices:
/// psi > 0 on C iff psi >= 0 on all vertices (an affine function with a
/// nonzero gradient cannot attain an interior minimum).
inline std::vector<AffineRoot> sigma_set(const RootSystem& rs, const Alcove& alcove,
                                         const std::vector<AffineRoot>& affine) {
    std::vector<AffineRoot> sigma;
    for (const auto& psi : affine) {
        bool ge0 = true, le1 = true;
        for (const auto& v : alcove.vertices) {
            Rational val = affine_eval(rs, psi, v);
            if (val < 0) ge0 = false;
            if (val > 1) le1 = false;
        }
        if (ge0 && le1) sigma.push_back(psi);
    }
    std::sort(sigma.begin(), sigma.end());
    return sigma;
}

struct OptimalPointReport {
    std::vector<AffineRoot> subset;      // the set S whose min is maximized
    RatVec point;                        // optimizer, lex-least vertex of the optimal face
    Rational optimum;                    // min_{psi in S} psi(point)
    std::vector<RatVec> optimal_face;    // vertex-enumeration certificate
    std::vector<Rational> sigma_values;  // (psi(point))_{psi in Sigma}, the baricentric tuple
};

/// Maximize min_{psi in S} psi(x) over the alcove closure, exactly, by
/// vertex enumeration of the lifted polytope {(x, s): psi(x) >= s, x in C}.
inline OptimalPointReport optimal_point(const RootSystem& rs, const Alcove& alcove,
                                        const std::vector<AffineRoot>& subset,
                                        const std::vector<AffineRoot>& sigma = {}) {
    if (subset.empty()) throw Error("optimal_point: empty subset");
    const size_t n = rs.rank;
    std::vector<LinCond> conds;
    for (const auto& w : alcove.walls_le) {
        LinCond c;
        c.a = w.a;
        c.a.resize(n + 1, 0);
        c.b = w.b;
        conds.push_back(c);
    }
    Rational floor_s = 0;  // s >= min over vertices of min psi keeps the lift bounded
    bool first = true;
    for (const auto& psi : subset)
        for (const auto& v : alcove.vertices) {
            Rational val = affine_eval(rs, psi, v);
            if (first || val < floor_s) {
                floor_s = val;
                first = false;
            }
        }
    for (const auto& psi : subset) {
        LinCond c;  // s - psi(x) <= 0
        c.a.assign(n + 1, 0);
        const Root& alpha = rs.roots[psi.gradient];
        for (size_t i = 0; i < n; ++i) c.a[i] = Rational(-alpha[i]);
        c.a[n] = 1;
        c.b = Rational(psi.level);
        conds.push_back(c);
    }
    {
        LinCond c;  // -s <= -floor_s
        c.a.assign(n + 1, 0);
        c.a[n] = -1;
        c.b = -floor_s;
        conds.push_back(c);
    }
    RatVec obj(n + 1, 0);
    obj[n] = 1;
    LpResult lift = lp_maximize(obj, conds);

    OptimalPointReport rep;
    rep.subset = subset;
    rep.optimum = lift.optimum;

    // optimal face back in x-space, then its lex-least vertex
    std::vector<LinCond> face = alcove.walls_le;
    for (const auto& psi : subset) {
        LinCond c;  // -psi(x) <= -optimum
        c.a.assign(n, 0);
        const Root& alpha = rs.roots[psi.gradient];
        for (size_t i = 0; i < n; ++i) c.a[i] = Rational(-alpha[i]);
        c.b = Rational(psi.level) - rep.optimum;
        face.push_back(c);
    }
    rep.optimal_face = enumerate_vertices(face, n);
    if (rep.optimal_face.empty()) throw Error("optimal_point: empty optimal face");
    rep.point = rep.optimal_face.front();  // enumerate_vertices sorts, so lex-least
    for (const auto& psi : sigma) rep.sigma_values.push_back(affine_eval(rs, psi, rep.point));
    return rep;
}

/// The set of optimal points: one optimizer per tau-invariant nonempty
/// subset of Sigma, de-duplicated by coordinates. Deterministic.
struct OptimalPointsResult {
    std::vector<AffineRoot> sigma;
    std::vector<OptimalPointReport> reports;  // one per subset, pre-dedup
    std::vector<RatVec> points;               // de-duplicated, sorted
};

inline OptimalPointsResult optimal_points_all(const RootSystem& rs, const Alcove& alcove,
                                              const DiagramPermutation& tau,
                                              long level_bound = 2) {
    tau.validate(rs);
    OptimalPointsResult res;
    auto aff = affine_roots(rs, level_bound);
    res.sigma = sigma_set(rs, alcove, aff);
    const auto& sigma = res.sigma;

    // orbits of tau on Sigma
    std::vector<int> orbit(sigma.size(), -1);
    int norb = 0;
    for (size_t i = 0; i < sigma.size(); ++i) {
        if (orbit[i] != -1) continue;
        size_t cur = i;
        while (orbit[cur] == -1) {
            orbit[cur] = norb;
            AffineRoot image{rs.root_index(tau.apply(rs, rs.roots[sigma[cur].gradient])),
                             sigma[cur].level};
            auto it = std::find(sigma.begin(), sigma.end(), image);
            if (it == sigma.end()) throw Error("tau does not stabilize Sigma");
            cur = static_cast<size_t>(it - sigma.begin());
        }
        ++norb;
    }
    if (norb > 20) throw Error("optimal_points_all: Sigma too large");

    for (size_t mask = 1; mask < (size_t{1} << norb); ++mask) {
        std::vector<AffineRoot> subset;
        for (size_t i = 0; i < sigma.size(); ++i)
            if (mask & (size_t{1} << static_cast<size_t>(orbit[i]))) subset.push_back(sigma[i]);
        res.reports.push_back(optimal_point(rs, alcove, subset, sigma));
    }
    std::set<RatVec> dedup;
    for (const auto& r : res.reports) dedup.insert(r.point);
    res.points.assign(dedup.begin(), dedup.end());
    return res;
}

}  // namespace nonarch
