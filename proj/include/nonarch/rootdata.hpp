#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "nonarch/linprog.hpp"
#include "nonarch/rational.hpp"

namespace nonarch {

class NotFiniteTypeError : public Error {
public:
    explicit NotFiniteTypeError(const std::string& what = "not a finite-type Cartan matrix")
        : Error(what) {}
};

using Root = std::vector<long>;  // coordinates in the simple-root basis

/// Finite root system generated from a Cartan matrix by reflection closure.
/// Roots are kept as integer vectors in the root lattice; alcove coordinates
/// are the values (alpha_i(x)) at the simple roots, so alpha(x) for
/// alpha = sum m_i alpha_i is just sum m_i x_i.
struct RootSystem {
    size_t rank = 0;
    std::vector<std::vector<long>> cartan;
    std::vector<Root> roots;                 // sorted, closed under negation
    std::vector<size_t> simple;              // indices of the simple roots
    std::vector<std::vector<size_t>> components;  // simple-root indices per irreducible block
    std::vector<Root> highest;               // highest root of each component

    /// <beta, alpha_i^vee> for beta in root coordinates.
    long pairing(const Root& beta, size_t i) const {
        long s = 0;
        for (size_t j = 0; j < rank; ++j) s += beta[j] * cartan[i][j];
        return s;
    }

    size_t root_index(const Root& r) const {
        auto it = std::lower_bound(roots.begin(), roots.end(), r);
        if (it == roots.end() || *it != r) throw Error("root_index: not a root");
        return static_cast<size_t>(it - roots.begin());
    }
};

namespace detail {

inline void check_finite_type(const std::vector<std::vector<long>>& c) {
    const size_t n = c.size();
    for (size_t i = 0; i < n; ++i) {
        if (c[i].size() != n) throw NotFiniteTypeError("Cartan matrix not square");
        if (c[i][i] != 2) throw NotFiniteTypeError("diagonal entries must be 2");
        for (size_t j = 0; j < n; ++j) {
            if (i != j && c[i][j] > 0) throw NotFiniteTypeError("off-diagonal entries must be <= 0");
            if ((c[i][j] == 0) != (c[j][i] == 0)) throw NotFiniteTypeError("zero pattern not symmetric");
        }
    }
    // symmetrize: d_i c_{ij} = d_j c_{ji}, then require positive-definiteness
    std::vector<Rational> d(n, 0);
    for (size_t start = 0; start < n; ++start) {
        if (d[start] != 0) continue;
        d[start] = 1;
        std::vector<size_t> stack{start};
        while (!stack.empty()) {
            size_t i = stack.back();
            stack.pop_back();
            for (size_t j = 0; j < n; ++j) {
                if (i == j || c[i][j] == 0) continue;
                Rational dj = d[i] * Rational(c[i][j]) / Rational(c[j][i]);
                if (d[j] == 0) {
                    d[j] = dj;
                    stack.push_back(j);
                } else if (d[j] != dj) {
                    throw NotFiniteTypeError("Cartan matrix not symmetrizable");
                }
            }
        }
    }
    std::vector<RatVec> B(n, RatVec(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) B[i][j] = d[i] * Rational(c[i][j]);
    // leading principal minors > 0
    for (size_t k = 1; k <= n; ++k) {
        std::vector<RatVec> M(k, RatVec(k));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j) M[i][j] = B[i][j];
        // exact determinant by fraction-free elimination
        Rational det = 1;
        for (size_t col = 0; col < k; ++col) {
            size_t piv = col;
            while (piv < k && M[piv][col] == 0) ++piv;
            if (piv == k) {
                det = 0;
                break;
            }
            if (piv != col) {
                std::swap(M[piv], M[col]);
                det = -det;
            }
            det *= M[col][col];
            for (size_t i = col + 1; i < k; ++i) {
                Rational f = M[i][col] / M[col][col];
                for (size_t j = col; j < k; ++j) M[i][j] -= f * M[col][j];
            }
        }
        if (det <= 0) throw NotFiniteTypeError("symmetrized Cartan matrix not positive definite");
    }
}

}  // namespace detail

inline RootSystem build_root_system(const std::vector<std::vector<long>>& cartan,
                                    size_t closure_bound = 512) {
    detail::check_finite_type(cartan);
    RootSystem rs;
    rs.rank = cartan.size();
    rs.cartan = cartan;

    std::set<Root> closed;
    for (size_t i = 0; i < rs.rank; ++i) {
        Root e(rs.rank, 0);
        e[i] = 1;
        closed.insert(e);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Root> batch(closed.begin(), closed.end());
        for (const auto& beta : batch)
            for (size_t i = 0; i < rs.rank; ++i) {
                long pair = 0;
                for (size_t j = 0; j < rs.rank; ++j) pair += beta[j] * cartan[i][j];
                Root refl = beta;
                refl[i] -= pair;
                if (closed.insert(refl).second) grew = true;
                if (closed.size() > closure_bound)
                    throw NotFiniteTypeError("reflection closure exceeded bound");
            }
    }
    rs.roots.assign(closed.begin(), closed.end());
    std::sort(rs.roots.begin(), rs.roots.end());
    for (size_t i = 0; i < rs.rank; ++i) {
        Root e(rs.rank, 0);
        e[i] = 1;
        rs.simple.push_back(rs.root_index(e));
    }

    // irreducible components of the Dynkin diagram
    std::vector<int> comp(rs.rank, -1);
    int nc = 0;
    for (size_t i = 0; i < rs.rank; ++i) {
        if (comp[i] != -1) continue;
        comp[i] = nc;
        std::vector<size_t> stack{i};
        while (!stack.empty()) {
            size_t a = stack.back();
            stack.pop_back();
            for (size_t b = 0; b < rs.rank; ++b)
                if (comp[b] == -1 && cartan[a][b] != 0) {
                    comp[b] = nc;
                    stack.push_back(b);
                }
        }
        ++nc;
    }
    rs.components.assign(static_cast<size_t>(nc), {});
    for (size_t i = 0; i < rs.rank; ++i) rs.components[static_cast<size_t>(comp[i])].push_back(i);

    // highest root per component: maximal height among roots supported there
    for (const auto& block : rs.components) {
        Root best;
        long best_height = LONG_MIN;
        for (const auto& r : rs.roots) {
            bool in_block = true;
            long height = 0;
            for (size_t j = 0; j < rs.rank; ++j) {
                if (r[j] != 0 && comp[j] != comp[block[0]]) in_block = false;
                height += r[j];
            }
            if (in_block && height > best_height) {
                bool supported = false;
                for (size_t j : block) supported |= r[j] != 0;
                if (!supported) continue;
                best = r;
                best_height = height;
            }
        }
        rs.highest.push_back(best);
    }
    return rs;
}

/// An affine root psi = alpha + n; psi(x) = alpha(x) + n in alcove coordinates.
struct AffineRoot {
    size_t gradient;  // index into RootSystem::roots
    long level;

    bool operator==(const AffineRoot& o) const {
        return gradient == o.gradient && level == o.level;
    }
    bool operator<(const AffineRoot& o) const {
        return gradient != o.gradient ? gradient < o.gradient : level < o.level;
    }
};

inline Rational affine_eval(const RootSystem& rs, const AffineRoot& psi, const RatVec& x) {
    Rational s = psi.level;
    const Root& alpha = rs.roots[psi.gradient];
    for (size_t i = 0; i < rs.rank; ++i) s += Rational(alpha[i]) * x[i];
    return s;
}

inline std::vector<AffineRoot> affine_roots(const RootSystem& rs, long level_bound) {
    if (level_bound < 1) throw Error("affine_roots: level bound must be >= 1");
    std::vector<AffineRoot> out;
    for (size_t g = 0; g < rs.roots.size(); ++g)
        for (long n = -level_bound; n <= level_bound; ++n) out.push_back({g, n});
    return out;
}

/// A relatively open face of the alcove closure: the walls in `equalities`
/// hold with =, all other walls with >.
struct Face {
    std::set<size_t> equalities;
    size_t dim = 0;
    RatVec interior_point;  // a relative-interior witness
};

/// The fundamental alcove alpha_i(x) > 0, theta_c(x) < 1 with its faces and
/// their incidence relations; the closure is the disjoint union of the faces.
struct Alcove {
    const RootSystem* rs = nullptr;
    std::vector<LinCond> walls_le;      // closure description: w . x <= b
    std::vector<RatVec> wall_normals;   // outward form: wall holds as w.x == b
    std::vector<RatVec> vertices;
    std::vector<Face> faces;
    std::vector<std::pair<size_t, size_t>> incidence;  // (smaller face, larger face)

    size_t wall_count() const { return walls_le.size(); }

    bool contains_closure(const RatVec& x) const {
        for (const auto& c : walls_le)
            if (detail::dot(c.a, x) > c.b) return false;
        return true;
    }

    bool contains_open(const RatVec& x) const {
        for (const auto& c : walls_le)
            if (detail::dot(c.a, x) >= c.b) return false;
        return true;
    }

    RatVec barycenter() const {
        RatVec b(rs->rank, 0);
        for (const auto& v : vertices)
            for (size_t i = 0; i < b.size(); ++i) b[i] += v[i];
        for (auto& c : b) c /= Rational(static_cast<long>(vertices.size()));
        return b;
    }
};

inline Alcove fundamental_alcove(const RootSystem& rs) {
    Alcove a;
    a.rs = &rs;
    // walls: -alpha_i(x) <= 0 for simple alpha_i; theta_c(x) <= 1 per component
    for (size_t i = 0; i < rs.rank; ++i) {
        RatVec n(rs.rank, 0);
        n[i] = -1;
        a.walls_le.push_back({n, 0});
        a.wall_normals.push_back(n);
    }
    for (const auto& theta : rs.highest) {
        RatVec n(rs.rank, 0);
        for (size_t i = 0; i < rs.rank; ++i) n[i] = Rational(theta[i]);
        a.walls_le.push_back({n, 1});
        a.wall_normals.push_back(n);
    }
    a.vertices = enumerate_vertices(a.walls_le, rs.rank);

    // faces: subsets of walls turned to equalities with nonempty relative
    // interior, found by maximizing the slack of the remaining walls
    const size_t W = a.wall_count();
    for (size_t mask = 0; mask < (size_t{1} << W); ++mask) {
        std::vector<LinCond> conds;
        RatVec obj(rs.rank + 1, 0);
        obj[rs.rank] = 1;  // the slack variable s
        bool any_strict = false;
        for (size_t w = 0; w < W; ++w) {
            LinCond c;
            c.a = a.walls_le[w].a;
            c.a.resize(rs.rank + 1, 0);
            c.b = a.walls_le[w].b;
            if (mask & (size_t{1} << w)) {
                c.equality = true;
            } else {
                c.a[rs.rank] = 1;  // w . x + s <= b, maximize s
                any_strict = true;
            }
            conds.push_back(c);
        }
        if (any_strict) {
            LinCond cap;  // s <= 1 keeps the region bounded
            cap.a.assign(rs.rank + 1, 0);
            cap.a[rs.rank] = 1;
            cap.b = 1;
            conds.push_back(cap);
        }
        try {
            LpResult lp = lp_maximize(obj, conds);
            if (any_strict && lp.optimum <= 0) continue;  // empty relative interior
            Face f;
            for (size_t w = 0; w < W; ++w)
                if (mask & (size_t{1} << w)) f.equalities.insert(w);
            f.interior_point.assign(lp.argmax.begin(), lp.argmax.begin() + static_cast<long>(rs.rank));
            // dimension: rank of the equality system
            {
                std::vector<RatVec> rows;
                for (size_t w : f.equalities) rows.push_back(a.walls_le[w].a);
                size_t r = 0;
                for (size_t col = 0; col < rs.rank && r < rows.size(); ++col) {
                    size_t piv = r;
                    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
                    if (piv == rows.size()) continue;
                    std::swap(rows[piv], rows[r]);
                    for (size_t i = r + 1; i < rows.size(); ++i) {
                        if (rows[i][col] == 0) continue;
                        Rational fct = rows[i][col] / rows[r][col];
                        for (size_t j = 0; j < rs.rank; ++j) rows[i][j] -= fct * rows[r][j];
                    }
                    ++r;
                }
                f.dim = rs.rank - r;
            }
            a.faces.push_back(std::move(f));
        } catch (const Error&) {
            continue;  // infeasible equality system: no such face
        }
    }
    // keep only maximal equality sets per point set: two masks describe the
    // same face iff their closures coincide; with a simplex each face appears
    // once per exact equality set, so just deduplicate identical sets
    std::sort(a.faces.begin(), a.faces.end(), [](const Face& x, const Face& y) {
        return x.equalities < y.equalities;
    });

    for (size_t i = 0; i < a.faces.size(); ++i)
        for (size_t j = 0; j < a.faces.size(); ++j)
            if (i != j && a.faces[i].equalities.size() > a.faces[j].equalities.size() &&
                std::includes(a.faces[i].equalities.begin(), a.faces[i].equalities.end(),
                              a.faces[j].equalities.begin(), a.faces[j].equalities.end()))
                a.incidence.emplace_back(i, j);  // face i lies in the closure of face j
    return a;
}

/// Which face of the closure a point belongs to; the faces partition the
/// closure, so this is total for points of the closure.
inline size_t face_of(const Alcove& a, const RatVec& x) {
    if (!a.contains_closure(x)) throw Error("face_of: point outside the alcove closure");
    std::set<size_t> eq;
    for (size_t w = 0; w < a.wall_count(); ++w)
        if (detail::dot(a.walls_le[w].a, x) == a.walls_le[w].b) eq.insert(w);
    for (size_t i = 0; i < a.faces.size(); ++i)
        if (a.faces[i].equalities == eq) return i;
    throw Error("face_of: no face with this equality pattern");
}

}  // namespace nonarch
