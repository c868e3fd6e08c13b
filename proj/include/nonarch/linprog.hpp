#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "nonarch/rational.hpp"

namespace nonarch {

using RatVec = std::vector<Rational>;

/// One affine condition  a . x  (cmp)  b  with cmp in {<=, =}.
struct LinCond {
    RatVec a;
    Rational b;
    bool equality = false;
};

namespace detail {

/// Solve M y = rhs exactly; nullopt if singular. M is square.
inline std::optional<RatVec> solve_square(std::vector<RatVec> M, RatVec rhs) {
    const size_t n = M.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && M[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        Rational d = M[col][col];
        for (size_t j = col; j < n; ++j) M[col][j] /= d;
        rhs[col] /= d;
        for (size_t i = 0; i < n; ++i) {
            if (i == col || M[i][col] == 0) continue;
            Rational f = M[i][col];
            for (size_t j = col; j < n; ++j) M[i][j] -= f * M[col][j];
            rhs[i] -= f * rhs[col];
        }
    }
    return rhs;
}

inline Rational dot(const RatVec& a, const RatVec& b) {
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// All vertices of the polyhedron cut out by `conds` in dimension `dim`,
/// by exact enumeration of basic solutions. Complete for bounded regions.
inline std::vector<RatVec> enumerate_vertices(const std::vector<LinCond>& conds, size_t dim) {
    std::vector<RatVec> vertices;
    std::vector<size_t> idx(conds.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    std::vector<size_t> pick(dim);
    auto feasible = [&](const RatVec& x) {
        for (const auto& c : conds) {
            Rational v = detail::dot(c.a, x);
            if (c.equality ? v != c.b : v > c.b) return false;
        }
        return true;
    };
    auto push_unique = [&](const RatVec& x) {
        for (const auto& v : vertices)
            if (v == x) return;
        vertices.push_back(x);
    };

    // choose dim conditions to turn into equalities
    std::vector<size_t> comb;
    auto rec = [&](auto&& self, size_t start) -> void {
        if (comb.size() == dim) {
            std::vector<RatVec> M;
            RatVec rhs;
            for (size_t k : comb) {
                M.push_back(conds[k].a);
                rhs.push_back(conds[k].b);
            }
            if (auto x = detail::solve_square(std::move(M), std::move(rhs)))
                if (feasible(*x)) push_unique(*x);
            return;
        }
        for (size_t i = start; i < conds.size(); ++i) {
            comb.push_back(i);
            self(self, i + 1);
            comb.pop_back();
        }
    };
    if (dim == 0) {
        RatVec x;
        if (feasible(x)) vertices.push_back(x);
    } else {
        rec(rec, 0);
    }
    std::sort(vertices.begin(), vertices.end());
    return vertices;
}

struct LpResult {
    Rational optimum;
    RatVec argmax;                      // lexicographically least optimizer
    std::vector<RatVec> optimal_face;   // all optimal vertices (the certificate)
    std::vector<RatVec> all_vertices;   // enumeration witness
};

/// Maximize c . x over the bounded region cut out by `conds`, exactly.
inline LpResult lp_maximize(const RatVec& c, const std::vector<LinCond>& conds) {
    LpResult res;
    res.all_vertices = enumerate_vertices(conds, c.size());
    if (res.all_vertices.empty()) throw Error("lp_maximize: infeasible or empty region");
    bool first = true;
    for (const auto& v : res.all_vertices) {
        Rational val = detail::dot(c, v);
        if (first || val > res.optimum) {
            res.optimum = val;
            first = false;
        }
    }
    for (const auto& v : res.all_vertices)
        if (detail::dot(c, v) == res.optimum) res.optimal_face.push_back(v);
    res.argmax = *std::min_element(res.optimal_face.begin(), res.optimal_face.end());
    return res;
}

}  // namespace nonarch
