#pragma once

#include <array>
#include <string>
#include <vector>

#include "nonarch/field.hpp"
#include "nonarch/rootdata.hpp"

namespace nonarch {

/// A basis line of the Lie algebra: a torus coordinate or a root vector.
struct BasisLine {
    enum class Kind { torus, root } kind;
    size_t index;  // torus coordinate i, or index into RootSystem::roots
};

/// Small square matrix over the field elements.
struct Matrix {
    size_t n = 0;
    std::vector<Element> e;  // row-major

    Matrix() = default;
    Matrix(size_t n_, const FieldSpec& f) : n(n_), e(n_ * n_, Element::zero(f)) {}
    Element& at(size_t i, size_t j) { return e[i * n + j]; }
    const Element& at(size_t i, size_t j) const { return e[i * n + j]; }
};

/// Split model of the Lie algebra inside n x n matrices, with an integral
/// Chevalley basis and its bracket table. Only sl2 ships in v1; the data
/// layout is the seam for sl3 / sp4.
struct ChevalleyModel {
    std::string id;
    size_t n = 0;  // size of the standard representation
    RootSystem rs;
    std::vector<BasisLine> basis;
    std::vector<std::vector<std::vector<long>>> rep;  // basis -> n x n integer matrix
    std::vector<std::vector<std::vector<long>>> bracket_table;  // [i][j] -> coords of [b_i, b_j]

    size_t dim() const { return basis.size(); }

    static ChevalleyModel sl2() {
        ChevalleyModel m;
        m.id = "sl2";
        m.n = 2;
        m.rs = build_root_system({{2}});
        size_t pos = m.rs.root_index(Root{1});
        size_t neg = m.rs.root_index(Root{-1});
        m.basis = {{BasisLine::Kind::torus, 0},
                   {BasisLine::Kind::root, pos},    // E
                   {BasisLine::Kind::root, neg}};   // F
        m.rep = {{{1, 0}, {0, -1}},   // H
                 {{0, 1}, {0, 0}},    // E
                 {{0, 0}, {1, 0}}};   // F
        // [H,E] = 2E, [H,F] = -2F, [E,F] = H
        m.bracket_table = {{{0, 0, 0}, {0, 2, 0}, {0, 0, -2}},
                           {{0, -2, 0}, {0, 0, 0}, {1, 0, 0}},
                           {{0, 0, 2}, {-1, 0, 0}, {0, 0, 0}}};
        return m;
    }

    /// alpha(x) for the root attached to a basis line, in alcove coordinates.
    Rational root_value(size_t basis_index, const RatVec& x) const {
        const BasisLine& line = basis[basis_index];
        if (line.kind != BasisLine::Kind::root) throw Error("root_value: torus line");
        Rational s = 0;
        const Root& alpha = rs.roots[line.index];
        for (size_t i = 0; i < rs.rank; ++i) s += Rational(alpha[i]) * x[i];
        return s;
    }

    Matrix to_matrix(const std::vector<Element>& coords, const FieldSpec& f) const {
        if (coords.size() != dim()) throw Error("to_matrix: wrong coordinate count");
        Matrix M(n, f);
        for (size_t b = 0; b < dim(); ++b)
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    if (rep[b][i][j] != 0)
                        M.at(i, j) = M.at(i, j) + coords[b] * Element::from_integer(f, rep[b][i][j]);
        return M;
    }

    /// Exact coordinate extraction; checks the matrix lies in the span.
    std::vector<Element> from_matrix(const Matrix& M, const FieldSpec& f) const {
        if (id != "sl2") throw Error("from_matrix: only sl2 in v1");
        if (M.n != 2) throw Error("from_matrix: wrong size");
        auto eq = certified_equal(M.at(1, 1), -M.at(0, 0));
        if (!eq.has_value())
            throw InsufficientPrecisionError("from_matrix: trace-zero check undecided");
        if (!*eq) throw Error("from_matrix: matrix not traceless");
        (void)f;
        return {M.at(0, 0), M.at(0, 1), M.at(1, 0)};
    }

    /// Coordinates of [X, Y] from coordinates of X and Y.
    std::vector<Element> bracket(const std::vector<Element>& X, const std::vector<Element>& Y,
                                 const FieldSpec& f) const {
        std::vector<Element> out(dim(), Element::zero(f));
        for (size_t i = 0; i < dim(); ++i) {
            if (X[i].is_exact_zero()) continue;
            for (size_t j = 0; j < dim(); ++j) {
                if (Y[j].is_exact_zero()) continue;
                const auto& c = bracket_table[i][j];
                for (size_t k = 0; k < dim(); ++k)
                    if (c[k] != 0)
                        out[k] = out[k] + X[i] * Y[j] * Element::from_integer(f, c[k]);
            }
        }
        return out;
    }

    /// Matrix of ad(Y) on the adjoint representation.
    std::vector<std::vector<Element>> ad(const std::vector<Element>& Y, const FieldSpec& f) const {
        std::vector<std::vector<Element>> M(dim(), std::vector<Element>(dim(), Element::zero(f)));
        for (size_t j = 0; j < dim(); ++j) {
            std::vector<Element> ej(dim(), Element::zero(f));
            ej[j] = Element::from_integer(f, 1);
            auto col = bracket(Y, ej, f);
            for (size_t k = 0; k < dim(); ++k) M[k][j] = col[k];
        }
        return M;
    }
};

/// Ad(k) on sl2 coordinates (a, b, c) for k = [[x, y], [z, w]], det k = 1:
///   a' = a(xw + yz) + c w y - b x z
///   b' = -2 a x y - c y^2 + b x^2
///   c' =  2 a z w + c w^2 - b z^2
inline std::vector<Element> sl2_adjoint(const Element& x, const Element& y, const Element& z,
                                        const Element& w, const std::vector<Element>& coords) {
    const Element &a = coords[0], &b = coords[1], &c = coords[2];
    Element two = Element::from_integer(x.field().p != 0 ? x.field() : a.field(), 2);
    Element a2 = a * (x * w + y * z) + c * w * y - b * x * z;
    Element b2 = b * x * x - c * y * y - two * (a * x * y);
    Element c2 = c * w * w - b * z * z + two * (a * z * w);
    return {a2, b2, c2};
}

}  // namespace nonarch
