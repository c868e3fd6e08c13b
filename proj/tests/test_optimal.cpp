#include <catch2/catch_amalgamated.hpp>

#include "nonarch/optimal.hpp"

using namespace nonarch;

namespace {
struct Fixture {
    RootSystem rs;
    Alcove alcove;
    std::vector<AffineRoot> sigma;

    explicit Fixture(const std::vector<std::vector<long>>& cartan) {
        rs = build_root_system(cartan);
        alcove = fundamental_alcove(rs);
        sigma = sigma_set(rs, alcove, affine_roots(rs, 2));
    }
};

// brute-force oracle: max over a rational grid of min_{psi in S} psi(x)
Rational grid_max_min(const Fixture& f, const std::vector<AffineRoot>& subset, long den) {
    Rational best;
    bool first = true;
    std::vector<long> idx(f.rs.rank, 0);
    while (true) {
        RatVec x(f.rs.rank);
        for (size_t i = 0; i < x.size(); ++i) x[i] = Rational(idx[i], den);
        if (f.alcove.contains_closure(x)) {
            Rational m;
            bool mfirst = true;
            for (const auto& psi : subset) {
                Rational v = affine_eval(f.rs, psi, x);
                if (mfirst || v < m) {
                    m = v;
                    mfirst = false;
                }
            }
            if (first || m > best) {
                best = m;
                first = false;
            }
        }
        size_t k = 0;
        while (k < idx.size() && ++idx[k] > den) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return best;
}
}  // namespace

TEST_CASE("A1: Sigma = {alpha, 1 - alpha}") {
    Fixture f(std::vector<std::vector<long>>{{2}});
    REQUIRE(f.sigma.size() == 2);
    // alpha + 0 and -alpha + 1
    const Root& g0 = f.rs.roots[f.sigma[0].gradient];
    const Root& g1 = f.rs.roots[f.sigma[1].gradient];
    CHECK(((g0 == Root{-1} && f.sigma[0].level == 1) || (g0 == Root{1} && f.sigma[0].level == 0)));
    CHECK(((g1 == Root{-1} && f.sigma[1].level == 1) || (g1 == Root{1} && f.sigma[1].level == 0)));
    CHECK(f.sigma[0] != f.sigma[1]);
    // oracle: exhaustive check over denominators <= 12
    for (const auto& psi : f.sigma)
        for (long num = 1; num < 12; ++num) {
            RatVec x{Rational(num, 12)};
            Rational v = affine_eval(f.rs, psi, x);
            CHECK(v > 0);
            CHECK(v < 1);
        }
}

TEST_CASE("A2: Sigma contains the simple and highest-root layers in (0,1)") {
    Fixture f({{2, -1}, {-1, 2}});
    CHECK(f.sigma.size() == 6);
    // contains alpha1, alpha2, theta at level 0
    size_t level0 = 0;
    for (const auto& psi : f.sigma)
        if (psi.level == 0) ++level0;
    CHECK(level0 == 3);
    // oracle: rational grid, every member stays in [0,1] on the closure
    for (const auto& psi : f.sigma)
        for (long n1 = 0; n1 <= 8; ++n1)
            for (long n2 = 0; n1 + n2 <= 8; ++n2) {
                RatVec x{Rational(n1, 8), Rational(n2, 8)};
                if (!f.alcove.contains_closure(x)) continue;
                Rational v = affine_eval(f.rs, psi, x);
                CHECK(v >= 0);
                CHECK(v <= 1);
            }
}

TEST_CASE("Sigma is stable in the level bound") {
    for (auto cartan : {std::vector<std::vector<long>>{{2}}, {{2, -1}, {-1, 2}},
                        {{2, -1}, {-2, 2}}}) {
        RootSystem rs = build_root_system(cartan);
        Alcove alcove = fundamental_alcove(rs);
        auto s2 = sigma_set(rs, alcove, affine_roots(rs, 2));
        auto s3 = sigma_set(rs, alcove, affine_roots(rs, 3));
        CHECK(s2 == s3);
    }
}

TEST_CASE("A1 optimal points: singletons reach the endpoints, the pair reaches 1/2") {
    Fixture f(std::vector<std::vector<long>>{{2}});
    AffineRoot alpha = f.sigma[0].level == 0 ? f.sigma[0] : f.sigma[1];
    AffineRoot one_minus = f.sigma[0].level == 1 ? f.sigma[0] : f.sigma[1];

    auto r1 = optimal_point(f.rs, f.alcove, {alpha});
    CHECK(r1.optimum == 1);
    CHECK(r1.point == RatVec{Rational(1)});

    auto r2 = optimal_point(f.rs, f.alcove, {alpha, one_minus});
    CHECK(r2.optimum == Rational(1, 2));
    CHECK(r2.point == RatVec{Rational(1, 2)});
    // oracle: grid over denominators <= 12
    CHECK(grid_max_min(f, {alpha, one_minus}, 12) <= r2.optimum);
}

TEST_CASE("optimum dominates the barycenter value") {
    Fixture f({{2, -1}, {-1, 2}});
    RatVec bary = f.alcove.barycenter();
    for (size_t i = 0; i < f.sigma.size(); ++i)
        for (size_t j = i + 1; j < f.sigma.size(); ++j) {
            std::vector<AffineRoot> subset{f.sigma[i], f.sigma[j]};
            auto rep = optimal_point(f.rs, f.alcove, subset);
            Rational at_bary;
            bool first = true;
            for (const auto& psi : subset) {
                Rational v = affine_eval(f.rs, psi, bary);
                if (first || v < at_bary) {
                    at_bary = v;
                    first = false;
                }
            }
            CHECK(rep.optimum >= at_bary);
        }
}

TEST_CASE("A1: the optimal point set is {0, 1/2, 1}") {
    Fixture f(std::vector<std::vector<long>>{{2}});
    auto res = optimal_points_all(f.rs, f.alcove, DiagramPermutation::identity(1));
    REQUIRE(res.points.size() == 3);
    CHECK(res.points[0] == RatVec{Rational(0)});
    CHECK(res.points[1] == RatVec{Rational(1, 2)});
    CHECK(res.points[2] == RatVec{Rational(1)});
    CHECK(res.reports.size() == 3);  // 2^2 - 1 subsets
    CHECK(res.points.size() <= res.reports.size());
}

TEST_CASE("LP optimality certified against the rational grid (A2, denominators <= 24)") {
    Fixture f({{2, -1}, {-1, 2}});
    auto res = optimal_points_all(f.rs, f.alcove, DiagramPermutation::identity(2));
    for (const auto& rep : res.reports) {
        CHECK(grid_max_min(f, rep.subset, 24) <= rep.optimum);
        for (const auto& c : rep.point) CHECK(denominator(c) >= 1);  // exact rationals
        CHECK(f.alcove.contains_closure(rep.point));
    }
}

TEST_CASE("determinism: two runs produce identical output") {
    Fixture f({{2, -1}, {-2, 2}});
    auto r1 = optimal_points_all(f.rs, f.alcove, DiagramPermutation::identity(2));
    auto r2 = optimal_points_all(f.rs, f.alcove, DiagramPermutation::identity(2));
    CHECK(r1.points == r2.points);
    REQUIRE(r1.reports.size() == r2.reports.size());
    for (size_t i = 0; i < r1.reports.size(); ++i) {
        CHECK(r1.reports[i].point == r2.reports[i].point);
        CHECK(r1.reports[i].optimum == r2.reports[i].optimum);
    }
}

TEST_CASE("A1 x A1 with the swap: every optimizer is symmetric") {
    Fixture f({{2, 0}, {0, 2}});
    DiagramPermutation swap;
    swap.map = {1, 0};
    auto res = optimal_points_all(f.rs, f.alcove, swap);
    CHECK(!res.reports.empty());
    for (const auto& rep : res.reports) {
        REQUIRE(rep.point.size() == 2);
        CHECK(rep.point[0] == rep.point[1]);  // swap-and-compare oracle
    }
    // tau must preserve the Cartan matrix
    DiagramPermutation bad;
    bad.map = {1, 0};
    RootSystem b2 = build_root_system({{2, -1}, {-2, 2}});
    CHECK_THROWS_AS(bad.validate(b2), Error);
}

TEST_CASE("singleton bound: |P| <= 2^|Sigma| - 1") {
    Fixture f({{2, -1}, {-1, 2}});
    auto res = optimal_points_all(f.rs, f.alcove, DiagramPermutation::identity(2));
    CHECK(res.points.size() <= res.reports.size());
    CHECK(res.reports.size() == (size_t{1} << res.sigma.size()) - 1);
}
