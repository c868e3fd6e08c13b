#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nonarch/integrate.hpp"

using namespace nonarch;

namespace {
const FieldSpec Q5{5, FieldChar::zero, 1};
const FieldSpec F5{5, FieldChar::positive, 1};

IntegrationJob unit_job(const FieldSpec& f, size_t dim, int depth) {
    IntegrationJob j;
    j.field = f;
    j.box.val_lo.assign(dim, 0);
    j.depth = depth;
    j.integrand = [](const std::vector<Element>&) { return CycValue(Rational(1)); };
    return j;
}
}  // namespace

TEST_CASE("the unit ball has measure 1") {
    for (const FieldSpec& f : {Q5, F5}) {
        auto r = integrate(unit_job(f, 1, 1));
        CHECK(r.value == CycValue(Rational(1)));
        CHECK(r.refine_agrees);
    }
}

TEST_CASE("the maximal ideal has measure 1/q") {
    IntegrationJob j = unit_job(Q5, 1, 1);
    j.box.val_lo = {1};
    auto r = integrate(j);
    CHECK(r.value == CycValue(Rational(1, 5)));
    CHECK(r.refine_agrees);
}

TEST_CASE("oscillatory integral: Lambda(x/pi) over the unit ball vanishes") {
    for (const FieldSpec& f : {Q5, F5}) {
        IntegrationJob j = unit_job(f, 1, 2);  // conductor p: depth 2 resolves
        j.integrand = [&](const std::vector<Element>& x) { return character(x[0].shift(-1)); };
        auto r = integrate(j);
        CHECK(r.value.is_zero());
        CHECK(r.refine_agrees);
    }
}

TEST_CASE("definable-set domains: measure of the maximal ideal is 1/q") {
    IntegrationJob j = unit_job(Q5, 1, 1);
    j.domain = definable_set("ord(x) >= 1", {{"x", Sort::VF}});
    auto r = integrate(j);
    CHECK(r.value == CycValue(Rational(1, 5)));
}

TEST_CASE("additivity over box partitions") {
    std::mt19937 rng(5150);
    for (int trial = 0; trial < 4; ++trial) {
        long c0 = static_cast<long>(rng() % 5);
        IntegrationJob whole = unit_job(Q5, 2, 2);
        whole.box.val_lo = {-1, 0};
        whole.integrand = [c0](const std::vector<Element>& x) {
            return character(x[0]) * character(x[1].shift(-1)) + CycValue(Rational(c0));
        };
        auto total = integrate(whole).value;
        // partition the first coordinate shell-by-shell: ord = -1, then >= 0
        CycValue parts;
        {
            IntegrationJob inner = whole;
            inner.box.val_lo = {0, 0};
            parts += integrate(inner).value;
            IntegrationJob shell = whole;
            shell.domain = definable_set("~(ord(x) >= 0)",
                                         {{"x", Sort::VF}, {"y", Sort::VF}});
            parts += integrate(shell).value;
        }
        CHECK(parts == total);
    }
}

TEST_CASE("scaling: integral over pi*O equals q^{-1} times substituted integral") {
    for (long shift : {1L, 2L}) {
        IntegrationJob small = unit_job(Q5, 1, 3);
        small.box.val_lo = {shift};
        small.integrand = [](const std::vector<Element>& x) {
            return character(x[0].shift(-2));
        };
        IntegrationJob subst = unit_job(Q5, 1, 3);
        subst.integrand = [&](const std::vector<Element>& x) {
            return character(x[0].shift(shift - 2));
        };
        CycValue lhs = integrate(small).value;
        CycValue rhs = integrate(subst).value;
        rhs.scale_by(pow_rat(5, -shift));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("refinement stability past the local-constancy depth") {
    // integrand Lambda(u * x) with ord(u) = -1: constant on cosets of p^2
    IntegrationJob j = unit_job(Q5, 1, 2);
    j.integrand = [](const std::vector<Element>& x) {
        return character(x[0].shift(-1) + x[0] + x[0]);
    };
    auto r2 = integrate(j);
    CHECK(r2.refine_agrees);
    j.depth = 3;
    auto r3 = integrate(j);
    CHECK(r3.value == r2.value);
}

TEST_CASE("local constancy depths") {
    // f = Lambda(2x): trivial on p, so constant on cosets of p^1
    auto lam = [](const std::vector<Element>& x) {
        return character(x[0] + x[0]);
    };
    auto m = local_constancy_depth(lam, {Element::from_integer(Q5, 3)}, 4, Q5);
    REQUIRE(m.has_value());
    CHECK(*m == 1);
    // indicator of the unit ball at an interior point
    auto ind = [](const std::vector<Element>& x) {
        long v = x[0].ord();
        return CycValue(Rational(v == kInfiniteOrd || v >= 0 ? 1 : 0));
    };
    auto mi = local_constancy_depth(ind, {Element::from_integer(Q5, 2)}, 4, Q5);
    REQUIRE(mi.has_value());
    CHECK(*mi == 1);
    // constant function
    auto cst = [](const std::vector<Element>&) { return CycValue(Rational(7)); };
    CHECK(local_constancy_depth(cst, {Element::zero(Q5)}, 4, Q5) == 1);
    // Lambda(x/p^3) is not constant at any depth <= 2
    auto deep = [](const std::vector<Element>& x) { return character(x[0].shift(-3)); };
    CHECK(!local_constancy_depth(deep, {Element::zero(Q5)}, 2, Q5).has_value());
}

TEST_CASE("form measures") {
    // density 1 on the unit ball: Haar
    auto one = [](const std::vector<Element>& x) { return Element::from_integer(Q5, 1); };
    IntegrationJob dom = unit_job(Q5, 1, 2);
    CHECK(form_measure(one, dom) == CycValue(Rational(1)));

    // density x on the units: |x| = 1 there, total (1 - 1/q)
    auto ident = [](const std::vector<Element>& x) { return x[0]; };
    IntegrationJob units = unit_job(Q5, 1, 2);
    units.domain = definable_set("ord(x) >= 0 /\\ ~(ord(x) >= 1)", {{"x", Sort::VF}});
    CHECK(form_measure(ident, units) == CycValue(Rational(4, 5)));

    // density x on p \ p^2: |x| = 1/q on a set of measure (1/q)(1 - 1/q)
    IntegrationJob shell = unit_job(Q5, 1, 2);
    shell.box.val_lo = {1};
    shell.domain = definable_set("~(ord(x) >= 2)", {{"x", Sort::VF}});
    CHECK(form_measure(ident, shell) == CycValue(Rational(4, 125)));

    // vanishing density is rejected
    IntegrationJob bad = unit_job(Q5, 1, 1);
    auto zero_at_zero = [](const std::vector<Element>& x) { return x[0]; };
    CHECK_THROWS_AS(form_measure(zero_at_zero, bad), Error);
}

TEST_CASE("domain undecided raises") {
    IntegrationJob j = unit_job(Q5, 1, 1);
    DefinableSet dom;
    dom.formula = parse("x = y", {{"x", Sort::VF}, {"y", Sort::VF}});
    dom.free_vars = {{"x", Sort::VF}};  // y stays a context parameter
    j.domain = dom;
    j.domain_ctx.vf.insert_or_assign("y", Element::from_digits(Q5, 0, {1, 2}, true));
    CHECK_THROWS_AS(integrate(j), DomainUndecidedError);
}
