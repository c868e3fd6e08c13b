#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nonarch/field.hpp"

using namespace nonarch;

namespace {
const FieldSpec Q5{5, FieldChar::zero, 1};
const FieldSpec F5{5, FieldChar::positive, 1};
const FieldSpec F7{7, FieldChar::positive, 1};

Element q5(const std::string& r) { return Element::from_rational(Q5, rational_from_string(r)); }
}  // namespace

TEST_CASE("digit carry in Q_p addition") {
    // p*1 + p*(p-1) = p^2: valuation >= 2, exactly 2 here
    Element a = Element::from_integer(Q5, 5);
    Element b = Element::from_integer(Q5, 20);
    Element s = a + b;
    CHECK(s.ord() == 2);
    CHECK(s.rational_value() == 25);
}

TEST_CASE("(2 + 1*5) * (3 + 0*5) = 6 + 15 = 21 digitwise in Q_5") {
    // independent oracle: integer arithmetic, then 5-adic digits of 21 = 1 + 4*5
    Element a = Element::from_digits(Q5, 0, {2, 1});
    Element b = Element::from_digits(Q5, 0, {3, 0});
    Element prod = a * b;
    CHECK(prod.rational_value() == 21);
    CHECK(prod.digit(0) == 1);
    CHECK(prod.digit(1) == 4);
    CHECK(prod.digit(2) == 0);
}

TEST_CASE("mul(x, inv(x)) = 1 to tracked precision for x = 3 + t in F_5((t))") {
    Element x = Element::from_digits(F5, 0, {3, 1});
    Element y = x * x.inv(8);
    CHECK(y.ord() == 0);
    for (long i = 0; i < y.known_upto(); ++i) CHECK(y.digit(i) == (i == 0 ? 1 : 0));
}

TEST_CASE("mul(a, inv(a)) = 1 for 1000 random elements, both fields") {
    std::mt19937 rng(12345);
    for (int n = 0; n < 1000; ++n) {
        const FieldSpec& f = (n % 2 == 0) ? Q5 : F5;
        long val = static_cast<long>(rng() % 7) - 3;
        std::vector<long> ds;
        ds.push_back(1 + static_cast<long>(rng() % 4));
        for (int i = 0; i < 4; ++i) ds.push_back(static_cast<long>(rng() % 5));
        bool truncated = (rng() % 2) == 0;
        Element a = Element::from_digits(f, val, ds, truncated);
        Element y = a * a.inv();
        REQUIRE(y.ord() == 0);
        long upto = std::min<long>(y.known_upto(), 5);
        for (long i = 0; i < upto; ++i) CHECK(y.digit(i) == (i == 0 ? 1 : 0));
    }
}

TEST_CASE("addition cancelling all certified digits raises") {
    Element a = Element::from_digits(Q5, 0, {2, 3}, true);
    Element b = -a;
    CHECK_THROWS_AS(a + b, InsufficientPrecisionError);
    // exact elements cancel exactly instead
    Element c = Element::from_integer(Q5, 17);
    CHECK((c + (-c)).is_exact_zero());
}

TEST_CASE("inv of exact zero raises") {
    CHECK_THROWS_AS(Element::zero(Q5).inv(), DivisionByZeroError);
}

TEST_CASE("ord and angular component") {
    CHECK(ord_ac(Element::zero(Q5)) == std::pair<long, long>(kInfiniteOrd, 0L));
    // a = p^2 * u, u with leading digit 3
    Element a = Element::from_digits(Q5, 2, {3, 1});
    CHECK(ord_ac(a) == std::pair<long, long>(2L, 3L));
    // a = t^{-1}(1 + t) in F_7((t))
    Element b = Element::from_digits(F7, -1, {1, 1});
    CHECK(ord_ac(b) == std::pair<long, long>(-1L, 1L));
}

TEST_CASE("ord and ac are multiplicative") {
    std::mt19937 rng(99);
    for (int n = 0; n < 200; ++n) {
        const FieldSpec& f = (n % 2 == 0) ? Q5 : F5;
        auto rnd = [&](long lead) {
            std::vector<long> ds{lead};
            for (int i = 0; i < 3; ++i) ds.push_back(static_cast<long>(rng() % 5));
            return Element::from_digits(f, static_cast<long>(rng() % 5) - 2, ds);
        };
        Element a = rnd(1 + static_cast<long>(rng() % 4));
        Element b = rnd(1 + static_cast<long>(rng() % 4));
        Element ab = a * b;
        CHECK(ab.ord() == a.ord() + b.ord());
        CHECK(ab.ac() == (a.ac() * b.ac()) % 5);
    }
}

TEST_CASE("character: conductor is p") {
    // a in p -> 1
    CHECK(character(Element::from_integer(Q5, 10)) == CycValue(Rational(1)));
    CHECK(character(Element::from_digits(F5, 1, {2})) == CycValue(Rational(1)));
    // nontrivial on units: Lambda(x) = zeta_p^{x mod p} on the integers
    CHECK(character(Element::from_integer(Q5, 3)) == CycValue::root_of_unity(5, 1, 3));
    CHECK(character(Element::from_digits(F5, 0, {3})) == CycValue::root_of_unity(5, 1, 3));
    // a = t^{-1} * 3 in F_5((t)) -> zeta_5^3
    CHECK(character(Element::from_digits(F5, -1, {3})) == CycValue::root_of_unity(5, 1, 3));
    // a = 1/25 + 2/5 in Q_5: fractional part of a/5 is 11/125
    CHECK(character(q5("11/25")) == CycValue::root_of_unity(5, 3, 11));
}

TEST_CASE("character is additive: Lambda(a+b) = Lambda(a)Lambda(b)") {
    std::mt19937 rng(7);
    for (int n = 0; n < 300; ++n) {
        const FieldSpec& f = (n % 2 == 0) ? Q5 : F5;
        auto rnd = [&]() {
            std::vector<long> ds{1 + static_cast<long>(rng() % 4)};
            for (int i = 0; i < 4; ++i) ds.push_back(static_cast<long>(rng() % 5));
            return Element::from_digits(f, static_cast<long>(rng() % 6) - 3, ds);
        };
        Element a = rnd(), b = rnd();
        Element s = a + b;
        CHECK(character(s) == character(a) * character(b));
    }
}

TEST_CASE("character precision requirement") {
    // digits below p^0 unknown -> cannot evaluate
    Element a = Element::from_digits(Q5, -2, {1}, true);
    CHECK_THROWS_AS(character(a), InsufficientPrecisionError);
}

TEST_CASE("three-valued equality") {
    Element a = Element::from_digits(Q5, 0, {2, 3}, true);
    Element b = Element::from_digits(Q5, 0, {2, 3}, true);
    Element c = Element::from_digits(Q5, 0, {2, 4}, true);
    CHECK(certified_equal(a, b) == std::nullopt);  // tails unknown
    CHECK(certified_equal(a, c) == std::optional<bool>(false));
    Element d = Element::from_integer(Q5, 12);
    CHECK(certified_equal(d, d) == std::optional<bool>(true));
}

TEST_CASE("negative rationals expand correctly in Q_p") {
    Element m1 = Element::from_integer(Q5, -1);
    CHECK(m1.ord() == 0);
    for (long i = 0; i < 6; ++i) CHECK(m1.digit(i) == 4);
    Element third = q5("1/3");
    // 1/3 = 2 + 3*5 + 1*25 + 3*125 + ... (3 * (2+15+25+...) == 1 mod powers)
    Rational acc = 0;
    for (long i = 0; i < 6; ++i) acc += Rational(third.digit(i)) * pow_rat(5, i);
    CHECK(ord_p(acc - Rational(1, 3), 5) >= 6);
}
