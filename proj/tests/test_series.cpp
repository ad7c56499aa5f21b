#include <catch2/catch_amalgamated.hpp>

#include <fvtr/series.hpp>

using fvtr::FRational;
using fvtr::Rational;
using S = fvtr::VSeries<FRational>;
using Q = fvtr::VSeries<Rational>;

namespace
{

// 1 + v known through v^n
Q one_plus_v(int n)
{
    return Q(0, {Rational(1), Rational(1)}, n);
}

Q v_exact()
{
    return Q::monomial(Rational(1), 1);
}

} // namespace

TEST_CASE("basic series arithmetic")
{
    const Q a(0, {1, 1}, Q::exact), b(0, {1, -1}, Q::exact);
    CHECK(a * b == Q(0, {1, 0, -1}, Q::exact));

    const Q geo = Q::constant(1) / Q(0, {1, -1}, 6);
    REQUIRE(geo.trunc() == 6);
    for (int k = 0; k <= 6; ++k) {
        CHECK(geo.coeff(k) == 1);
    }
    CHECK_THROWS_AS(geo.coeff(7), fvtr::insufficient_truncation);

    CHECK(Q::monomial(1, -1).derivative() == Q::monomial(-1, -2));
    CHECK_THROWS_AS(Q::constant(1) / Q::zero(4), fvtr::zero_divisor);
}

TEST_CASE("truncation orders track leading orders")
{
    // (v^-1 + O(v^3)) * (v^2 + O(v^5)) is known through v^4
    const Q a(-1, {1}, 3), b(2, {1}, 5);
    CHECK((a * b).trunc() == 4);
    // 1/(v + v^2 + O(v^4)): lead -1, known through v^2
    const Q c(1, {1, 1}, 4);
    const Q inv = fvtr::inverse(c);
    CHECK(inv.lead() == -1);
    CHECK(inv.trunc() == 2);
    CHECK((inv * c).truncated(3) == Q(0, {1}, 3));
    CHECK(Q(0, {1, 1}, 5).shifted(-2).lead() == -2);
}

TEST_CASE("square roots of units")
{
    CHECK(fvtr::sqrt_unit(Q::constant(1)) == Q::constant(1));
    const Q r = fvtr::sqrt_unit(one_plus_v(5));
    CHECK(r.coeff(1) == Rational(1, 2));
    CHECK(r.coeff(2) == Rational(-1, 8));
    CHECK(r.coeff(3) == Rational(1, 16));
    CHECK(r * r == one_plus_v(5));
    CHECK_THROWS_AS(fvtr::sqrt_unit(Q(0, {2, 1}, 5)), fvtr::not_a_unit);
    CHECK_THROWS_AS(fvtr::sqrt_unit(Q(1, {1}, 5)), fvtr::not_a_unit);
}

TEST_CASE("logarithms and exponentials")
{
    CHECK(fvtr::log_unit(Q::constant(1)).is_zero());
    const Q l = fvtr::log_unit(one_plus_v(8));
    for (int k = 1; k <= 8; ++k) {
        CHECK(l.coeff(k) == Rational(k % 2 ? 1 : -1, k));
    }
    CHECK(fvtr::exp_series(l) == one_plus_v(8));

    const Q w(0, {1, 0, 3, -2, 5}, 8);
    CHECK(fvtr::log_unit(one_plus_v(8) * w) == l + fvtr::log_unit(w));
    CHECK(fvtr::exp_series(fvtr::log_unit(w)) == w);
    CHECK_THROWS_AS(fvtr::log_unit(Q(0, {3}, 4)), fvtr::not_a_unit);
}

TEST_CASE("composition")
{
    const Q outer = Q::monomial(1, 2);
    const Q inner(1, {1, 1}, Q::exact);
    CHECK(fvtr::compose(outer, inner) == Q(2, {1, 2, 1}, Q::exact));

    const Q g(0, {3, 1, 4, 1, 5}, 4);
    CHECK(fvtr::compose(g, v_exact()) == g);

    // 1/(1-x) at x = v + v^2 known through v^5 equals 1/(1-v-v^2)
    const Q geo = Q::constant(1) / Q(0, {1, -1}, 5);
    const Q comp = fvtr::compose(geo, Q(1, {1, 1}, Q::exact));
    CHECK(comp.trunc() == 5);
    CHECK(comp == Q::constant(1) / Q(0, {1, -1, -1}, 5));

    // polynomial outer at a Laurent inner
    const Q t(-1, {1, 2, 3}, 4);
    const Q poly(0, {-1, 1}, Q::exact);
    CHECK(fvtr::compose(poly, t) == t - Q::constant(1));
    CHECK_THROWS_AS(fvtr::compose(geo, t), fvtr::invalid_composition);
}

TEST_CASE("reversion")
{
    CHECK(fvtr::revert(v_exact()) == v_exact());
    // revert(z - z^2) = sum Catalan(k-1) v^k
    const Q a(1, {1, -1}, 8);
    const Q r = fvtr::revert(a);
    const int catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
    for (int k = 1; k <= 8; ++k) {
        CHECK(r.coeff(k) == catalan[k - 1]);
    }
    CHECK(fvtr::compose(a, r) == Q(1, {1}, 8));
    CHECK(fvtr::compose(r, a) == Q(1, {1}, 8));
    CHECK_THROWS_AS(fvtr::revert(Q(2, {1}, 8)), fvtr::not_invertible);
    CHECK_THROWS_AS(fvtr::revert(Q(0, {1, 1}, 8)), fvtr::not_invertible);
}

TEST_CASE("parity helpers and reflection")
{
    const Q a(-1, {1, 2, 3, 4}, 6);
    CHECK((a + a.reflected()).is_even());
    CHECK((a - a.reflected()).is_odd());
    CHECK(!a.is_even());
    CHECK(a.reflected().reflected() == a);
}

TEST_CASE("series over the rational function field")
{
    const FRational f = FRational::f();
    const S a(0, {FRational(1), f, f * f}, 6);
    const S inv = S::constant(FRational(1)) / a;
    CHECK((a * inv).truncated(6) == S(0, {FRational(1)}, 6));
    CHECK(a.dump().find("1 f\n") != std::string::npos);
}
