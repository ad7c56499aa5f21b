#include <catch2/catch_amalgamated.hpp>

#include <fvtr/frational.hpp>

#include "random_values.hpp"

using fvtr::FPolynomial;
using fvtr::FRational;
using fvtr::parse_frational;
using fvtr::Rational;

namespace
{

FRational F(const char *s)
{
    return parse_frational(s);
}

const FRational f = FRational::f();

} // namespace

TEST_CASE("rational arithmetic")
{
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(fvtr::parse_rational("-6/4") == Rational(-3, 2));
    CHECK(fvtr::to_string(Rational(-3, 2)) == "-3/2");
    CHECK_THROWS_AS(fvtr::parse_rational("1/0"), fvtr::division_by_zero);
    CHECK_THROWS_AS(fvtr::parse_rational("x"), fvtr::parse_error);
}

TEST_CASE("normalization cancels the gcd")
{
    const FRational x(FPolynomial(std::vector<Rational>{-1, 0, 1}), FPolynomial(std::vector<Rational>{-1, 1}));
    CHECK(x == f + 1);
    CHECK(x.den().is_one());

    CHECK((FRational(1) / (f + 1)) * (f + 1) == FRational(1));
    CHECK(FRational(Rational(1, 2)) + FRational(Rational(1, 3)) == FRational(Rational(5, 6)));

    // a common factor that is neither f nor f+1
    const FRational y = ((f - 2) * (f + 3)) / ((f - 2) * (f * f + 1));
    CHECK(y == (f + 3) / (f * f + 1));

    // denominators are monic and zero is 0/1
    const FRational z = FRational(1) / (f * 2 + 4);
    CHECK(z.den() == FPolynomial(std::vector<Rational>{2, 1}));
    CHECK(z.num() == FPolynomial(Rational(1, 2)));
    const FRational zero = f - f;
    CHECK(zero.is_zero());
    CHECK(zero.den().is_one());
}

TEST_CASE("division by zero")
{
    CHECK_THROWS_AS(f / FRational(0), fvtr::division_by_zero);
    CHECK_THROWS_AS(FRational(FPolynomial(1), FPolynomial()), fvtr::division_by_zero);
}

TEST_CASE("derivative in f")
{
    CHECK(fvtr::derivative_f(f) == FRational(1));
    CHECK(fvtr::derivative_f(FRational(1) / (f + 1)) == FRational(-1) / ((f + 1) * (f + 1)));
    CHECK(fvtr::derivative_f(f * f / (f + 1)) == (f * f + f * 2) / ((f + 1) * (f + 1)));
    CHECK(fvtr::derivative_f(FRational(7)).is_zero());
}

TEST_CASE("evaluation at a framing value")
{
    CHECK(fvtr::evaluate_at(f * f / (f + 1), Rational(2)) == Rational(4, 3));
    CHECK_THROWS_AS(fvtr::evaluate_at(FRational(1) / (f + 1), Rational(-1)), fvtr::pole_at_framing);
    CHECK(fvtr::evaluate_at(F("(f^2+f+1)/24"), Rational(1)) == Rational(1, 8));
}

TEST_CASE("canonical text round trip")
{
    CHECK(fvtr::to_string(F("(f^2+f+1)/24")) == "(f^2+f+1)/24");
    CHECK(fvtr::to_string(-f * (f + 1) / 24) == "(-f^2-f)/24");
    CHECK(fvtr::to_string(-(f * f) / ((f + 1) * (f + 1) * (f + 1) * 2)) == "-f^2/(2*f^3+6*f^2+6*f+2)");
    CHECK(fvtr::to_string(f * f / (f + 1)) == "f^2/(f+1)");
    CHECK(fvtr::to_string(FRational(1) / (f * f)) == "1/f^2");
    CHECK(fvtr::to_string(FRational(Rational(-3, 7))) == "-3/7");
    CHECK(fvtr::to_string(FRational(0)) == "0");
    CHECK(F("2*f/(f+1)") == f * 2 / (f + 1));
    CHECK_THROWS_AS(F("f+"), fvtr::parse_error);
    CHECK_THROWS_AS(F("(f+1"), fvtr::parse_error);
    CHECK_THROWS_AS(F("1/(f-f)"), fvtr::division_by_zero);
    for (int k = 0; k < 200; ++k) {
        const FRational x = testgen::frational();
        CHECK(F(fvtr::to_string(x).c_str()) == x);
    }
}

TEST_CASE("field laws on random inputs")
{
    for (int k = 0; k < 60; ++k) {
        const FRational a = testgen::frational(), b = testgen::frational(), c = testgen::frational();
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a - a == FRational(0));
        if (!a.is_zero()) {
            CHECK(a * (FRational(1) / a) == FRational(1));
        }
        // normalization is idempotent
        CHECK(FRational(a.num(), a.den()) == a);
    }
}

TEST_CASE("derivative_f is a derivation")
{
    for (int k = 0; k < 40; ++k) {
        const FRational a = testgen::frational(4), b = testgen::frational(4);
        CHECK(fvtr::derivative_f(a * b) == a * fvtr::derivative_f(b) + b * fvtr::derivative_f(a));
        CHECK(fvtr::derivative_f(a + b) == fvtr::derivative_f(a) + fvtr::derivative_f(b));
    }
}

TEST_CASE("evaluation is a ring homomorphism")
{
    int checked = 0;
    for (int k = 0; k < 60; ++k) {
        const FRational a = testgen::frational(4), b = testgen::frational(4);
        const Rational x = testgen::small_rational();
        try {
            const Rational ea = fvtr::evaluate_at(a, x), eb = fvtr::evaluate_at(b, x);
            CHECK(fvtr::evaluate_at(a + b, x) == ea + eb);
            CHECK(fvtr::evaluate_at(a * b, x) == ea * eb);
            ++checked;
        } catch (const fvtr::pole_at_framing &) {
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("polynomial helpers")
{
    const FPolynomial p(std::vector<Rational>{1, -1, 0, 2});
    CHECK(fvtr::to_string(p) == "2*f^3-f+1");
    auto [q, r] = fvtr::divide_linear(p, Rational(1));
    CHECK(r == Rational(2));
    CHECK(q * FPolynomial(std::vector<Rational>{-1, 1}) + FPolynomial(r) == p);
    auto [dq, dr] = fvtr::divmod(p, FPolynomial(std::vector<Rational>{1, 1}));
    CHECK(dq * FPolynomial(std::vector<Rational>{1, 1}) + dr == p);
    CHECK(fvtr::gcd(p * FPolynomial(std::vector<Rational>{3, 1}), FPolynomial(std::vector<Rational>{3, 1}) * Rational(5))
          == FPolynomial(std::vector<Rational>{3, 1}));
}
