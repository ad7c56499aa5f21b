#pragma once

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include <fvtr/frational.hpp>
#include <fvtr/tpoly.hpp>

// Random inputs for property tests. Seeded from Catch2's --rng-seed so a
// failing run can be replayed.
namespace testgen
{

inline std::mt19937_64 &rng()
{
    static std::mt19937_64 gen(Catch::rngSeed());
    return gen;
}

inline int uniform(int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng());
}

inline fvtr::Rational small_rational()
{
    fvtr::Rational q(uniform(-9, 9), uniform(1, 5));
    q.canonicalize();
    return q;
}

inline fvtr::FPolynomial poly(int max_degree = 8)
{
    std::vector<fvtr::Rational> c(static_cast<std::size_t>(uniform(0, max_degree) + 1));
    for (auto &x : c) {
        x = small_rational();
    }
    return fvtr::FPolynomial(std::move(c));
}

inline fvtr::FRational frational(int max_degree = 8)
{
    fvtr::FPolynomial den;
    while (den.is_zero()) {
        den = poly(max_degree);
    }
    return fvtr::FRational(poly(max_degree), den);
}

inline fvtr::FRational nonzero_frational(int max_degree = 8)
{
    fvtr::FRational x;
    while (x.is_zero()) {
        x = frational(max_degree);
    }
    return x;
}

// Sparse polynomial with a handful of terms of bounded degree.
inline fvtr::TPolynomial<fvtr::FRational> tpoly(std::size_t arity, int terms = 5, int max_exp = 3)
{
    fvtr::TPolynomial<fvtr::FRational> p(arity);
    for (int k = 0; k < terms; ++k) {
        fvtr::Exponents e(arity);
        for (auto &x : e) {
            x = uniform(0, max_exp);
        }
        p.add_term(std::move(e), frational(2));
    }
    return p;
}

} // namespace testgen

template <>
struct Catch::StringMaker<fvtr::FRational> {
    static std::string convert(const fvtr::FRational &x)
    {
        return fvtr::to_string(x);
    }
};

template <>
struct Catch::StringMaker<fvtr::TPolynomial<fvtr::FRational>> {
    static std::string convert(const fvtr::TPolynomial<fvtr::FRational> &x)
    {
        return fvtr::to_string(x);
    }
};
