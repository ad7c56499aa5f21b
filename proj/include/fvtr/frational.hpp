#pragma once

#include <cctype>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fvtr/errors.hpp>
#include <fvtr/fpoly.hpp>
#include <fvtr/rational.hpp>

namespace fvtr
{

// An element of Q(f), stored as num/den with gcd(num, den) = 1 and den monic.
// The canonical zero is 0/1, so structural equality is value equality.
class FRational
{
public:
    FRational() : m_den(1) {}
    FRational(const Rational &c) : m_num(c), m_den(1) {}
    FRational(long c) : FRational(Rational(c)) {}
    FRational(FPolynomial p) : m_num(std::move(p)), m_den(1) {}
    FRational(FPolynomial num, FPolynomial den) : m_num(std::move(num)), m_den(std::move(den))
    {
        if (m_den.is_zero()) {
            throw division_by_zero("rational function with zero denominator");
        }
        normalize();
    }

    // The framing parameter f itself.
    static FRational f()
    {
        return FRational(FPolynomial::variable());
    }

    const FPolynomial &num() const
    {
        return m_num;
    }
    const FPolynomial &den() const
    {
        return m_den;
    }
    bool is_zero() const
    {
        return m_num.is_zero();
    }
    bool is_polynomial() const
    {
        return m_den.is_one();
    }

    FRational operator-() const
    {
        FRational r;
        r.m_num = -m_num;
        r.m_den = m_den;
        return r;
    }
    FRational &operator+=(const FRational &o)
    {
        return *this = *this + o;
    }
    FRational &operator-=(const FRational &o)
    {
        return *this = *this - o;
    }
    FRational &operator*=(const FRational &o)
    {
        return *this = *this * o;
    }
    FRational &operator/=(const FRational &o)
    {
        return *this = *this / o;
    }

    friend FRational operator+(const FRational &a, const FRational &b)
    {
        if (a.is_zero()) {
            return b;
        }
        if (b.is_zero()) {
            return a;
        }
        if (a.m_den == b.m_den) {
            return from_parts(a.m_num + b.m_num, a.m_den);
        }
        if (a.m_den.is_one()) {
            return from_parts(a.m_num * b.m_den + b.m_num, b.m_den, true);
        }
        if (b.m_den.is_one()) {
            return from_parts(a.m_num + b.m_num * a.m_den, a.m_den, true);
        }
        return from_parts(a.m_num * b.m_den + b.m_num * a.m_den, a.m_den * b.m_den);
    }
    friend FRational operator-(const FRational &a, const FRational &b)
    {
        return a + (-b);
    }
    friend FRational operator*(const FRational &a, const FRational &b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        if (a.m_den.is_one() && b.m_den.is_one()) {
            FRational r;
            r.m_num = a.m_num * b.m_num;
            return r;
        }
        if (b.m_num.is_constant() && b.m_den.is_one()) {
            FRational r(a);
            r.m_num *= b.m_num.leading();
            return r;
        }
        if (a.m_num.is_constant() && a.m_den.is_one()) {
            FRational r(b);
            r.m_num *= a.m_num.leading();
            return r;
        }
        return from_parts(a.m_num * b.m_num, a.m_den * b.m_den);
    }
    friend FRational operator/(const FRational &a, const FRational &b)
    {
        if (b.is_zero()) {
            throw division_by_zero("division by the zero rational function");
        }
        if (a.is_zero()) {
            return {};
        }
        if (b.m_num.is_constant() && b.m_den.is_one()) {
            FRational r(a);
            r.m_num /= b.m_num.leading();
            return r;
        }
        return from_parts(a.m_num * b.m_den, a.m_den * b.m_num);
    }
    friend bool operator==(const FRational &a, const FRational &b)
    {
        return a.m_num == b.m_num && a.m_den == b.m_den;
    }

private:
    static FRational from_parts(FPolynomial num, FPolynomial den, bool coprime = false)
    {
        FRational r;
        r.m_num = std::move(num);
        r.m_den = std::move(den);
        if (coprime) {
            r.make_den_monic();
        } else {
            r.normalize();
        }
        return r;
    }

    void make_den_monic()
    {
        if (m_num.is_zero()) {
            m_den = FPolynomial(1);
            return;
        }
        const Rational lc = m_den.leading();
        if (lc != 1) {
            m_num /= lc;
            m_den /= lc;
        }
    }

    // Cancels gcd(num, den). The factors f and f+1 are split off first by
    // evaluation; when den has no other factor that settles the gcd without
    // running Euclid.
    void normalize()
    {
        if (m_num.is_zero()) {
            m_den = FPolynomial(1);
            return;
        }
        if (m_den.is_constant()) {
            make_den_monic();
            return;
        }
        const std::size_t k = std::min(m_num.low_order(), m_den.low_order());
        if (k > 0) {
            m_num = m_num.shifted_down(k);
            m_den = m_den.shifted_down(k);
        }
        const Rational minus_one(-1);
        while (!m_den.is_constant() && !m_num.is_constant()) {
            auto [qd, rd] = divide_linear(m_den, minus_one);
            if (sgn(rd) != 0) {
                break;
            }
            auto [qn, rn] = divide_linear(m_num, minus_one);
            if (sgn(rn) != 0) {
                break;
            }
            m_num = std::move(qn);
            m_den = std::move(qd);
        }
        if (!m_den.is_constant() && !m_num.is_constant() && !only_special_factors(m_den)) {
            FPolynomial g = gcd(m_num, m_den);
            if (!g.is_one()) {
                m_num = exact_quotient(m_num, g);
                m_den = exact_quotient(m_den, g);
            }
        }
        make_den_monic();
    }

    // True when p = c * f^a * (f+1)^b.
    static bool only_special_factors(const FPolynomial &p)
    {
        FPolynomial q = p.shifted_down(p.low_order());
        const Rational minus_one(-1);
        while (!q.is_constant()) {
            auto [qq, r] = divide_linear(q, minus_one);
            if (sgn(r) != 0) {
                return false;
            }
            q = std::move(qq);
        }
        return true;
    }

    FPolynomial m_num;
    FPolynomial m_den;
};

inline bool is_zero(const FRational &x)
{
    return x.is_zero();
}
inline bool is_zero(const Rational &x)
{
    return sgn(x) == 0;
}

// Integer power; negative exponents invert.
inline FRational pow(const FRational &x, int k)
{
    if (k < 0) {
        return FRational(1) / pow(x, -k);
    }
    FRational r(1), b(x);
    while (k > 0) {
        if (k & 1) {
            r *= b;
        }
        k >>= 1;
        if (k > 0) {
            b *= b;
        }
    }
    return r;
}

// d/df by the quotient rule.
inline FRational derivative_f(const FRational &a)
{
    if (a.is_polynomial()) {
        return FRational(a.num().derivative());
    }
    return FRational(a.num().derivative() * a.den() - a.num() * a.den().derivative(), a.den() * a.den());
}

inline Rational evaluate_at(const FRational &a, const Rational &f0)
{
    const Rational d = a.den()(f0);
    if (sgn(d) == 0) {
        throw pole_at_framing("denominator " + to_string(a.den()) + " vanishes at f = " + to_string(f0));
    }
    return a.num()(f0) / d;
}

// Canonical text form, e.g. "(f^2+f+1)/24" or "-f^2/(2*f^3+6*f^2+6*f+2)": integer
// polynomials in f, numerator carrying the sign, denominator with positive
// leading coefficient and omitted when it is 1.
inline std::string to_string(const FRational &a)
{
    if (a.is_zero()) {
        return "0";
    }
    auto [cn, pn] = primitive_form(a.num());
    auto [cd, pd] = primitive_form(a.den());
    Rational c = cn / cd;
    for (auto &x : pn) {
        x *= c.get_num();
    }
    for (auto &x : pd) {
        x *= c.get_den();
    }
    std::string num = integer_poly_string(pn);
    if (pd.size() == 1 && pd[0] == 1) {
        return num;
    }
    std::string den = integer_poly_string(pd);
    const bool bare_den = term_count(pd) == 1 && (pd.size() == 1 || pd.back() == 1);
    if (term_count(pn) > 1) {
        num = "(" + num + ")";
    }
    if (!bare_den) {
        den = "(" + den + ")";
    }
    return num + "/" + den;
}

namespace detail
{

inline FPolynomial parse_integer_poly(std::string_view s, std::string_view whole)
{
    auto fail = [&](const std::string &why) -> FPolynomial {
        throw parse_error("cannot parse '" + std::string(whole) + "': " + why);
    };
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        s = s.substr(1, s.size() - 2);
    }
    if (s.empty()) {
        return fail("empty polynomial");
    }
    std::vector<Rational> coeffs;
    std::size_t i = 0;
    bool any = false;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        } else if (any) {
            return fail("expected sign between terms");
        }
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
            ++j;
        }
        Integer c(1);
        bool has_digits = j > i;
        if (has_digits) {
            c = Integer(std::string(s.substr(i, j - i)));
        }
        i = j;
        std::size_t k = 0;
        if (i < s.size() && s[i] == '*') {
            if (!has_digits) {
                return fail("dangling '*'");
            }
            ++i;
            if (i >= s.size() || s[i] != 'f') {
                return fail("expected f after '*'");
            }
        }
        if (i < s.size() && s[i] == 'f') {
            ++i;
            k = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t e = i;
                while (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) {
                    ++e;
                }
                if (e == i) {
                    return fail("missing exponent");
                }
                k = std::stoul(std::string(s.substr(i, e - i)));
                i = e;
            }
        } else if (!has_digits) {
            return fail("empty term");
        }
        if (coeffs.size() <= k) {
            coeffs.resize(k + 1);
        }
        coeffs[k] += Rational(sign * c);
        any = true;
    }
    return FPolynomial(std::move(coeffs));
}

} // namespace detail

// Inverse of to_string. Also accepts any integer-coefficient NUM or NUM/DEN
// with optional parentheses, so hand-written values like "f^2/(f+1)" parse.
inline FRational parse_frational(std::string_view text)
{
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s.push_back(c);
        }
    }
    int depth = 0;
    std::size_t slash = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')') {
            --depth;
        } else if (s[i] == '/' && depth == 0) {
            if (slash != std::string::npos) {
                throw parse_error("cannot parse '" + std::string(text) + "': more than one '/'");
            }
            slash = i;
        }
    }
    if (depth != 0) {
        throw parse_error("cannot parse '" + std::string(text) + "': unbalanced parentheses");
    }
    std::string_view sv(s);
    FPolynomial num = detail::parse_integer_poly(sv.substr(0, slash), text);
    FPolynomial den = slash == std::string::npos ? FPolynomial(1) : detail::parse_integer_poly(sv.substr(slash + 1), text);
    if (den.is_zero()) {
        throw division_by_zero("zero denominator in '" + std::string(text) + "'");
    }
    return FRational(std::move(num), std::move(den));
}

} // namespace fvtr

template <>
struct std::hash<fvtr::FRational> {
    std::size_t operator()(const fvtr::FRational &x) const
    {
        return std::hash<std::string>{}(fvtr::to_string(x));
    }
};
