#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <fvtr/errors.hpp>
#include <fvtr/rational.hpp>

namespace fvtr
{

// Dense univariate polynomial in the framing parameter f with rational
// coefficients. coefficients()[k] is the coefficient of f^k; the vector never
// carries trailing zeros, so the zero polynomial is the empty vector.
class FPolynomial
{
public:
    FPolynomial() = default;
    FPolynomial(const Rational &c)
    {
        if (sgn(c) != 0) {
            m_c.push_back(c);
        }
    }
    FPolynomial(long c) : FPolynomial(Rational(c)) {}
    explicit FPolynomial(std::vector<Rational> coeffs) : m_c(std::move(coeffs))
    {
        trim();
    }

    static FPolynomial variable()
    {
        return FPolynomial(std::vector<Rational>{Rational(0), Rational(1)});
    }
    static FPolynomial monomial(const Rational &c, std::size_t k)
    {
        if (sgn(c) == 0) {
            return {};
        }
        std::vector<Rational> v(k + 1);
        v[k] = c;
        return FPolynomial(std::move(v));
    }

    bool is_zero() const
    {
        return m_c.empty();
    }
    // -1 for the zero polynomial.
    int degree() const
    {
        return static_cast<int>(m_c.size()) - 1;
    }
    const std::vector<Rational> &coefficients() const
    {
        return m_c;
    }
    Rational coeff(int k) const
    {
        if (k < 0 || k > degree()) {
            return Rational(0);
        }
        return m_c[static_cast<std::size_t>(k)];
    }
    const Rational &leading() const
    {
        if (m_c.empty()) {
            throw error("leading coefficient of the zero polynomial");
        }
        return m_c.back();
    }
    bool is_constant() const
    {
        return m_c.size() <= 1;
    }
    bool is_one() const
    {
        return m_c.size() == 1 && m_c[0] == 1;
    }
    // Multiplicity of f as a factor (0 for the zero polynomial).
    std::size_t low_order() const
    {
        std::size_t k = 0;
        while (k < m_c.size() && sgn(m_c[k]) == 0) {
            ++k;
        }
        return k == m_c.size() ? 0 : k;
    }

    Rational operator()(const Rational &x) const
    {
        Rational acc(0);
        for (auto it = m_c.rbegin(); it != m_c.rend(); ++it) {
            acc *= x;
            acc += *it;
        }
        return acc;
    }

    FPolynomial derivative() const
    {
        if (m_c.size() <= 1) {
            return {};
        }
        std::vector<Rational> d(m_c.size() - 1);
        for (std::size_t k = 1; k < m_c.size(); ++k) {
            d[k - 1] = m_c[k] * static_cast<long>(k);
        }
        return FPolynomial(std::move(d));
    }

    // Divide by f^k, assuming the low k coefficients are zero.
    FPolynomial shifted_down(std::size_t k) const
    {
        if (k == 0 || m_c.empty()) {
            return *this;
        }
        FPolynomial r;
        r.m_c.assign(m_c.begin() + static_cast<std::ptrdiff_t>(std::min(k, m_c.size())), m_c.end());
        return r;
    }
    FPolynomial shifted_up(std::size_t k) const
    {
        if (k == 0 || m_c.empty()) {
            return *this;
        }
        FPolynomial r;
        r.m_c.assign(k, Rational(0));
        r.m_c.insert(r.m_c.end(), m_c.begin(), m_c.end());
        return r;
    }

    FPolynomial operator-() const
    {
        FPolynomial r(*this);
        for (auto &c : r.m_c) {
            c = -c;
        }
        return r;
    }
    FPolynomial &operator+=(const FPolynomial &o)
    {
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size());
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] += o.m_c[k];
        }
        trim();
        return *this;
    }
    FPolynomial &operator-=(const FPolynomial &o)
    {
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size());
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] -= o.m_c[k];
        }
        trim();
        return *this;
    }
    FPolynomial &operator*=(const Rational &c)
    {
        if (sgn(c) == 0) {
            m_c.clear();
            return *this;
        }
        for (auto &x : m_c) {
            x *= c;
        }
        return *this;
    }
    FPolynomial &operator/=(const Rational &c)
    {
        if (sgn(c) == 0) {
            throw division_by_zero("polynomial divided by zero scalar");
        }
        for (auto &x : m_c) {
            x /= c;
        }
        return *this;
    }

    friend FPolynomial operator+(FPolynomial a, const FPolynomial &b)
    {
        a += b;
        return a;
    }
    friend FPolynomial operator-(FPolynomial a, const FPolynomial &b)
    {
        a -= b;
        return a;
    }
    friend FPolynomial operator*(const FPolynomial &a, const FPolynomial &b)
    {
        if (a.m_c.empty() || b.m_c.empty()) {
            return {};
        }
        std::vector<Rational> r(a.m_c.size() + b.m_c.size() - 1);
        Rational tmp;
        for (std::size_t i = 0; i < a.m_c.size(); ++i) {
            if (sgn(a.m_c[i]) == 0) {
                continue;
            }
            for (std::size_t j = 0; j < b.m_c.size(); ++j) {
                mpq_mul(tmp.get_mpq_t(), a.m_c[i].get_mpq_t(), b.m_c[j].get_mpq_t());
                r[i + j] += tmp;
            }
        }
        return FPolynomial(std::move(r));
    }
    friend FPolynomial operator*(FPolynomial a, const Rational &c)
    {
        a *= c;
        return a;
    }
    friend FPolynomial operator*(const Rational &c, FPolynomial a)
    {
        a *= c;
        return a;
    }
    friend bool operator==(const FPolynomial &a, const FPolynomial &b)
    {
        return a.m_c == b.m_c;
    }

private:
    void trim()
    {
        while (!m_c.empty() && sgn(m_c.back()) == 0) {
            m_c.pop_back();
        }
    }

    std::vector<Rational> m_c;
};

// Euclidean division: a = q*b + r with deg r < deg b.
inline std::pair<FPolynomial, FPolynomial> divmod(const FPolynomial &a, const FPolynomial &b)
{
    if (b.is_zero()) {
        throw division_by_zero("polynomial division by zero");
    }
    if (a.degree() < b.degree()) {
        return {FPolynomial{}, a};
    }
    std::vector<Rational> rem = a.coefficients();
    const auto &bc = b.coefficients();
    const std::size_t db = bc.size() - 1;
    const Rational inv_lc = 1 / bc.back();
    std::vector<Rational> q(rem.size() - db);
    Rational tmp;
    for (std::size_t k = rem.size(); k-- > db;) {
        if (sgn(rem[k]) == 0) {
            continue;
        }
        const Rational c = rem[k] * inv_lc;
        q[k - db] = c;
        for (std::size_t j = 0; j <= db; ++j) {
            mpq_mul(tmp.get_mpq_t(), c.get_mpq_t(), bc[j].get_mpq_t());
            rem[k - db + j] -= tmp;
        }
    }
    rem.resize(db);
    return {FPolynomial(std::move(q)), FPolynomial(std::move(rem))};
}

// Quotient of a division known to be exact.
inline FPolynomial exact_quotient(const FPolynomial &a, const FPolynomial &b)
{
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) {
        throw error("exact_quotient: nonzero remainder");
    }
    return q;
}

inline FPolynomial make_monic(FPolynomial p)
{
    if (!p.is_zero()) {
        const Rational lc = p.leading();
        p /= lc;
    }
    return p;
}

// Monic gcd via the Euclidean algorithm over Q; gcd(0, 0) = 0.
inline FPolynomial gcd(FPolynomial a, FPolynomial b)
{
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = make_monic(std::move(r));
    }
    return make_monic(std::move(a));
}

// Synthetic division by (f - root). Returns quotient and remainder p(root).
inline std::pair<FPolynomial, Rational> divide_linear(const FPolynomial &p, const Rational &root)
{
    const auto &c = p.coefficients();
    if (c.empty()) {
        return {FPolynomial{}, Rational(0)};
    }
    std::vector<Rational> q(c.size() - 1);
    Rational acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        q[k] = acc;
        acc *= root;
        acc += c[k];
    }
    return {FPolynomial(std::move(q)), acc};
}

// Writes p = content * P with P an integer polynomial of positive leading
// coefficient and coprime coefficients. Returns (content, P).
inline std::pair<Rational, std::vector<Integer>> primitive_form(const FPolynomial &p)
{
    const auto &c = p.coefficients();
    if (c.empty()) {
        return {Rational(0), {}};
    }
    Integer den_lcm(1), num_gcd(0);
    for (const auto &x : c) {
        if (sgn(x) != 0) {
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den_mpz_t());
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), x.get_num_mpz_t());
        }
    }
    Rational content(num_gcd, den_lcm);
    content.canonicalize();
    if (sgn(c.back()) < 0) {
        content = -content;
    }
    std::vector<Integer> ints(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        Rational q = c[k] / content;
        ints[k] = q.get_num();
    }
    return {content, ints};
}

// Renders an integer-coefficient polynomial in descending powers, e.g. "2*f^3-f+1".
inline std::string integer_poly_string(const std::vector<Integer> &c)
{
    std::string out;
    bool first = true;
    for (std::size_t k = c.size(); k-- > 0;) {
        if (c[k] == 0) {
            continue;
        }
        Integer mag = abs(c[k]);
        const bool neg = c[k] < 0;
        if (neg) {
            out += "-";
        } else if (!first) {
            out += "+";
        }
        if (k == 0) {
            out += mag.get_str();
        } else {
            if (mag != 1) {
                out += mag.get_str() + "*";
            }
            out += "f";
            if (k > 1) {
                out += "^" + std::to_string(k);
            }
        }
        first = false;
    }
    return first ? std::string("0") : out;
}

inline std::size_t term_count(const std::vector<Integer> &c)
{
    return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](const Integer &x) { return x != 0; }));
}

inline std::string to_string(const FPolynomial &p)
{
    auto [content, prim] = primitive_form(p);
    if (p.is_zero()) {
        return "0";
    }
    // content * prim, written as (num_int * prim) / den_int
    std::vector<Integer> num(prim.size());
    for (std::size_t k = 0; k < prim.size(); ++k) {
        num[k] = prim[k] * content.get_num();
    }
    std::string s = integer_poly_string(num);
    if (content.get_den() != 1) {
        if (term_count(num) > 1) {
            s = "(" + s + ")";
        }
        s += "/" + content.get_den().get_str();
    }
    return s;
}

} // namespace fvtr
