#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>

namespace fvtr
{

using Exponents = std::vector<int>;

// Graded lexicographic order: total degree first, then lexicographic.
struct graded_lex_less {
    bool operator()(const Exponents &a, const Exponents &b) const
    {
        const int da = std::accumulate(a.begin(), a.end(), 0);
        const int db = std::accumulate(b.begin(), b.end(), 0);
        if (da != db) {
            return da < db;
        }
        return a < b;
    }
};

// Sparse polynomial in t_1..t_n (0-based variable indices in the API) with
// coefficients in C. Zero coefficients are never stored.
template <typename C>
class TPolynomial
{
public:
    using coefficient_type = C;
    using term_map = std::map<Exponents, C, graded_lex_less>;

    explicit TPolynomial(std::size_t arity = 1) : m_arity(arity) {}

    static TPolynomial constant(std::size_t arity, const C &c)
    {
        TPolynomial p(arity);
        p.add_term(Exponents(arity, 0), c);
        return p;
    }
    static TPolynomial variable(std::size_t arity, std::size_t i)
    {
        check_index(arity, i);
        TPolynomial p(arity);
        Exponents e(arity, 0);
        e[i] = 1;
        p.add_term(std::move(e), C(1));
        return p;
    }
    // sum_k coeffs[k] * t_i^k
    static TPolynomial univariate(std::size_t arity, std::size_t i, const std::vector<C> &coeffs)
    {
        check_index(arity, i);
        TPolynomial p(arity);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            Exponents e(arity, 0);
            e[i] = static_cast<int>(k);
            p.add_term(std::move(e), coeffs[k]);
        }
        return p;
    }

    std::size_t arity() const
    {
        return m_arity;
    }
    const term_map &terms() const
    {
        return m_terms;
    }
    bool is_zero() const
    {
        return m_terms.empty();
    }
    std::size_t size() const
    {
        return m_terms.size();
    }
    C coefficient(const Exponents &e) const
    {
        auto it = m_terms.find(e);
        return it == m_terms.end() ? C(0) : it->second;
    }
    // -1 for the zero polynomial.
    int degree_in(std::size_t i) const
    {
        check_index(m_arity, i);
        int d = -1;
        for (const auto &[e, c] : m_terms) {
            d = std::max(d, e[i]);
        }
        return d;
    }
    int total_degree() const
    {
        return m_terms.empty() ? -1 : std::accumulate(m_terms.rbegin()->first.begin(), m_terms.rbegin()->first.end(), 0);
    }

    void add_term(Exponents e, const C &c)
    {
        if (e.size() != m_arity) {
            throw arity_mismatch("exponent vector of length " + std::to_string(e.size()) + " in arity "
                                 + std::to_string(m_arity));
        }
        if (is_zero_coeff(c)) {
            return;
        }
        auto [it, inserted] = m_terms.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (is_zero_coeff(it->second)) {
                m_terms.erase(it);
            }
        }
    }

    TPolynomial operator-() const
    {
        TPolynomial r(*this);
        for (auto &[e, c] : r.m_terms) {
            c = -c;
        }
        return r;
    }
    TPolynomial &operator+=(const TPolynomial &o)
    {
        check_arity(o);
        for (const auto &[e, c] : o.m_terms) {
            add_term(e, c);
        }
        return *this;
    }
    TPolynomial &operator-=(const TPolynomial &o)
    {
        check_arity(o);
        for (const auto &[e, c] : o.m_terms) {
            add_term(e, -c);
        }
        return *this;
    }
    TPolynomial &operator*=(const C &s)
    {
        if (is_zero_coeff(s)) {
            m_terms.clear();
            return *this;
        }
        for (auto &[e, c] : m_terms) {
            c *= s;
        }
        return *this;
    }

    friend TPolynomial operator+(TPolynomial a, const TPolynomial &b)
    {
        a += b;
        return a;
    }
    friend TPolynomial operator-(TPolynomial a, const TPolynomial &b)
    {
        a -= b;
        return a;
    }
    friend TPolynomial operator*(TPolynomial a, const C &s)
    {
        a *= s;
        return a;
    }
    friend TPolynomial operator*(const C &s, TPolynomial a)
    {
        a *= s;
        return a;
    }
    friend TPolynomial operator*(const TPolynomial &a, const TPolynomial &b)
    {
        a.check_arity(b);
        TPolynomial r(a.m_arity);
        Exponents e(a.m_arity);
        for (const auto &[ea, ca] : a.m_terms) {
            for (const auto &[eb, cb] : b.m_terms) {
                for (std::size_t k = 0; k < e.size(); ++k) {
                    e[k] = ea[k] + eb[k];
                }
                C prod = ca * cb;
                auto [it, inserted] = r.m_terms.try_emplace(e, prod);
                if (!inserted) {
                    it->second += prod;
                }
            }
        }
        std::erase_if(r.m_terms, [](const auto &kv) { return is_zero_coeff(kv.second); });
        return r;
    }
    friend bool operator==(const TPolynomial &a, const TPolynomial &b)
    {
        return a.m_arity == b.m_arity && a.m_terms == b.m_terms;
    }

    void check_arity(const TPolynomial &o) const
    {
        if (o.m_arity != m_arity) {
            throw arity_mismatch("arity " + std::to_string(m_arity) + " vs " + std::to_string(o.m_arity));
        }
    }
    static void check_index(std::size_t arity, std::size_t i)
    {
        if (i >= arity) {
            throw index_out_of_range("variable index " + std::to_string(i) + " in arity " + std::to_string(arity));
        }
    }

private:
    static bool is_zero_coeff(const C &c)
    {
        using fvtr::is_zero;
        return is_zero(c);
    }

    std::size_t m_arity;
    term_map m_terms;
};

template <typename C>
TPolynomial<C> partial_derivative(const TPolynomial<C> &p, std::size_t i)
{
    TPolynomial<C>::check_index(p.arity(), i);
    TPolynomial<C> r(p.arity());
    for (const auto &[e, c] : p.terms()) {
        if (e[i] == 0) {
            continue;
        }
        Exponents d = e;
        d[i] -= 1;
        r.add_term(std::move(d), c * C(e[i]));
    }
    return r;
}

// Replaces t_i by t_j and drops variable i; the result has arity n-1 and
// variable j keeps its relative position.
template <typename C>
TPolynomial<C> substitute(const TPolynomial<C> &p, std::size_t i, std::size_t j)
{
    TPolynomial<C>::check_index(p.arity(), i);
    TPolynomial<C>::check_index(p.arity(), j);
    if (i == j) {
        throw index_out_of_range("substitute needs two distinct variables");
    }
    TPolynomial<C> r(p.arity() - 1);
    for (const auto &[e, c] : p.terms()) {
        Exponents d = e;
        d[j] += d[i];
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
        r.add_term(std::move(d), c);
    }
    return r;
}

// Maps variable k of p to variable targets[k] of an arity-n ring.
template <typename C>
TPolynomial<C> embed(const TPolynomial<C> &p, std::size_t n, const std::vector<std::size_t> &targets)
{
    if (targets.size() != p.arity()) {
        throw arity_mismatch("embedding list has " + std::to_string(targets.size()) + " entries for arity "
                             + std::to_string(p.arity()));
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
        TPolynomial<C>::check_index(n, targets[k]);
        for (std::size_t l = 0; l < k; ++l) {
            if (targets[l] == targets[k]) {
                throw index_out_of_range("embedding is not injective");
            }
        }
    }
    TPolynomial<C> r(n);
    for (const auto &[e, c] : p.terms()) {
        Exponents d(n, 0);
        for (std::size_t k = 0; k < e.size(); ++k) {
            d[targets[k]] = e[k];
        }
        r.add_term(std::move(d), c);
    }
    return r;
}

// q with q * (t_i - t_j) = p. p must vanish on the diagonal t_i = t_j.
template <typename C>
TPolynomial<C> exact_divide_difference(const TPolynomial<C> &p, std::size_t i, std::size_t j)
{
    TPolynomial<C>::check_index(p.arity(), i);
    TPolynomial<C>::check_index(p.arity(), j);
    if (i == j) {
        throw index_out_of_range("divided difference needs two distinct variables");
    }
    if (!substitute(p, i, j).is_zero()) {
        throw not_divisible("polynomial does not vanish on t" + std::to_string(i + 1) + " = t" + std::to_string(j + 1));
    }
    // t_i^a t_j^b = (t_i - t_j) t_j^b sum_{k<a} t_i^k t_j^{a-1-k} + t_j^{a+b};
    // the t_j^{a+b} parts sum to p restricted to the diagonal, which is zero.
    TPolynomial<C> q(p.arity());
    for (const auto &[e, c] : p.terms()) {
        const int a = e[i];
        for (int k = 0; k < a; ++k) {
            Exponents d = e;
            d[i] = k;
            d[j] = e[j] + a - 1 - k;
            q.add_term(std::move(d), c);
        }
    }
    return q;
}

// The result ring follows fn, so this also specializes Q(f) coefficients to Q.
template <typename C, typename F, typename D = std::decay_t<std::invoke_result_t<F &, const C &>>>
TPolynomial<D> map_coefficients(const TPolynomial<C> &p, F &&fn)
{
    TPolynomial<D> r(p.arity());
    for (const auto &[e, c] : p.terms()) {
        r.add_term(e, fn(c));
    }
    return r;
}

// Coefficient list of an arity-1 polynomial.
template <typename C>
std::vector<C> univariate_coefficients(const TPolynomial<C> &p)
{
    if (p.arity() != 1) {
        throw arity_mismatch("univariate_coefficients needs arity 1, got " + std::to_string(p.arity()));
    }
    std::vector<C> out(static_cast<std::size_t>(std::max(p.degree_in(0) + 1, 0)));
    for (const auto &[e, c] : p.terms()) {
        out[static_cast<std::size_t>(e[0])] = c;
    }
    return out;
}

// Canonical rendering: terms in descending graded-lex order, one per
// "+ coeff*t1^a*t2^b" chunk; coefficients in their own canonical text.
template <typename C>
std::string to_string(const TPolynomial<C> &p)
{
    using fvtr::to_string;
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto &[e, c] = *it;
        std::string mono;
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) {
                continue;
            }
            if (!mono.empty()) {
                mono += "*";
            }
            mono += "t" + std::to_string(k + 1);
            if (e[k] > 1) {
                mono += "^" + std::to_string(e[k]);
            }
        }
        if (!out.empty()) {
            out += " + ";
        }
        const std::string cs = to_string(c);
        if (mono.empty()) {
            out += cs;
        } else {
            out += "(" + cs + ")*" + mono;
        }
    }
    return out;
}

} // namespace fvtr
