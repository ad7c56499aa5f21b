#pragma once

#include <algorithm>
#include <climits>
#include <string>
#include <utility>
#include <vector>

#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>

namespace fvtr
{

template <typename C>
class VSeries;

// 1/b known through v^{trunc(b) - 2 lead(b)}, or through `order` when given
// (required for exact multi-term b).
template <typename C>
VSeries<C> inverse(const VSeries<C> &b, int order = INT_MIN);

// Truncated Laurent series sum_{e=lead}^{trunc} c_e v^e. Coefficients beyond
// trunc are unknown. trunc == exact marks a series known exactly (a Laurent
// polynomial); arithmetic saturates at that sentinel.
//
// The zero series stores no coefficients and reports lead = trunc + 1.
template <typename C>
class VSeries
{
public:
    static constexpr int exact = INT_MAX;

    VSeries() : m_lead(exact), m_trunc(exact) {}
    VSeries(int lead, std::vector<C> coeffs, int trunc) : m_lead(lead), m_trunc(trunc), m_c(std::move(coeffs))
    {
        normalize();
    }

    static VSeries constant(const C &c, int trunc = exact)
    {
        return VSeries(0, {c}, trunc);
    }
    static VSeries monomial(const C &c, int e, int trunc = exact)
    {
        return VSeries(e, {c}, trunc);
    }
    static VSeries zero(int trunc = exact)
    {
        return VSeries(0, {}, trunc);
    }

    int lead() const
    {
        return m_lead;
    }
    int trunc() const
    {
        return m_trunc;
    }
    bool is_exact() const
    {
        return m_trunc == exact;
    }
    bool is_zero() const
    {
        return m_c.empty();
    }
    // Highest exponent with a stored coefficient (lead - 1 when zero).
    int last() const
    {
        return m_c.empty() ? m_lead - 1 : m_lead + static_cast<int>(m_c.size()) - 1;
    }
    const std::vector<C> &coefficients() const
    {
        return m_c;
    }
    C leading() const
    {
        if (m_c.empty()) {
            throw zero_divisor("leading coefficient of the zero series");
        }
        return m_c.front();
    }
    C coeff(int e) const
    {
        if (e > m_trunc) {
            throw insufficient_truncation("coefficient of v^" + std::to_string(e) + " requested, series known through v^"
                                          + std::to_string(m_trunc));
        }
        if (m_c.empty() || e < m_lead || e > last()) {
            return C(0);
        }
        return m_c[static_cast<std::size_t>(e - m_lead)];
    }

    VSeries truncated(int n) const
    {
        if (n >= m_trunc) {
            return *this;
        }
        if (m_c.empty() || n < m_lead) {
            return zero(n);
        }
        std::vector<C> c(m_c.begin(), m_c.begin() + std::min<std::ptrdiff_t>(n - m_lead + 1, static_cast<std::ptrdiff_t>(m_c.size())));
        return VSeries(m_lead, std::move(c), n);
    }
    // Multiplication by v^k.
    VSeries shifted(int k) const
    {
        return VSeries(m_c.empty() ? 0 : m_lead + k, m_c, sat_add(m_trunc, k));
    }
    // v -> -v
    VSeries reflected() const
    {
        VSeries r(*this);
        for (std::size_t i = 0; i < r.m_c.size(); ++i) {
            if ((m_lead + static_cast<int>(i)) % 2 != 0) {
                r.m_c[i] = -r.m_c[i];
            }
        }
        return r;
    }
    VSeries derivative() const
    {
        std::vector<C> d(m_c.size());
        for (std::size_t i = 0; i < m_c.size(); ++i) {
            d[i] = m_c[i] * C(m_lead + static_cast<int>(i));
        }
        return VSeries(m_c.empty() ? 0 : m_lead - 1, std::move(d), sat_add(m_trunc, -1));
    }
    bool is_even() const
    {
        return parity_vanishes(1);
    }
    bool is_odd() const
    {
        return parity_vanishes(0);
    }
    // No stored coefficient with negative exponent.
    bool is_power_series() const
    {
        return m_c.empty() || m_lead >= 0;
    }

    VSeries operator-() const
    {
        VSeries r(*this);
        for (auto &c : r.m_c) {
            c = -c;
        }
        return r;
    }
    VSeries &operator*=(const C &s)
    {
        for (auto &c : m_c) {
            c *= s;
        }
        normalize();
        return *this;
    }
    friend VSeries operator*(VSeries a, const C &s)
    {
        a *= s;
        return a;
    }
    friend VSeries operator*(const C &s, VSeries a)
    {
        a *= s;
        return a;
    }

    friend VSeries operator+(const VSeries &a, const VSeries &b)
    {
        const int t = std::min(a.m_trunc, b.m_trunc);
        if (a.m_c.empty()) {
            return b.truncated(t);
        }
        if (b.m_c.empty()) {
            return a.truncated(t);
        }
        const int lo = std::min(a.m_lead, b.m_lead);
        const int hi = std::min(t, std::max(a.last(), b.last()));
        if (hi < lo) {
            return zero(t);
        }
        std::vector<C> c(static_cast<std::size_t>(hi - lo + 1));
        for (int e = lo; e <= hi; ++e) {
            C &x = c[static_cast<std::size_t>(e - lo)];
            if (e >= a.m_lead && e <= a.last()) {
                x = a.m_c[static_cast<std::size_t>(e - a.m_lead)];
            }
            if (e >= b.m_lead && e <= b.last()) {
                x += b.m_c[static_cast<std::size_t>(e - b.m_lead)];
            }
        }
        return VSeries(lo, std::move(c), t);
    }
    friend VSeries operator-(const VSeries &a, const VSeries &b)
    {
        return a + (-b);
    }
    friend VSeries operator*(const VSeries &a, const VSeries &b)
    {
        const int t = std::min(sat_add(a.m_trunc, b.m_lead), sat_add(b.m_trunc, a.m_lead));
        if (a.m_c.empty() || b.m_c.empty()) {
            return zero(t);
        }
        const int lo = a.m_lead + b.m_lead;
        const int hi = std::min(t, a.last() + b.last());
        if (hi < lo) {
            return zero(t);
        }
        std::vector<C> c(static_cast<std::size_t>(hi - lo + 1));
        const int na = static_cast<int>(a.m_c.size());
        const int nb = static_cast<int>(b.m_c.size());
        for (int i = 0; i < na && i <= hi - lo; ++i) {
            const C &x = a.m_c[static_cast<std::size_t>(i)];
            if (is_zero(x)) {
                continue;
            }
            const int jmax = std::min(nb - 1, hi - lo - i);
            for (int j = 0; j <= jmax; ++j) {
                c[static_cast<std::size_t>(i + j)] += x * b.m_c[static_cast<std::size_t>(j)];
            }
        }
        return VSeries(lo, std::move(c), t);
    }
    // a / b. An exact multi-term divisor is expanded to the precision a allows.
    friend VSeries operator/(const VSeries &a, const VSeries &b)
    {
        if (b.m_c.empty()) {
            throw zero_divisor("division by a series with no known nonzero coefficient");
        }
        if (b.is_exact() && b.m_c.size() > 1) {
            if (a.is_exact()) {
                throw insufficient_truncation("quotient of exact series needs an explicit precision");
            }
            const int rel = a.m_trunc - a.m_lead;
            return a * inverse(b, -b.m_lead + rel);
        }
        return a * inverse(b);
    }
    friend bool operator==(const VSeries &a, const VSeries &b)
    {
        return a.m_lead == b.m_lead && a.m_trunc == b.m_trunc && a.m_c == b.m_c;
    }

    // One "exponent coefficient" line per stored term.
    std::string dump() const
    {
        using fvtr::to_string;
        std::string out;
        for (std::size_t i = 0; i < m_c.size(); ++i) {
            if (!is_zero(m_c[i])) {
                out += std::to_string(m_lead + static_cast<int>(i)) + " " + to_string(m_c[i]) + "\n";
            }
        }
        out += "trunc " + (is_exact() ? std::string("exact") : std::to_string(m_trunc)) + "\n";
        return out;
    }

    static int sat_add(int a, int b)
    {
        if (a == exact || b == exact) {
            return exact;
        }
        return a + b;
    }

private:
    static bool is_zero(const C &c)
    {
        using fvtr::is_zero;
        return is_zero(c);
    }

    bool parity_vanishes(int residue) const
    {
        for (std::size_t i = 0; i < m_c.size(); ++i) {
            const int e = m_lead + static_cast<int>(i);
            if (((e % 2) + 2) % 2 == residue && !is_zero(m_c[i])) {
                return false;
            }
        }
        return true;
    }

    void normalize()
    {
        if (m_trunc != exact && !m_c.empty() && last() > m_trunc) {
            m_c.resize(static_cast<std::size_t>(std::max(m_trunc - m_lead + 1, 0)));
        }
        std::size_t k = 0;
        while (k < m_c.size() && is_zero(m_c[k])) {
            ++k;
        }
        if (k == m_c.size()) {
            m_c.clear();
            m_lead = m_trunc == exact ? exact : m_trunc + 1;
            return;
        }
        if (k > 0) {
            m_c.erase(m_c.begin(), m_c.begin() + static_cast<std::ptrdiff_t>(k));
            m_lead += static_cast<int>(k);
        }
        while (is_zero(m_c.back())) {
            m_c.pop_back();
        }
    }

    int m_lead;
    int m_trunc;
    std::vector<C> m_c;
};

template <typename C>
VSeries<C> inverse(const VSeries<C> &b, int order)
{
    if (b.is_zero()) {
        throw zero_divisor("inverse of a series with no known nonzero coefficient");
    }
    const int lo = -b.lead();
    int t = order;
    if (order == INT_MIN) {
        if (b.is_exact()) {
            if (b.coefficients().size() == 1) {
                return VSeries<C>::monomial(C(1) / b.coefficients()[0], lo);
            }
            throw insufficient_truncation("inverse of an exact series needs an explicit precision");
        }
        t = b.trunc() - 2 * b.lead();
    } else if (!b.is_exact()) {
        t = std::min(t, b.trunc() - 2 * b.lead());
    }
    if (t < lo) {
        throw insufficient_truncation("inverse has no guaranteed terms");
    }
    const int len = t - lo + 1;
    const C inv0 = C(1) / b.coefficients()[0];
    std::vector<C> r(static_cast<std::size_t>(len));
    r[0] = inv0;
    const int nb = static_cast<int>(b.coefficients().size());
    for (int k = 1; k < len; ++k) {
        C acc(0);
        for (int i = 1; i <= std::min(k, nb - 1); ++i) {
            const C &bi = b.coefficients()[static_cast<std::size_t>(i)];
            if (!is_zero(bi)) {
                acc += bi * r[static_cast<std::size_t>(k - i)];
            }
        }
        r[static_cast<std::size_t>(k)] = -acc * inv0;
    }
    return VSeries<C>(lo, std::move(r), t);
}

// Integer power, negative exponents through inverse().
template <typename C>
VSeries<C> power(const VSeries<C> &a, int k)
{
    if (k < 0) {
        return power(inverse(a), -k);
    }
    VSeries<C> r = VSeries<C>::constant(C(1));
    VSeries<C> b = a;
    while (k > 0) {
        if (k & 1) {
            r = r * b;
        }
        k >>= 1;
        if (k > 0) {
            b = b * b;
        }
    }
    return r;
}

namespace detail
{

template <typename C>
void require_unit(const VSeries<C> &a, const char *what)
{
    using fvtr::is_zero;
    if (a.is_zero() || a.lead() != 0 || !(a.leading() == C(1))) {
        throw not_a_unit(std::string(what) + " needs lead 0 and constant term 1");
    }
    if (a.is_exact() && a.coefficients().size() > 1) {
        throw insufficient_truncation(std::string(what) + " of an exact non-constant series needs a truncation order");
    }
}

} // namespace detail

// Square root of a series 1 + O(v), constant term 1.
template <typename C>
VSeries<C> sqrt_unit(const VSeries<C> &a)
{
    detail::require_unit(a, "sqrt_unit");
    if (a.is_exact()) {
        return a;
    }
    const int n = a.trunc();
    std::vector<C> r(static_cast<std::size_t>(n + 1));
    r[0] = C(1);
    const C half = C(1) / C(2);
    for (int k = 1; k <= n; ++k) {
        C acc = a.coeff(k);
        for (int i = 1; i < k; ++i) {
            acc -= r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(k - i)];
        }
        r[static_cast<std::size_t>(k)] = acc * half;
    }
    return VSeries<C>(0, std::move(r), n);
}

// log of a series 1 + O(v).
template <typename C>
VSeries<C> log_unit(const VSeries<C> &a)
{
    detail::require_unit(a, "log_unit");
    if (a.is_exact()) {
        return VSeries<C>::zero();
    }
    // k l_k = k a_k - sum_{i=1}^{k-1} i l_i a_{k-i}
    const int n = a.trunc();
    std::vector<C> l(static_cast<std::size_t>(n + 1));
    for (int k = 1; k <= n; ++k) {
        C acc = a.coeff(k) * C(k);
        for (int i = 1; i < k; ++i) {
            if (!is_zero(l[static_cast<std::size_t>(i)])) {
                acc -= l[static_cast<std::size_t>(i)] * a.coeff(k - i) * C(i);
            }
        }
        l[static_cast<std::size_t>(k)] = acc / C(k);
    }
    return VSeries<C>(0, std::move(l), n);
}

// exp of a series with no constant term.
template <typename C>
VSeries<C> exp_series(const VSeries<C> &a)
{
    if (a.is_zero()) {
        return VSeries<C>::constant(C(1), a.trunc());
    }
    if (a.lead() < 1) {
        throw invalid_composition("exp_series needs a series without constant or polar terms");
    }
    if (a.is_exact()) {
        throw insufficient_truncation("exp of an exact nonzero series needs a truncation order");
    }
    // k e_k = sum_{i=1}^k i a_i e_{k-i}
    const int n = a.trunc();
    std::vector<C> e(static_cast<std::size_t>(n + 1));
    e[0] = C(1);
    for (int k = 1; k <= n; ++k) {
        C acc(0);
        for (int i = 1; i <= k; ++i) {
            const C ai = a.coeff(i);
            if (!is_zero(ai)) {
                acc += ai * e[static_cast<std::size_t>(k - i)] * C(i);
            }
        }
        e[static_cast<std::size_t>(k)] = acc / C(k);
    }
    return VSeries<C>(0, std::move(e), n);
}

// outer(inner(v)). Either inner has lead >= 1, or outer is exact with
// non-negative exponents (a polynomial) and inner is arbitrary.
template <typename C>
VSeries<C> compose(const VSeries<C> &outer, const VSeries<C> &inner)
{
    using S = VSeries<C>;
    if (outer.is_zero()) {
        return outer;
    }
    const bool polynomial_outer = outer.is_exact() && outer.lead() >= 0;
    if (inner.is_zero()) {
        if (outer.lead() < 0) {
            throw invalid_composition("outer series has poles and the inner series vanishes");
        }
        if (!polynomial_outer && !inner.is_exact()) {
            // outer(O(v^{T+1})) = c_0 + O(v^{T+1})
            return S::constant(outer.coeff(0), std::min(outer.trunc(), inner.trunc()));
        }
        return S::constant(outer.coeff(0), inner.trunc());
    }
    const int li = inner.lead();
    if (li < 1 && !polynomial_outer) {
        throw invalid_composition("inner series must have positive valuation unless the outer one is a polynomial");
    }

    int target = S::exact;
    if (li >= 1) {
        if (!outer.is_exact()) {
            target = (outer.trunc() + 1) * li - 1;
        }
        if (!inner.is_exact()) {
            const int rel = inner.trunc() - li;
            for (int e = outer.lead(); e <= outer.last(); ++e) {
                if (e != 0 && !is_zero(outer.coeff(e))) {
                    target = std::min(target, e * li + rel);
                    break;
                }
            }
        }
    }

    auto cut = [&](const S &x) { return target == S::exact ? x : x.truncated(target); };
    S result = S::zero(target);
    if (outer.lead() < 0) {
        const int depth = -outer.lead();
        const S inv = inner.is_exact() && target != S::exact
                          ? inverse(inner, target + (depth - 1) * li)
                          : inverse(inner);
        S pw = S::constant(C(1));
        for (int k = 1; k <= depth; ++k) {
            pw = cut(pw * inv);
            const C c = outer.coeff(-k);
            if (!is_zero(c)) {
                result = result + pw * c;
            }
        }
    }
    S pw = S::constant(C(1));
    for (int e = 0; e <= outer.last(); ++e) {
        if (e > 0) {
            pw = cut(pw * inner);
        }
        const C c = outer.coeff(e);
        if (!is_zero(c)) {
            result = result + pw * c;
        }
    }
    return cut(result);
}

// Compositional inverse of a = c v + ..., via Lagrange inversion:
// b_k = (1/k) [v^{k-1}] (v/a)^k.
template <typename C>
VSeries<C> revert(const VSeries<C> &a)
{
    using S = VSeries<C>;
    if (a.is_zero() || a.lead() != 1) {
        throw not_invertible("reversion needs a series with lead exactly 1");
    }
    if (a.is_exact()) {
        if (a.coefficients().size() == 1) {
            return S::monomial(C(1) / a.leading(), 1);
        }
        throw insufficient_truncation("reversion of an exact non-linear series needs a truncation order");
    }
    const int n = a.trunc();
    const S h = inverse(a.shifted(-1)).truncated(n - 1);
    std::vector<C> b(static_cast<std::size_t>(n));
    S hk = S::constant(C(1));
    for (int k = 1; k <= n; ++k) {
        hk = (hk * h).truncated(n - 1);
        b[static_cast<std::size_t>(k - 1)] = hk.coeff(k - 1) / C(k);
    }
    return S(1, std::move(b), n);
}

} // namespace fvtr
