#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fvtr/rational.hpp>

namespace fvtr
{

// Pure psi-class intersection numbers <tau_{b_1} ... tau_{b_n}>_g, computed
// independently of the framed recursion: string equation plus the DVV form of
// the KdV recursion. Used as an oracle for the top-degree and low-genus brackets.

namespace detail
{

inline Integer double_factorial(int m)
{
    Integer r = 1;
    for (; m > 1; m -= 2) {
        r *= m;
    }
    return r;
}

inline Rational psi_uncached(int g, std::vector<int> b);

inline Rational psi_memo(int g, std::vector<int> b)
{
    std::sort(b.begin(), b.end());
    static std::mutex mu;
    static std::map<std::pair<int, std::vector<int>>, Rational> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find({g, b});
        if (it != memo.end()) {
            return it->second;
        }
    }
    Rational v = psi_uncached(g, b);
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(std::make_pair(g, std::move(b)), v);
    return v;
}

inline Rational psi_uncached(int g, std::vector<int> b)
{
    const int n = static_cast<int>(b.size());
    if (g < 0 || 2 * g - 2 + n <= 0) {
        return 0;
    }
    int sum = 0;
    for (int x : b) {
        if (x < 0) {
            return 0;
        }
        sum += x;
    }
    if (sum != 3 * g - 3 + n) {
        return 0;
    }
    if (g == 0 && n == 3) {
        return 1;
    }
    if (g == 1 && n == 1) {
        return Rational(1, 24);
    }
    // b is sorted; recurse on the largest index
    const int k = b.back() - 1;
    std::vector<int> S(b.begin(), b.end() - 1);
    Rational total = 0;
    if (k < 0) {
        for (std::size_t j = 0; j < S.size(); ++j) {
            std::vector<int> T = S;
            --T[j];
            total += psi_memo(g, T);
        }
        return total;
    }
    for (std::size_t j = 0; j < S.size(); ++j) {
        std::vector<int> T = S;
        const int bj = T[j];
        T[j] = k + bj;
        total += Rational(double_factorial(2 * k + 2 * bj + 1), double_factorial(2 * bj - 1)) * psi_memo(g, T);
    }
    const std::size_t m = S.size();
    for (int r = 0; r < k; ++r) {
        const int s = k - 1 - r;
        const Rational w = Rational(double_factorial(2 * r + 1) * double_factorial(2 * s + 1)) / 2;
        std::vector<int> T = S;
        T.push_back(r);
        T.push_back(s);
        total += w * psi_memo(g - 1, T);
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            std::vector<int> I{r}, J{s};
            for (std::size_t x = 0; x < m; ++x) {
                ((mask >> x) & 1u ? I : J).push_back(S[x]);
            }
            for (int g1 = 0; g1 <= g; ++g1) {
                total += w * psi_memo(g1, I) * psi_memo(g - g1, J);
            }
        }
    }
    total /= double_factorial(2 * k + 3);
    total.canonicalize();
    return total;
}

} // namespace detail

inline Rational psi_intersection(int g, const std::vector<int> &b)
{
    return detail::psi_memo(g, b);
}

// Genus-zero closed form (n-3)! / prod b_i! on sum(b) = n - 3.
inline Rational psi_genus_zero(const std::vector<int> &b)
{
    const int n = static_cast<int>(b.size());
    int sum = 0;
    for (int x : b) {
        if (x < 0) {
            return 0;
        }
        sum += x;
    }
    if (n < 3 || sum != n - 3) {
        return 0;
    }
    Integer num, den = 1, t;
    mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(n - 3));
    for (int x : b) {
        mpz_fac_ui(t.get_mpz_t(), static_cast<unsigned long>(x));
        den *= t;
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// <tau_{b_1} ... tau_{b_n} lambda_1>_1 = (n-1)! / (24 prod b_i!) on sum(b) = n - 1.
inline Rational lambda1_genus_one(const std::vector<int> &b)
{
    const int n = static_cast<int>(b.size());
    int sum = 0;
    for (int x : b) {
        if (x < 0) {
            return 0;
        }
        sum += x;
    }
    if (n < 1 || sum != n - 1) {
        return 0;
    }
    Integer num, den = 24, t;
    mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(n - 1));
    for (int x : b) {
        mpz_fac_ui(t.get_mpz_t(), static_cast<unsigned long>(x));
        den *= t;
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

} // namespace fvtr
