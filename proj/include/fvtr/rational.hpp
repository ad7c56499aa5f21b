#pragma once

#include <string>
#include <string_view>

#include <gmpxx.h>

#include <fvtr/errors.hpp>

namespace fvtr
{

// Arbitrary-precision rational, always kept in lowest terms with a positive
// denominator (GMP canonicalizes after every operation).
using Rational = mpq_class;
using Integer = mpz_class;

// p/q in lowest terms. mpq_class(p, q) alone does not canonicalize.
inline Rational ratio(long p, long q)
{
    Rational r(p, q);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational &q)
{
    return q.get_str();
}

// Accepts "p" or "p/q" with optional sign and surrounding blanks.
inline Rational parse_rational(std::string_view text)
{
    std::string s;
    for (char c : text) {
        if (c != ' ' && c != '\t') {
            s.push_back(c);
        }
    }
    if (s.empty()) {
        throw parse_error("empty rational");
    }
    const auto slash = s.find('/');
    auto valid_int = [](std::string_view d) {
        std::size_t i = (!d.empty() && (d[0] == '-' || d[0] == '+')) ? 1 : 0;
        if (i == d.size()) {
            return false;
        }
        for (; i < d.size(); ++i) {
            if (d[i] < '0' || d[i] > '9') {
                return false;
            }
        }
        return true;
    };
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) {
        throw parse_error("malformed rational '" + std::string(text) + "'");
    }
    Integer n(num[0] == '+' ? num.substr(1) : num), d(den[0] == '+' ? den.substr(1) : den);
    if (d == 0) {
        throw division_by_zero("zero denominator in '" + std::string(text) + "'");
    }
    Rational q(n, d);
    q.canonicalize();
    return q;
}

} // namespace fvtr
