#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>
#include <fvtr/series.hpp>

namespace fvtr
{

using Series = VSeries<FRational>;

// Local expansions of the mirror curve x = y^f (1 - y) near its branch point.
// z = 1/t is the local coordinate with v = z F(z), and the deck involution is
// v -> -v. "order" N means z_of_v is known through v^N; every derived series
// then carries relative precision N - 1 (known through lead + N - 1).
struct CurveSeries {
    int order = 0;
    Series F_squared; // F(z)^2 through z^{N-1}
    Series F_of_z;    // F(0) = 1
    Series v_of_z;    // z F(z)
    Series z_of_v;    // v G(v), the inverse of v_of_z
    Series G_of_v;
    Series t_of_v;   // 1/z_of_v = v^{-1} (1 + h_1 v + ...)
    Series s_t_of_v; // t_of_v(-v), the involution image
    std::vector<Series> t_powers; // t_of_v^j for j < order, each known through v^0 at least
};

// Coefficient of z^k in F(z)^2: 1 for k = 0, otherwise
// (2/(k+2)) (1 - (-1/f)^{k+1}) / (1 + 1/f).
inline FRational curve_f_squared_coefficient(int k)
{
    if (k == 0) {
        return FRational(1);
    }
    const FRational f = FRational::f();
    const FRational q = pow(FRational(-1) / f, k + 1);
    return (FRational(1) - q) / (FRational(1) + FRational(1) / f) * FRational(ratio(2, k + 2));
}

inline CurveSeries build_curve_series(int N)
{
    if (N < 4) {
        throw insufficient_truncation("curve series need order N >= 4, got " + std::to_string(N));
    }
    CurveSeries c;
    c.order = N;
    std::vector<FRational> sq(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        sq[static_cast<std::size_t>(k)] = curve_f_squared_coefficient(k);
    }
    c.F_squared = Series(0, std::move(sq), N - 1);
    c.F_of_z = sqrt_unit(c.F_squared);
    c.v_of_z = c.F_of_z.shifted(1);
    c.z_of_v = revert(c.v_of_z);
    c.G_of_v = c.z_of_v.shifted(-1);
    c.t_of_v = inverse(c.z_of_v);
    c.s_t_of_v = c.t_of_v.reflected();
    c.t_powers.reserve(static_cast<std::size_t>(N));
    c.t_powers.push_back(Series::constant(FRational(1)));
    for (int j = 1; j < N; ++j) {
        c.t_powers.push_back(c.t_powers.back() * c.t_of_v);
    }
    return c;
}

// Process-wide memo of build_curve_series. Construction happens once per order
// under the lock; afterwards the shared object is read-only.
inline std::shared_ptr<const CurveSeries> curve_series(int N)
{
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const CurveSeries>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end()) {
        return it->second;
    }
    auto made = std::make_shared<const CurveSeries>(build_curve_series(N));
    cache.emplace(N, made);
    return made;
}

// The truncation a series would have had if everything upstream had been built
// at order N: relative precision N - 1.
inline Series at_order(const Series &s, int N)
{
    if (s.is_zero()) {
        return s;
    }
    return s.truncated(s.lead() + N - 1);
}

} // namespace fvtr
