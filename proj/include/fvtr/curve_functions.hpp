#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fvtr/curve.hpp>
#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>
#include <fvtr/series.hpp>
#include <fvtr/tpoly.hpp>

namespace fvtr
{

using Poly = TPolynomial<FRational>;

// E = t(t-1)(ft+1)/(f+1) as a polynomial in t.
inline Poly euler_factor()
{
    const FRational f = FRational::f();
    const FRational inv = FRational(1) / (f + 1);
    return Poly::univariate(1, 0, {FRational(0), -inv, (FRational(1) - f) * inv, f * inv});
}

// Applies E = t_i(t_i-1)(f t_i+1)/(f+1) d/dt_i.
inline Poly apply_euler(const Poly &p, std::size_t i)
{
    static const Poly e1 = euler_factor();
    return embed(e1, p.arity(), {i}) * partial_derivative(p, i);
}

struct PhiTower {
    std::vector<Poly> phis;       // phis[b] = phi_b(t), degree 2b+1
    std::vector<Poly> phi_primes; // d/dt phi_b

    int max_index() const
    {
        return static_cast<int>(phis.size()) - 1;
    }
    const Poly &phi(int b) const
    {
        check(b);
        return phis[static_cast<std::size_t>(b)];
    }
    const Poly &phi_prime(int b) const
    {
        check(b);
        return phi_primes[static_cast<std::size_t>(b)];
    }

private:
    void check(int b) const
    {
        if (b < 0 || b > max_index()) {
            throw index_out_of_range("phi_" + std::to_string(b) + " outside tower of height " + std::to_string(max_index()));
        }
    }
};

inline PhiTower build_phi_tower(int B_max)
{
    if (B_max < 0) {
        throw index_out_of_range("tower height must be non-negative");
    }
    const FRational f = FRational::f();
    PhiTower tower;
    tower.phis.push_back(Poly::univariate(1, 0, {FRational(-1) / (f + 1), FRational(1) / (f + 1)}));
    for (int b = 1; b <= B_max; ++b) {
        tower.phis.push_back(apply_euler(tower.phis.back(), 0));
    }
    for (const auto &p : tower.phis) {
        tower.phi_primes.push_back(partial_derivative(p, 0));
    }
    return tower;
}

// sum_j c_j powers[j]: a univariate polynomial evaluated along a series whose
// powers are supplied.
inline Series evaluate_along(const Poly &p, const std::vector<Series> &powers)
{
    Series acc = Series::zero();
    for (const auto &[e, c] : p.terms()) {
        const auto j = static_cast<std::size_t>(e[0]);
        if (j >= powers.size()) {
            throw insufficient_truncation("power " + std::to_string(j) + " of the coordinate series is not available");
        }
        acc = acc + powers[j] * c;
    }
    return acc;
}

inline std::vector<Series> series_powers(const Series &x, int count)
{
    std::vector<Series> out;
    out.push_back(Series::constant(FRational(1)));
    for (int j = 1; j < count; ++j) {
        out.push_back(out.back() * x);
    }
    return out;
}

// eta_n for n >= -1 along the curve, and the even parts F_n = eta_n - phi_n(t(v)).
struct EtaFamily {
    int order = 0;
    std::vector<Series> etas;  // etas[n+1] = eta_n
    std::vector<Series> evens; // evens[n+1] = F_n

    int max_index() const
    {
        return static_cast<int>(etas.size()) - 2;
    }
    const Series &eta(int n) const
    {
        check(n);
        return etas[static_cast<std::size_t>(n + 1)];
    }
    const Series &even(int n) const
    {
        check(n);
        return evens[static_cast<std::size_t>(n + 1)];
    }

private:
    void check(int n) const
    {
        if (n < -1 || n > max_index()) {
            throw index_out_of_range("eta_" + std::to_string(n) + " outside family up to " + std::to_string(max_index()));
        }
    }
};

// The operator -(f/(f+1)) (1/v) d/dv.
inline Series eta_step(const Series &s)
{
    const FRational f = FRational::f();
    return s.derivative().shifted(-1) * (-f / (f + 1));
}

inline EtaFamily build_eta_family(const CurveSeries &curve, const PhiTower &tower, int n_max)
{
    const int N = curve.order;
    if (n_max > tower.max_index()) {
        throw index_out_of_range("eta family up to " + std::to_string(n_max) + " needs phi_" + std::to_string(n_max));
    }
    // eta_n and F_n are known through v^{N - 2n - 2}; F_n must reach v^0.
    if (N - 2 * n_max - 2 < 0) {
        throw insufficient_truncation("order " + std::to_string(N) + " too small for eta_" + std::to_string(n_max));
    }
    const FRational f = FRational::f();
    const FRational inv_f = FRational(1) / f;
    const Series one = Series::constant(FRational(1));
    const Series log_t = log_unit(one + curve.z_of_v * inv_f);
    const Series log_s = log_unit(one + curve.z_of_v.reflected() * inv_f);

    EtaFamily fam;
    fam.order = N;
    // eta_{-1} = -1/2 (phi_{-1}(t) - phi_{-1}(s)) with phi_{-1}(t) = -log(1 + z/f)
    fam.etas.push_back((log_t - log_s) * FRational(Rational(-1, 2)));
    fam.evens.push_back((log_t + log_s) * FRational(Rational(1, 2)));
    const std::vector<Series> &pw = curve.t_powers;
    for (int n = 0; n <= n_max; ++n) {
        fam.etas.push_back(eta_step(fam.etas.back()));
        fam.evens.push_back(fam.etas.back() - evaluate_along(tower.phi(n), pw));
    }
    return fam;
}

struct PlusPart {
    Poly poly{1};
    // Lowest v-exponent of the discarded remainder S - poly(t(v)), when it is
    // nonzero within the known terms.
    std::optional<int> discarded_lead;
};

// The regular part at t = infinity: the unique polynomial Q with
// S - Q(t(v)) = O(v). Peels the most negative v-exponent first using
// t^j = v^{-j} + ..., then reads the constant term.
inline PlusPart plus_part(const Series &S, const std::vector<Series> &t_powers)
{
    PlusPart out;
    if (S.is_zero()) {
        if (S.trunc() < 0) {
            throw insufficient_truncation("plus part of a series not known through v^0");
        }
        return out;
    }
    if (S.trunc() < 0) {
        throw insufficient_truncation("plus part of a series known only through v^" + std::to_string(S.trunc()));
    }
    Series r = S;
    std::vector<FRational> q(static_cast<std::size_t>(std::max(-S.lead(), 0) + 1));
    for (int j = -S.lead(); j >= 1; --j) {
        const FRational c = r.coeff(-j);
        if (c.is_zero()) {
            continue;
        }
        if (static_cast<std::size_t>(j) >= t_powers.size()) {
            throw insufficient_truncation("t^" + std::to_string(j) + " is not available for plus part extraction");
        }
        q[static_cast<std::size_t>(j)] = c;
        r = r - t_powers[static_cast<std::size_t>(j)] * c;
        if (r.trunc() < 0) {
            throw insufficient_truncation("plus part remainder lost v^0 after peeling t^" + std::to_string(j));
        }
    }
    q[0] = r.coeff(0);
    r = r - Series::constant(q[0]);
    if (!r.is_zero() && r.lead() < 1) {
        throw insufficient_truncation("plus part remainder is not certified regular");
    }
    out.poly = Poly::univariate(1, 0, q);
    if (!r.is_zero()) {
        out.discarded_lead = r.lead();
    }
    return out;
}

inline PlusPart plus_part(const Series &S, const CurveSeries &curve)
{
    return plus_part(S, curve.t_powers);
}

struct PhiDecomposition {
    // Multi-index (b_1..b_n) -> coefficient of prod_k phi'_{b_k}(t_k).
    std::map<std::vector<int>, FRational> coefficients;
    Poly residual{1};

    bool in_span() const
    {
        return residual.is_zero();
    }
    FRational coefficient(const std::vector<int> &b) const
    {
        auto it = coefficients.find(b);
        return it == coefficients.end() ? FRational(0) : it->second;
    }
};

namespace detail
{

// prod_k phi'_{b_k}(t_k) as an arity-n polynomial.
inline Poly phi_prime_product(const PhiTower &tower, const std::vector<int> &b)
{
    const std::size_t n = b.size();
    Poly acc = Poly::constant(n, FRational(1));
    for (std::size_t k = 0; k < n; ++k) {
        acc = acc * embed(tower.phi_prime(b[k]), n, {k});
    }
    return acc;
}

} // namespace detail

// Triangular solve in the basis prod_k phi'_{b_k}(t_k). The graded-lex leading
// monomial of that product is prod_k t_k^{2 b_k}; a leading monomial with an odd
// exponent has no basis element and is moved to the residual.
inline PhiDecomposition phi_prime_decompose_partial(const Poly &P, const PhiTower &tower)
{
    PhiDecomposition out;
    out.residual = Poly(P.arity());
    Poly rest = P;
    while (!rest.is_zero()) {
        const auto top = std::prev(rest.terms().end());
        const Exponents e = top->first;
        const FRational c = top->second;
        bool even = true;
        std::vector<int> b(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) {
            even = even && e[k] % 2 == 0;
            b[k] = e[k] / 2;
        }
        if (!even) {
            Poly mono(P.arity());
            mono.add_term(e, c);
            out.residual += mono;
            rest -= mono;
            continue;
        }
        for (int bk : b) {
            if (bk > tower.max_index()) {
                throw index_out_of_range("decomposition needs phi'_" + std::to_string(bk) + " beyond the tower");
            }
        }
        const Poly basis = detail::phi_prime_product(tower, b);
        const FRational coeff = c / basis.coefficient(e);
        out.coefficients[b] = coeff;
        rest -= basis * coeff;
    }
    return out;
}

// As above, but a nonzero residual is fatal.
inline PhiDecomposition phi_prime_decompose(const Poly &P, const PhiTower &tower)
{
    PhiDecomposition d = phi_prime_decompose_partial(P, tower);
    if (!d.in_span()) {
        throw not_in_span("residual " + to_string(d.residual) + " for input " + to_string(P));
    }
    return d;
}

// sum_b coefficients[b] prod_k phi'_{b_k}(t_k) + residual
inline Poly reassemble(const PhiDecomposition &d, const PhiTower &tower)
{
    Poly acc = d.residual;
    for (const auto &[b, c] : d.coefficients) {
        acc += detail::phi_prime_product(tower, b) * c;
    }
    return acc;
}

} // namespace fvtr
