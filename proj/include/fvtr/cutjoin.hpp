#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <fvtr/curve_functions.hpp>
#include <fvtr/engine.hpp>
#include <fvtr/errors.hpp>
#include <fvtr/tpoly.hpp>

namespace fvtr
{

// Read-only view of a bracket table that assembles H polynomials on demand and
// keeps them. Safe to share between threads verifying different cells.
class HAssembler
{
public:
    explicit HAssembler(const BracketTable &table)
        : m_table(table), m_tower(build_phi_tower(std::max(1, max_dimension(table))))
    {
    }

    const BracketTable &table() const
    {
        return m_table;
    }
    const PhiTower &tower() const
    {
        return m_tower;
    }

    const Poly &H(int g, int n)
    {
        if (!is_stable(g, n)) {
            throw unstable_dependency("H for unstable cell " + to_string(CellId{g, n}));
        }
        std::shared_future<std::shared_ptr<const Poly>> fut;
        std::promise<std::shared_ptr<const Poly>> promise;
        bool owner = false;
        {
            std::lock_guard<std::mutex> lock(m_mu);
            auto it = m_cache.find({g, n});
            if (it == m_cache.end()) {
                fut = promise.get_future().share();
                m_cache.emplace(CellId{g, n}, fut);
                owner = true;
            } else {
                fut = it->second;
            }
        }
        if (owner) {
            try {
                promise.set_value(std::make_shared<const Poly>(assemble_H(g, n, m_table, m_tower).poly));
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return *fut.get();
    }

    // H_g^{k} with its k-th variable placed at slots[k] of an arity-`arity` ring.
    Poly H_embedded(int g, const std::vector<std::size_t> &slots, std::size_t arity)
    {
        return embed(H(g, static_cast<int>(slots.size())), arity, slots);
    }

private:
    static int max_dimension(const BracketTable &t)
    {
        int d = 0;
        for (const auto &[c, e] : t.cells()) {
            d = std::max(d, cell_dimension(c.g, c.n));
        }
        return d;
    }

    const BracketTable &m_table;
    PhiTower m_tower;
    std::mutex m_mu;
    std::map<CellId, std::shared_future<std::shared_ptr<const Poly>>> m_cache;
};

inline bool in_verifiable_set(int g, int n)
{
    return is_stable(g, n) && 2 * g - 2 + n >= 2;
}

// (d/df + sum_l t_l(t_l-1)/(f+1) d/dt_l) H_g^n
inline Poly cutjoin_lhs(int g, int n, HAssembler &h)
{
    const Poly &H = h.H(g, n);
    const std::size_t nn = static_cast<std::size_t>(n);
    Poly out = map_coefficients(H, [](const FRational &c) { return derivative_f(c); });
    const FRational inv = FRational(1) / (FRational::f() + 1);
    const Poly field = Poly::univariate(1, 0, {FRational(0), -inv, inv});
    for (std::size_t l = 0; l < nn; ++l) {
        out += embed(field, nn, {l}) * partial_derivative(H, l);
    }
    return out;
}

// -1/2 sum_l E_l E_{n+1} H_{g-1}^{n+1} at t_{n+1} = t_l
inline Poly cutjoin_T1(int g, int n, HAssembler &h)
{
    const std::size_t nn = static_cast<std::size_t>(n);
    Poly out(nn);
    if (g == 0) {
        return out;
    }
    const Poly extra = apply_euler(h.H(g - 1, n + 1), nn);
    for (std::size_t l = 0; l < nn; ++l) {
        out += substitute(apply_euler(extra, l), nn, l);
    }
    return out * FRational(Rational(-1, 2));
}

// -1/2 sum_l sum over ordered splits (g1, I), (g2, J) of [n] \ {l}, both stable,
// of E_l H_{g1}(t_l, t_I) E_l H_{g2}(t_l, t_J). Each unordered pair is formed once.
inline Poly cutjoin_T2_T3(int g, int n, HAssembler &h)
{
    const std::size_t nn = static_cast<std::size_t>(n);
    Poly out(nn);
    for (std::size_t l = 0; l < nn; ++l) {
        std::vector<std::size_t> others;
        for (std::size_t k = 0; k < nn; ++k) {
            if (k != l) {
                others.push_back(k);
            }
        }
        const std::size_t m = others.size();
        std::map<std::pair<int, unsigned>, Poly> factor;
        auto get = [&](int gi, unsigned mask) -> const Poly & {
            auto it = factor.find({gi, mask});
            if (it != factor.end()) {
                return it->second;
            }
            std::vector<std::size_t> slots{l};
            for (std::size_t x = 0; x < m; ++x) {
                if ((mask >> x) & 1u) {
                    slots.push_back(others[x]);
                }
            }
            return factor.emplace(std::make_pair(gi, mask), apply_euler(h.H_embedded(gi, slots, nn), l)).first->second;
        };
        const unsigned full = (1u << m) - 1u;
        for (int g1 = 0; g1 <= g; ++g1) {
            for (unsigned mask = 0; mask <= full; ++mask) {
                const int g2 = g - g1;
                const unsigned comp = full & ~mask;
                const int n1 = 1 + std::popcount(mask), n2 = 1 + std::popcount(comp);
                if (!is_stable(g1, n1) || !is_stable(g2, n2)) {
                    continue;
                }
                // (g1, mask) versus its mirror (g2, comp): keep one representative
                if (std::make_pair(g1, mask) > std::make_pair(g2, comp)) {
                    continue;
                }
                const bool self = g1 == g2 && mask == comp;
                out += get(g1, mask) * get(g2, comp) * FRational(self ? Rational(-1, 2) : Rational(-1));
            }
        }
    }
    return out;
}

// sum_{i<j} [A_ij - A_ji] / (t_i - t_j), A_ij = t_i(f t_i+1)(t_j-1)/(f+1) E_i H_g^{n-1}(t_i, t_others)
inline Poly cutjoin_T4(int g, int n, HAssembler &h)
{
    const std::size_t nn = static_cast<std::size_t>(n);
    Poly out(nn);
    if (n < 2) {
        return out;
    }
    const FRational f = FRational::f();
    const FRational inv = FRational(1) / (f + 1);
    const Poly lead = Poly::univariate(1, 0, {FRational(0), inv, f * inv});
    const Poly shift = Poly::univariate(1, 0, {FRational(-1), FRational(1)});
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = i + 1; j < nn; ++j) {
            std::vector<std::size_t> others;
            for (std::size_t k = 0; k < nn; ++k) {
                if (k != i && k != j) {
                    others.push_back(k);
                }
            }
            auto side = [&](std::size_t a, std::size_t b) {
                std::vector<std::size_t> slots{a};
                slots.insert(slots.end(), others.begin(), others.end());
                return embed(lead, nn, {a}) * embed(shift, nn, {b}) * apply_euler(h.H_embedded(g, slots, nn), a);
            };
            out += exact_divide_difference(side(i, j) - side(j, i), i, j);
        }
    }
    return out;
}

struct CutJoinReport {
    int g = 0;
    int n = 0;
    Poly lhs{1};
    Poly rhs{1};
    Poly residual{1};
    // The right-hand side split by term, for localizing a nonzero residual.
    Poly t1{1};
    Poly t2_t3{1};
    Poly t4{1};

    bool passed() const
    {
        return residual.is_zero();
    }
};

inline CutJoinReport verify_cutjoin(int g, int n, HAssembler &h)
{
    if (!in_verifiable_set(g, n)) {
        throw outside_verifiable_set("cell " + to_string(CellId{g, n})
                                     + " needs unstable H; only stable cells with 2g-2+n >= 2 are checked");
    }
    CutJoinReport r;
    r.g = g;
    r.n = n;
    r.lhs = cutjoin_lhs(g, n, h);
    r.t1 = cutjoin_T1(g, n, h);
    r.t2_t3 = cutjoin_T2_T3(g, n, h);
    r.t4 = cutjoin_T4(g, n, h);
    r.rhs = r.t1 + r.t2_t3 + r.t4;
    r.residual = r.lhs - r.rhs;
    return r;
}

inline Poly cutjoin_lhs(int g, int n, const BracketTable &t)
{
    HAssembler h(t);
    return cutjoin_lhs(g, n, h);
}
inline Poly cutjoin_T1(int g, int n, const BracketTable &t)
{
    HAssembler h(t);
    return cutjoin_T1(g, n, h);
}
inline Poly cutjoin_T2_T3(int g, int n, const BracketTable &t)
{
    HAssembler h(t);
    return cutjoin_T2_T3(g, n, h);
}
inline Poly cutjoin_T4(int g, int n, const BracketTable &t)
{
    HAssembler h(t);
    return cutjoin_T4(g, n, h);
}
inline CutJoinReport verify_cutjoin(int g, int n, const BracketTable &t)
{
    HAssembler h(t);
    return verify_cutjoin(g, n, h);
}

} // namespace fvtr
