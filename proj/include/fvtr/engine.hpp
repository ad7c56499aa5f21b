#pragma once

#include <algorithm>
#include <compare>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fvtr/curve_functions.hpp>
#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>
#include <fvtr/kernels.hpp>

namespace fvtr
{

using MultiIndex = std::vector<int>;

inline bool is_stable(int g, int n)
{
    return g >= 0 && n >= 0 && 2 * g - 2 + n > 0;
}

// 3g - 3 + n, the bound on sum(b) for nonzero brackets.
inline int cell_dimension(int g, int n)
{
    return 3 * g - 3 + n;
}

struct CellId {
    int g = 0;
    int n = 0;

    int chi() const
    {
        return 2 * g - 2 + n;
    }
    auto operator<=>(const CellId &) const = default;
};

inline std::string to_string(const CellId &c)
{
    return "(" + std::to_string(c.g) + "," + std::to_string(c.n) + ")";
}

inline MultiIndex sorted(MultiIndex b)
{
    std::sort(b.begin(), b.end());
    return b;
}

inline std::string to_string(const MultiIndex &b)
{
    std::string s = "(";
    for (std::size_t i = 0; i < b.size(); ++i) {
        s += (i ? "," : "") + std::to_string(b[i]);
    }
    return s + ")";
}

// Number of distinct orderings of b.
inline long orbit_size(const MultiIndex &b)
{
    MultiIndex s = sorted(b);
    long r = 1;
    int run = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
        r = r * static_cast<long>(i + 1) / run;
    }
    return r;
}

// Calls fn(tuple) for every distinct ordering of b.
template <typename Fn>
void for_each_ordering(const MultiIndex &b, Fn &&fn)
{
    MultiIndex p = sorted(b);
    do {
        fn(static_cast<const MultiIndex &>(p));
    } while (std::next_permutation(p.begin(), p.end()));
}

// Bracket values <tau_{b_1} ... tau_{b_n} Gamma_g(f)>_g keyed by cell and sorted
// multi-index. Only nonzero values are stored; cells are published whole.
class BracketTable
{
public:
    using Entries = std::map<MultiIndex, FRational>;

    bool has_cell(CellId c) const
    {
        return m_cells.count(c) != 0;
    }
    const Entries &cell(CellId c) const
    {
        auto it = m_cells.find(c);
        if (it == m_cells.end()) {
            throw missing_dependency("cell " + to_string(c) + " is not in the table");
        }
        return it->second;
    }
    const std::map<CellId, Entries> &cells() const
    {
        return m_cells;
    }
    // Value for any ordering of b; zero when absent from a present cell.
    FRational get(int g, const MultiIndex &b) const
    {
        const CellId c{g, static_cast<int>(b.size())};
        if (!is_stable(c.g, c.n)) {
            throw unstable_dependency("bracket requested in unstable cell " + to_string(c));
        }
        const Entries &e = cell(c);
        auto it = e.find(sorted(b));
        return it == e.end() ? FRational(0) : it->second;
    }
    void publish(CellId c, Entries entries)
    {
        if (!is_stable(c.g, c.n)) {
            throw unstable_dependency("cannot publish unstable cell " + to_string(c));
        }
        for (auto it = entries.begin(); it != entries.end();) {
            if (it->first.size() != static_cast<std::size_t>(c.n) || !std::is_sorted(it->first.begin(), it->first.end())) {
                throw index_out_of_range("entry " + to_string(it->first) + " does not fit cell " + to_string(c));
            }
            it = it->second.is_zero() ? entries.erase(it) : std::next(it);
        }
        m_cells[c] = std::move(entries);
    }
    // Largest chi such that every stable cell with 2g-2+n <= chi is present (0 if none).
    int chi_max() const
    {
        int chi = 0;
        for (;; ++chi) {
            for (const CellId &c : cells_with_chi(chi + 1)) {
                if (!has_cell(c)) {
                    return chi;
                }
            }
        }
    }
    std::size_t entry_count() const
    {
        std::size_t k = 0;
        for (const auto &[c, e] : m_cells) {
            k += e.size();
        }
        return k;
    }

    // The stable cells with 2g-2+n = chi, by increasing genus.
    static std::vector<CellId> cells_with_chi(int chi)
    {
        std::vector<CellId> out;
        for (int g = 0; 2 * g - 2 < chi; ++g) {
            const int n = chi - 2 * g + 2;
            if (n >= 1) {
                out.push_back({g, n});
            }
        }
        return out;
    }

    friend bool operator==(const BracketTable &a, const BracketTable &b)
    {
        return a.m_cells == b.m_cells;
    }

private:
    std::map<CellId, Entries> m_cells;
};

inline BracketTable seed_initial_data()
{
    const FRational f = FRational::f();
    BracketTable t;
    t.publish({0, 3}, {{{0, 0, 0}, FRational(1)}});
    t.publish({1, 1}, {{{0}, (f * f + f + 1) / 24}, {{1}, -f * (f + 1) / 24}});
    return t;
}

// Kernel index ranges recursion_step reads for cell (g, n): Type I with
// a1 + a2 <= 3g-5+n and Type II with b <= 3g-4+n.
inline std::pair<int, int> kernel_ranges(int g, int n)
{
    return {cell_dimension(g, n) - 2, n >= 2 ? cell_dimension(g, n) - 1 : -1};
}

struct StepResult {
    CellId cell;
    // Every multi-index whose coefficient came out nonzero, in the order the
    // recursion produces it (t_1 distinguished).
    std::map<MultiIndex, FRational> unsorted;
    // Sorted, nonzero entries to publish.
    BracketTable::Entries entries;
};

namespace detail
{

inline FRational framing_power(int k)
{
    const FRational ff = FRational::f() * (FRational::f() + 1);
    return pow(ff, k);
}

// All orderings of all entries of a cell.
inline std::vector<std::pair<MultiIndex, FRational>> unsorted_entries(const BracketTable &t, CellId c)
{
    std::vector<std::pair<MultiIndex, FRational>> out;
    for (const auto &[b, v] : t.cell(c)) {
        for_each_ordering(b, [&](const MultiIndex &p) { out.emplace_back(p, v); });
    }
    return out;
}

inline void require_cell(const BracketTable &t, CellId c, CellId target)
{
    if (!t.has_cell(c)) {
        throw missing_dependency("cell " + to_string(target) + " needs " + to_string(c));
    }
}

inline void accumulate(std::map<MultiIndex, FRational> &acc, const MultiIndex &k, const FRational &v)
{
    auto [it, inserted] = acc.try_emplace(k, v);
    if (!inserted) {
        it->second += v;
    }
}

// Checks that every orbit of multi-indices carries one common value and that
// nothing lies outside sum(b) <= dim. Throws on violation.
inline void check_extraction(const StepResult &r)
{
    const int dim = cell_dimension(r.cell.g, r.cell.n);
    std::map<MultiIndex, std::vector<const std::pair<const MultiIndex, FRational> *>> orbits;
    for (const auto &kv : r.unsorted) {
        int s = 0;
        for (int x : kv.first) {
            s += x;
        }
        if (s > dim) {
            throw support_violation("cell " + to_string(r.cell) + " produced " + to_string(kv.first) + " -> "
                                    + to_string(kv.second) + " beyond the dimension bound " + std::to_string(dim));
        }
        orbits[sorted(kv.first)].push_back(&kv);
    }
    for (const auto &[key, members] : orbits) {
        if (static_cast<long>(members.size()) != orbit_size(key)) {
            throw symmetry_violation("cell " + to_string(r.cell) + ": only " + std::to_string(members.size()) + " of "
                                     + std::to_string(orbit_size(key)) + " orderings of " + to_string(key)
                                     + " are nonzero");
        }
        for (const auto *m : members) {
            if (!(m->second == members.front()->second)) {
                throw symmetry_violation("cell " + to_string(r.cell) + ": " + to_string(m->first) + " -> "
                                         + to_string(m->second) + " but " + to_string(members.front()->first) + " -> "
                                         + to_string(members.front()->second));
            }
        }
    }
}

} // namespace detail

// One step of the recursion: the brackets of cell (g, n) from lower cells.
// The right-hand side is accumulated directly in the basis prod_k phi'_{b_k}(t_k)
// using the phi' decompositions of the kernels, then divided by (f(f+1))^{n-1}:
//   (i)   (f(f+1))^n   sum B_{g-1}(a1,a2,b_2..b_n) P_{a1,a2}(t_1)
//   (ii)  -(f(f+1))^{n-1} sum over ordered stable splits B_{g1}(a1,b_I) B_{g2}(a2,b_J) P_{a1,a2}(t_1)
//   (iii) -(f(f+1))^{n-2} sum_j B_g(b, b_{k != 1,j}) P_b(t_1, t_j)
inline StepResult recursion_step(int g, int n, const BracketTable &lower, KernelStore &kernels)
{
    const CellId target{g, n};
    if (!is_stable(g, n)) {
        throw unstable_dependency("no recursion step for unstable cell " + to_string(target));
    }
    if (target.chi() < 2) {
        throw missing_dependency("cell " + to_string(target) + " is initial data, not a recursion output");
    }
    std::map<MultiIndex, FRational> acc;
    const std::size_t rest = static_cast<std::size_t>(n - 1);

    // (i) genus reduction
    if (g >= 1) {
        const CellId src{g - 1, n + 1};
        detail::require_cell(lower, src, target);
        const FRational pre = FRational::f() * (FRational::f() + 1);
        for (const auto &[b, v] : detail::unsorted_entries(lower, src)) {
            const auto &dec = kernels.type_I(b[0], b[1]).decomposition;
            for (const auto &[c, d] : dec.coefficients) {
                MultiIndex key(b.begin() + 1, b.end());
                key[0] = c[0];
                detail::accumulate(acc, key, pre * v * d);
            }
        }
    }

    // (ii) stable splits, ordered: (g1, I) carries a1, (g2, J) carries a2
    for (int g1 = 0; g1 <= g; ++g1) {
        const int g2 = g - g1;
        for (unsigned mask = 0; mask < (1u << rest); ++mask) {
            std::vector<std::size_t> I, J;
            for (std::size_t k = 0; k < rest; ++k) {
                ((mask >> k) & 1u ? I : J).push_back(k);
            }
            const CellId c1{g1, static_cast<int>(I.size()) + 1}, c2{g2, static_cast<int>(J.size()) + 1};
            if (!is_stable(c1.g, c1.n) || !is_stable(c2.g, c2.n)) {
                continue;
            }
            detail::require_cell(lower, c1, target);
            detail::require_cell(lower, c2, target);
            const auto e1 = detail::unsorted_entries(lower, c1);
            const auto e2 = detail::unsorted_entries(lower, c2);
            for (const auto &[x, v1] : e1) {
                for (const auto &[y, v2] : e2) {
                    const auto &dec = kernels.type_I(x[0], y[0]).decomposition;
                    const FRational w = -(v1 * v2);
                    MultiIndex key(static_cast<std::size_t>(n));
                    for (std::size_t k = 0; k < I.size(); ++k) {
                        key[1 + I[k]] = x[1 + k];
                    }
                    for (std::size_t k = 0; k < J.size(); ++k) {
                        key[1 + J[k]] = y[1 + k];
                    }
                    for (const auto &[c, d] : dec.coefficients) {
                        key[0] = c[0];
                        detail::accumulate(acc, key, w * d);
                    }
                }
            }
        }
    }

    // (iii) Type II, brackets of (g, n-1) with b at the front
    if (n >= 2) {
        const CellId src{g, n - 1};
        detail::require_cell(lower, src, target);
        const FRational pre = FRational(-1) / (FRational::f() * (FRational::f() + 1));
        for (const auto &[b, v] : detail::unsorted_entries(lower, src)) {
            const auto &dec = kernels.type_II(b[0]).decomposition;
            for (std::size_t j = 0; j < rest; ++j) {
                // b[1..] fill positions 2..n except j+1 in order
                MultiIndex key(static_cast<std::size_t>(n));
                std::size_t src_pos = 1;
                for (std::size_t k = 0; k < rest; ++k) {
                    if (k != j) {
                        key[1 + k] = b[src_pos++];
                    }
                }
                for (const auto &[cd, d] : dec.coefficients) {
                    key[0] = cd[0];
                    key[1 + j] = cd[1];
                    detail::accumulate(acc, key, pre * v * d);
                }
            }
        }
    }

    StepResult r;
    r.cell = target;
    for (auto &[k, v] : acc) {
        if (!v.is_zero()) {
            r.unsorted.emplace(k, v);
        }
    }
    detail::check_extraction(r);
    for (const auto &[k, v] : r.unsorted) {
        if (std::is_sorted(k.begin(), k.end())) {
            r.entries.emplace(k, v);
        }
    }
    return r;
}

// prod_k p_{b_k}(t_k) for univariate factors taken from `family` (phi or phi').
inline Poly tensor_product(const std::vector<Poly> &family, const MultiIndex &b)
{
    const std::size_t n = b.size();
    std::vector<std::pair<Exponents, FRational>> terms{{Exponents(n, 0), FRational(1)}};
    for (std::size_t k = 0; k < n; ++k) {
        if (b[k] < 0 || static_cast<std::size_t>(b[k]) >= family.size()) {
            throw index_out_of_range("tower has no index " + std::to_string(b[k]));
        }
        std::vector<std::pair<Exponents, FRational>> next;
        for (const auto &[e, c] : terms) {
            for (const auto &[fe, fc] : family[static_cast<std::size_t>(b[k])].terms()) {
                Exponents x = e;
                x[k] = fe[0];
                next.emplace_back(std::move(x), c * fc);
            }
        }
        terms = std::move(next);
    }
    Poly out(n);
    for (auto &[e, c] : terms) {
        out.add_term(std::move(e), c);
    }
    return out;
}

// The same right-hand side built as an arity-n polynomial in t_1..t_n and then
// decomposed in the phi' tensor basis. Slower; used to cross-check recursion_step.
inline BracketTable::Entries recursion_step_via_polynomials(int g, int n, const BracketTable &lower,
                                                           KernelStore &kernels, const PhiTower &tower)
{
    const CellId target{g, n};
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t rest = nn - 1;
    Poly rhs(nn);
    auto rest_factor = [&](const MultiIndex &bs, std::size_t skip) {
        // prod over positions 2..n (except skip) of phi'_{b}(t_k), with the others fixed to 1
        MultiIndex full(nn, 0);
        Poly p = Poly::constant(nn, FRational(1));
        for (std::size_t k = 1; k < nn; ++k) {
            if (k != skip) {
                p = p * embed(tower.phi_prime(bs[k]), nn, {k});
            }
        }
        return p;
    };
    const FRational ff = FRational::f() * (FRational::f() + 1);
    if (g >= 1) {
        for (const auto &[b, v] : detail::unsorted_entries(lower, {g - 1, n + 1})) {
            MultiIndex key(b.begin() + 1, b.end());
            rhs += embed(kernels.type_I(b[0], b[1]).kernel, nn, {0}) * rest_factor(key, nn) * (pow(ff, n) * v);
        }
    }
    for (int g1 = 0; g1 <= g; ++g1) {
        for (unsigned mask = 0; mask < (1u << rest); ++mask) {
            std::vector<std::size_t> I, J;
            for (std::size_t k = 0; k < rest; ++k) {
                ((mask >> k) & 1u ? I : J).push_back(k);
            }
            const CellId c1{g1, static_cast<int>(I.size()) + 1}, c2{g - g1, static_cast<int>(J.size()) + 1};
            if (!is_stable(c1.g, c1.n) || !is_stable(c2.g, c2.n)) {
                continue;
            }
            for (const auto &[x, v1] : detail::unsorted_entries(lower, c1)) {
                for (const auto &[y, v2] : detail::unsorted_entries(lower, c2)) {
                    MultiIndex key(nn, 0);
                    for (std::size_t k = 0; k < I.size(); ++k) {
                        key[1 + I[k]] = x[1 + k];
                    }
                    for (std::size_t k = 0; k < J.size(); ++k) {
                        key[1 + J[k]] = y[1 + k];
                    }
                    rhs -= embed(kernels.type_I(x[0], y[0]).kernel, nn, {0}) * rest_factor(key, nn)
                           * (pow(ff, n - 1) * v1 * v2);
                }
            }
        }
    }
    if (n >= 2) {
        for (const auto &[b, v] : detail::unsorted_entries(lower, {g, n - 1})) {
            for (std::size_t j = 1; j < nn; ++j) {
                MultiIndex key(nn, 0);
                std::size_t src = 1;
                for (std::size_t k = 1; k < nn; ++k) {
                    if (k != j) {
                        key[k] = b[src++];
                    }
                }
                rhs -= embed(kernels.type_II(b[0]).kernel, nn, {0, j}) * rest_factor(key, j) * (pow(ff, n - 2) * v);
            }
        }
    }
    const PhiDecomposition dec = phi_prime_decompose(rhs, tower);
    BracketTable::Entries out;
    const FRational scale = FRational(1) / pow(ff, n - 1);
    for (const auto &[b, c] : dec.coefficients) {
        if (std::is_sorted(b.begin(), b.end())) {
            out.emplace(b, c * scale);
        }
    }
    (void)target;
    return out;
}

struct AssembledH {
    int g = 0;
    int n = 0;
    Poly poly{1};
};

// H_g^n = -(f(f+1))^{n-1} sum over all orderings b of B_g(b) prod_i phi_{b_i}(t_i).
inline AssembledH assemble_H(int g, int n, const BracketTable &table, const PhiTower &tower)
{
    const CellId c{g, n};
    if (!table.has_cell(c)) {
        throw missing_dependency("cannot assemble H for missing cell " + to_string(c));
    }
    AssembledH h{g, n, Poly(static_cast<std::size_t>(n))};
    const FRational pre = -detail::framing_power(n - 1);
    for (const auto &[b, v] : table.cell(c)) {
        const FRational w = pre * v;
        for_each_ordering(b, [&](const MultiIndex &p) { h.poly += tensor_product(tower.phis, p) * w; });
    }
    return h;
}

struct EngineOptions {
    int truncation_margin = 0;
    unsigned threads = 0; // 0: hardware concurrency
};

// Drives the recursion over increasing chi, then genus. Cells of one chi level
// are computed concurrently and published only once complete.
class Engine
{
public:
    explicit Engine(EngineOptions opts = {})
        : m_opts(opts), m_kernels(opts.truncation_margin), m_table(seed_initial_data())
    {
        if (m_opts.threads == 0) {
            m_opts.threads = std::max(1u, std::thread::hardware_concurrency());
        }
    }

    const EngineOptions &options() const
    {
        return m_opts;
    }
    const BracketTable &table() const
    {
        return m_table;
    }
    KernelStore &kernels()
    {
        return m_kernels;
    }
    // Unsorted extractions of the cells computed by this engine.
    const std::map<CellId, StepResult> &step_results() const
    {
        return m_results;
    }

    // Adopts previously computed cells (a warm cache); they are not recomputed.
    void load(const BracketTable &cached)
    {
        for (const auto &[c, e] : cached.cells()) {
            m_table.publish(c, e);
        }
    }

    const BracketTable &run_to_budget(int chi_max)
    {
        if (chi_max < 1) {
            throw index_out_of_range("chi_max must be at least 1");
        }
        int ab_max = -1, b_max = -1;
        for (int chi = 2; chi <= chi_max; ++chi) {
            for (const CellId &c : BracketTable::cells_with_chi(chi)) {
                if (!m_table.has_cell(c)) {
                    auto [ab, b] = kernel_ranges(c.g, c.n);
                    ab_max = std::max(ab_max, ab);
                    b_max = std::max(b_max, b);
                }
            }
        }
        if (ab_max >= 0 || b_max >= 0) {
            m_kernels.prepare(std::max(ab_max, 0), std::max(b_max, 0), m_opts.threads);
        }
        for (int chi = 2; chi <= chi_max; ++chi) {
            std::vector<CellId> todo;
            for (const CellId &c : BracketTable::cells_with_chi(chi)) {
                if (!m_table.has_cell(c)) {
                    todo.push_back(c);
                }
            }
            std::vector<std::future<StepResult>> futs;
            for (const CellId &c : todo) {
                futs.push_back(std::async(m_opts.threads > 1 ? std::launch::async : std::launch::deferred,
                                          [this, c] { return recursion_step(c.g, c.n, m_table, m_kernels); }));
            }
            std::vector<StepResult> done;
            for (auto &fu : futs) {
                done.push_back(fu.get());
            }
            for (auto &r : done) {
                m_table.publish(r.cell, r.entries);
                m_results[r.cell] = std::move(r);
            }
        }
        return m_table;
    }

    // A phi tower tall enough to assemble every cell up to chi_max.
    const PhiTower &tower(int chi_max)
    {
        const int need = chi_max + (chi_max + 1) / 2 + 1;
        std::lock_guard<std::mutex> lock(m_tower_mu);
        if (!m_tower || m_tower->max_index() < need) {
            m_tower = std::make_shared<const PhiTower>(build_phi_tower(need));
        }
        return *m_tower;
    }

private:
    EngineOptions m_opts;
    KernelStore m_kernels;
    BracketTable m_table;
    std::map<CellId, StepResult> m_results;
    std::mutex m_tower_mu;
    std::shared_ptr<const PhiTower> m_tower;
};

} // namespace fvtr
