#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <fvtr/cutjoin.hpp>
#include <fvtr/engine.hpp>
#include <fvtr/kernels.hpp>
#include <fvtr/psi_oracle.hpp>
#include <fvtr/serialize.hpp>

namespace fvtr
{

// Named pass/fail checks shared by the command-line verifier and the
// acceptance runner. Details carry no timings so reports are reproducible.
struct Check {
    std::string suite;
    std::string name;
    bool passed = false;
    nlohmann::json detail = nlohmann::json::object();
};

struct SuiteReport {
    std::vector<Check> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
    }
    const Check *first_failure() const
    {
        for (const auto &c : checks) {
            if (!c.passed) {
                return &c;
            }
        }
        return nullptr;
    }
    void append(SuiteReport other)
    {
        for (auto &c : other.checks) {
            checks.push_back(std::move(c));
        }
    }
    nlohmann::json to_json() const
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &c : checks) {
            arr.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        }
        return {{"passed", passed()}, {"checks", std::move(arr)}};
    }
};

namespace detail
{

// Runs fn(item) -> Check over items on up to `threads` workers, keeping order.
template <typename T, typename Fn>
std::vector<Check> parallel_checks(const std::vector<T> &items, unsigned threads, Fn fn)
{
    std::vector<Check> out(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < items.size();) {
            out[k] = fn(items[k]);
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(items.size())));
    for (unsigned k = 0; k < count; ++k) {
        pool.emplace_back(worker);
    }
    for (auto &t : pool) {
        t.join();
    }
    return out;
}

inline std::vector<MultiIndex> sorted_indices(int n, int max_sum)
{
    std::vector<MultiIndex> out;
    MultiIndex cur;
    auto rec = [&](auto &&self, int lo, int left) -> void {
        if (static_cast<int>(cur.size()) == n) {
            out.push_back(cur);
            return;
        }
        for (int x = lo; x <= left; ++x) {
            cur.push_back(x);
            self(self, x, left - x);
            cur.pop_back();
        }
    };
    rec(rec, 0, max_sum);
    return out;
}

inline int index_sum(const MultiIndex &b)
{
    int s = 0;
    for (int x : b) {
        s += x;
    }
    return s;
}

// Coefficients of prod_i phi_{b_i}(t_i) in a polynomial over Q, for a tower
// specialized at a rational framing. Leading monomial of the product is
// prod_i t_i^{2 b_i + 1}; anything else left over is reported as a residual.
inline std::map<MultiIndex, Rational> decompose_in_phi(TPolynomial<Rational> p,
                                                       const std::vector<TPolynomial<Rational>> &phis, bool &exact)
{
    std::map<MultiIndex, Rational> out;
    exact = true;
    const std::size_t n = p.arity();
    while (!p.is_zero()) {
        const auto top = std::prev(p.terms().end());
        const Exponents e = top->first;
        const Rational c = top->second;
        MultiIndex b(n);
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            ok = ok && e[k] % 2 == 1 && static_cast<std::size_t>(e[k] / 2) < phis.size();
            b[k] = e[k] / 2;
        }
        if (!ok) {
            exact = false;
            return out;
        }
        TPolynomial<Rational> basis = TPolynomial<Rational>::constant(n, Rational(1));
        for (std::size_t k = 0; k < n; ++k) {
            basis = basis * embed(phis[static_cast<std::size_t>(b[k])], n, {k});
        }
        Rational q = c / basis.coefficient(e);
        q.canonicalize();
        out[b] = q;
        p -= basis * q;
    }
    return out;
}

} // namespace detail

// Cut-join identity on every verifiable cell with 2g-2+n <= chi_max.
inline SuiteReport suite_cutjoin(const BracketTable &table, int chi_max, unsigned threads = 1)
{
    std::vector<CellId> cells;
    for (int chi = 2; chi <= chi_max; ++chi) {
        for (const CellId &c : BracketTable::cells_with_chi(chi)) {
            cells.push_back(c);
        }
    }
    HAssembler h(table);
    SuiteReport r;
    r.checks = detail::parallel_checks(cells, threads, [&](const CellId &c) {
        Check k{"cutjoin", "cutjoin " + to_string(c)};
        try {
            const CutJoinReport rep = verify_cutjoin(c.g, c.n, h);
            k.passed = rep.passed();
            k.detail = {{"residual_terms", rep.residual.size()},
                        {"lhs_terms", rep.lhs.size()},
                        {"t1_terms", rep.t1.size()},
                        {"t2_t3_terms", rep.t2_t3.size()},
                        {"t4_terms", rep.t4.size()}};
            if (!k.passed) {
                k.detail["residual_leading"] = to_string(rep.residual).substr(0, 400);
            }
        } catch (const error &e) {
            k.detail = {{"error", e.what()}};
        }
        return k;
    });
    return r;
}

// Kernel cross-forms for a, b <= ab_max and Type II for b <= b2_max; each
// kernel also has to decompose exactly and be unchanged at truncation margin + 4.
inline SuiteReport suite_kernels(int margin = 0, int ab_max = 3, int b2_max = 2, unsigned threads = 1)
{
    const int wide = margin + 4;
    const int N = std::max(kernel_I_order(ab_max, ab_max, wide), kernel_II_order(b2_max, wide));
    const int n_max = std::max(ab_max, b2_max) + 1;
    auto ctx = make_kernel_context(N, n_max, kernel_II_cap(b2_max) + 2);
    std::vector<std::pair<int, int>> jobs;
    for (int a = 0; a <= ab_max; ++a) {
        for (int b = a; b <= ab_max; ++b) {
            jobs.emplace_back(a, b);
        }
    }
    for (int b = 0; b <= b2_max; ++b) {
        jobs.emplace_back(-1, b);
    }
    SuiteReport r;
    r.checks = detail::parallel_checks(jobs, threads, [&](const std::pair<int, int> &job) {
        const auto [a, b] = job;
        Check k{"kernels", a >= 0 ? "kernel_I " + std::to_string(a) + "," + std::to_string(b)
                                  : "kernel_II " + std::to_string(b)};
        try {
            Poly p(1), q(1), w(1);
            if (a >= 0) {
                p = kernel_I(a, b, *ctx, kernel_I_order(a, b, margin));
                q = kernel_I_via_involution(a, b, *ctx, kernel_I_order(a, b, margin));
                w = kernel_I(a, b, *ctx, kernel_I_order(a, b, wide));
            } else {
                p = kernel_II(b, *ctx, kernel_II_order(b, margin), kernel_II_cap(b));
                q = kernel_II_symmetrized(b, *ctx, kernel_II_order(b, margin), kernel_II_cap(b));
                w = kernel_II(b, *ctx, kernel_II_order(b, wide), kernel_II_cap(b));
            }
            const PhiDecomposition d = phi_prime_decompose_partial(p, ctx->tower);
            k.detail = {{"cross_form", p == q}, {"in_span", d.in_span()}, {"margin_stable", p == w},
                        {"terms", p.size()}};
            k.passed = p == q && d.in_span() && p == w;
        } catch (const error &e) {
            k.detail = {{"error", e.what()}};
        }
        return k;
    });
    return r;
}

// Every kernel an engine run actually used decomposed with zero residual (the
// Type II degree cap guard would have thrown during the run otherwise).
inline SuiteReport suite_used_kernels(KernelStore &store)
{
    SuiteReport r;
    for (const auto &[key, entry] : store.computed()) {
        Check k{"kernels", key.first >= 0 ? "used kernel_I " + std::to_string(key.first) + "," + std::to_string(key.second)
                                          : "used kernel_II " + std::to_string(key.second)};
        k.passed = entry->decomposition.in_span();
        k.detail = {{"terms", entry->kernel.size()}, {"basis_terms", entry->decomposition.coefficients.size()}};
        r.checks.push_back(std::move(k));
    }
    return r;
}

// Re-runs the recursion step for each computed cell: the unsorted extraction
// must be permutation invariant, supported in sum(b) <= 3g-3+n, and agree
// with the stored table.
inline SuiteReport suite_symmetry(const BracketTable &table, KernelStore &store, unsigned threads = 1)
{
    std::vector<CellId> cells;
    for (const auto &[c, e] : table.cells()) {
        if (c.chi() >= 2) {
            cells.push_back(c);
        }
    }
    SuiteReport r;
    r.checks = detail::parallel_checks(cells, threads, [&](const CellId &c) {
        Check k{"symmetry", "extraction " + to_string(c)};
        try {
            const StepResult res = recursion_step(c.g, c.n, table, store);
            int max_sum = 0;
            for (const auto &[b, v] : res.unsorted) {
                max_sum = std::max(max_sum, detail::index_sum(b));
            }
            const bool matches = res.entries == table.cell(c);
            k.passed = matches;
            k.detail = {{"unsorted_entries", res.unsorted.size()},
                        {"sorted_entries", res.entries.size()},
                        {"max_index_sum", max_sum},
                        {"dimension", cell_dimension(c.g, c.n)},
                        {"matches_table", matches}};
        } catch (const error &e) {
            k.detail = {{"error", e.what()}};
        }
        return k;
    });
    return r;
}

// Specialization commutes with assembly: table values evaluated at f0 equal the
// brackets read back from H with its coefficients evaluated at f0 first.
inline Check specialization_check(const BracketTable &table, CellId c, const Rational &f0)
{
    Check k{"oracle", "specialization " + to_string(c) + " at f=" + to_string(f0)};
    try {
        const PhiTower tower = build_phi_tower(cell_dimension(c.g, c.n) + 1);
        const auto at = [&](const FRational &x) { return evaluate_at(x, f0); };
        const Poly H = assemble_H(c.g, c.n, table, tower).poly;
        const TPolynomial<Rational> Hn = map_coefficients(H, at);
        std::vector<TPolynomial<Rational>> phis;
        for (const auto &p : tower.phis) {
            phis.push_back(map_coefficients(p, at));
        }
        bool exact = false;
        const auto coeffs = detail::decompose_in_phi(Hn, phis, exact);
        Rational pre = f0 * (f0 + 1);
        Rational scale = 1;
        for (int i = 0; i < c.n - 1; ++i) {
            scale *= pre;
        }
        scale = -scale;
        bool ok = exact;
        std::size_t compared = 0;
        for (const auto &[b, v] : coeffs) {
            Rational got = v / scale;
            got.canonicalize();
            ok = ok && got == evaluate_at(table.get(c.g, b), f0);
            ++compared;
        }
        // and nothing in the table is missing from H
        for (const auto &[b, v] : table.cell(c)) {
            const bool zero_at = evaluate_at(v, f0) == 0;
            bool found = false;
            for_each_ordering(b, [&](const MultiIndex &p) { found = found || coeffs.count(p) != 0; });
            ok = ok && (found || zero_at);
        }
        k.passed = ok;
        k.detail = {{"compared", compared}, {"exact_decomposition", exact}};
    } catch (const error &e) {
        k.detail = {{"error", e.what()}};
    }
    return k;
}

// Independent values: genus zero closed form, top-degree psi intersections
// from the DVV recursion, genus one via psi and lambda_1 integrals, plus
// specialization spot checks at f = 2, 3 and at two seeded random framings.
inline SuiteReport suite_oracle(const BracketTable &table, int chi_max, std::uint64_t seed = 20240611)
{
    SuiteReport r;
    const FRational f = FRational::f();
    for (const auto &[c, entries] : table.cells()) {
        if (c.chi() > chi_max) {
            continue;
        }
        const int dim = cell_dimension(c.g, c.n);
        std::size_t compared = 0;
        bool ok = true;
        std::string first_bad;
        auto compare = [&](const MultiIndex &b, const FRational &expect) {
            ++compared;
            if (!(table.get(c.g, b) == expect)) {
                if (first_bad.empty()) {
                    first_bad = to_string(b) + ": " + to_string(table.get(c.g, b)) + " vs " + to_string(expect);
                }
                ok = false;
            }
        };
        const std::string label = to_string(c);
        if (c.g == 0) {
            for (const auto &b : detail::sorted_indices(c.n, dim + 1)) {
                compare(b, FRational(psi_genus_zero(b)));
            }
            Check k{"oracle", "genus zero closed form " + label, ok, {{"compared", compared}}};
            if (!ok) {
                k.detail["first_mismatch"] = first_bad;
            }
            r.checks.push_back(std::move(k));
        } else if (c.g == 1) {
            for (const auto &b : detail::sorted_indices(c.n, dim + 1)) {
                compare(b, -f * (f + 1) * FRational(psi_intersection(1, b)) + (f * f + f + 1) * FRational(lambda1_genus_one(b)));
            }
            Check k{"oracle", "genus one psi and lambda_1 " + label, ok, {{"compared", compared}}};
            if (!ok) {
                k.detail["first_mismatch"] = first_bad;
            }
            r.checks.push_back(std::move(k));
        }
        compared = 0;
        ok = true;
        first_bad.clear();
        const FRational w = pow(-f * (f + 1), c.g);
        for (const auto &b : detail::sorted_indices(c.n, dim)) {
            if (detail::index_sum(b) == dim) {
                compare(b, w * FRational(psi_intersection(c.g, b)));
            }
        }
        Check k{"oracle", "top degree psi intersections " + label, ok, {{"compared", compared}}};
        if (!ok) {
            k.detail["first_mismatch"] = first_bad;
        }
        r.checks.push_back(std::move(k));
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    std::vector<Rational> points{Rational(2), Rational(3)};
    while (points.size() < 4) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        // keep away from the framing poles f = 0, -1
        if (q != 0 && q != -1) {
            points.push_back(q);
        }
    }
    for (CellId c : {CellId{1, 2}, CellId{0, 5}}) {
        if (c.chi() <= chi_max && table.has_cell(c)) {
            for (const Rational &p : points) {
                r.checks.push_back(specialization_check(table, c, p));
            }
        }
    }
    return r;
}

} // namespace fvtr
