#pragma once

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include <fvtr/curve.hpp>
#include <fvtr/curve_functions.hpp>
#include <fvtr/errors.hpp>

namespace fvtr
{

// Default truncation orders. Type I needs pole order 2a+2b+5 in v.
inline int kernel_I_order(int a, int b, int margin = 0)
{
    return 2 * a + 2 * b + 12 + margin;
}
inline int kernel_II_order(int b, int margin = 0)
{
    return 2 * b + 12 + margin;
}
// Degree cap in t_i for the Type II kernel; coefficients are expected to stop at 2b+2.
inline int kernel_II_cap(int b)
{
    return 2 * b + 6;
}

// Everything the residue kernels read, built once at a maximal order and then
// read concurrently. Kernels at a lower order N truncate each input to relative
// precision N - 1, which reproduces a from-scratch computation at order N.
struct KernelContext {
    std::shared_ptr<const CurveSeries> curve;
    PhiTower tower;
    EtaFamily eta;
    Series dt_dv;
    Series s_prime;                 // (ds/dv)/(dt/dv)
    std::vector<Series> s_powers;   // s(v)^j
    std::vector<Series> z_powers;   // z(v)^k = t^{-k}
    std::vector<Series> zs_powers;  // z(-v)^k = s^{-k}
    std::vector<Series> phi_t;      // phi_n(t(v))
    std::vector<Series> phi_s;      // phi_n(s(v))

    int order() const
    {
        return curve->order;
    }
    int max_phi() const
    {
        return static_cast<int>(phi_t.size()) - 1;
    }
};

// n_max: highest eta/phi index used; z_max: highest power of z needed.
inline std::shared_ptr<const KernelContext> make_kernel_context(int N, int n_max, int z_max)
{
    auto ctx = std::make_shared<KernelContext>();
    ctx->curve = curve_series(N);
    const CurveSeries &c = *ctx->curve;
    ctx->tower = build_phi_tower(n_max + 4);
    ctx->eta = build_eta_family(c, ctx->tower, n_max);
    ctx->dt_dv = c.t_of_v.derivative();
    ctx->s_prime = c.s_t_of_v.derivative() / ctx->dt_dv;
    ctx->s_powers = series_powers(c.s_t_of_v, N);
    ctx->z_powers = series_powers(c.z_of_v, z_max + 1);
    ctx->zs_powers = series_powers(c.z_of_v.reflected(), z_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        ctx->phi_t.push_back(evaluate_along(ctx->tower.phi(n), c.t_powers));
        ctx->phi_s.push_back(evaluate_along(ctx->tower.phi(n), ctx->s_powers));
    }
    return ctx;
}

namespace detail
{

inline void require_order(const KernelContext &ctx, int N, const char *what)
{
    if (N > ctx.order()) {
        throw insufficient_truncation(std::string(what) + " at order " + std::to_string(N) + " exceeds context order "
                                      + std::to_string(ctx.order()));
    }
}

inline void require_phi(const KernelContext &ctx, int n)
{
    if (n > ctx.max_phi() || n > ctx.eta.max_index()) {
        throw index_out_of_range("kernel needs phi_" + std::to_string(n) + "/eta_" + std::to_string(n)
                                 + ", context holds up to " + std::to_string(ctx.max_phi()));
    }
}

inline std::vector<Series> powers_at_order(const std::vector<Series> &pw, std::size_t count, int N)
{
    std::vector<Series> out;
    for (std::size_t j = 0; j < std::min(count, pw.size()); ++j) {
        out.push_back(at_order(pw[j], N));
    }
    return out;
}

inline Poly plus_part_at_order(const Series &S, const KernelContext &ctx, int N)
{
    const int poles = std::max(-S.lead(), 0);
    return plus_part(S, powers_at_order(ctx.curve->t_powers, static_cast<std::size_t>(poles + 1), N)).poly;
}

} // namespace detail

// The v-series -1/2 eta_{a+1} eta_{b+1} / eta_{-1} ((f+1)/f) v / (dt/dv), whose
// plus part is P_{a,b}(t).
inline Series kernel_I_integrand(int a, int b, const KernelContext &ctx, int N)
{
    detail::require_order(ctx, N, "kernel_I");
    detail::require_phi(ctx, std::max(a, b) + 1);
    const FRational f = FRational::f();
    const Series ea = at_order(ctx.eta.eta(a + 1), N);
    const Series eb = at_order(ctx.eta.eta(b + 1), N);
    const Series em = at_order(ctx.eta.eta(-1), N);
    const Series dt = at_order(ctx.dt_dv, N);
    return (ea * eb / em).shifted(1) * (-(f + 1) / (f * 2)) / dt;
}

inline Poly kernel_I(int a, int b, const KernelContext &ctx, int N)
{
    return detail::plus_part_at_order(kernel_I_integrand(a, b, ctx, N), ctx, N);
}

// The involution form
// (phi_{a+1}(t) phi_{b+1}(s) + phi_{a+1}(s) phi_{b+1}(t)) / 2 * (f+1) / (t(t-1)(ft+1)) / (-2 eta_{-1})
inline Series kernel_I_involution_integrand(int a, int b, const KernelContext &ctx, int N)
{
    detail::require_order(ctx, N, "kernel_I_via_involution");
    detail::require_phi(ctx, std::max(a, b) + 1);
    const FRational f = FRational::f();
    const auto idx = [](int n) { return static_cast<std::size_t>(n); };
    const Series pa_t = at_order(ctx.phi_t[idx(a + 1)], N), pa_s = at_order(ctx.phi_s[idx(a + 1)], N);
    const Series pb_t = at_order(ctx.phi_t[idx(b + 1)], N), pb_s = at_order(ctx.phi_s[idx(b + 1)], N);
    const std::vector<Series> tp = detail::powers_at_order(ctx.curve->t_powers, 4, N);
    const Series cubic = evaluate_along(euler_factor() * (f + 1), tp); // t(t-1)(ft+1)
    const Series em = at_order(ctx.eta.eta(-1), N);
    const Series num = (pa_t * pb_s + pa_s * pb_t) * ((f + 1) / 2);
    return num / (em * FRational(-2)) / cubic;
}

inline Poly kernel_I_via_involution(int a, int b, const KernelContext &ctx, int N)
{
    return detail::plus_part_at_order(kernel_I_involution_integrand(a, b, ctx, N), ctx, N);
}

namespace detail
{

// Shared driver for both Type II forms. Variables: t (index 0) and t_i (index 1).
template <typename Term>
Poly kernel_II_driver(int b, const KernelContext &ctx, int N, int K, Term &&term)
{
    require_order(ctx, N, "kernel_II");
    require_phi(ctx, b + 1);
    if (K + 2 >= static_cast<int>(ctx.z_powers.size())) {
        throw index_out_of_range("kernel_II degree cap " + std::to_string(K) + " exceeds context");
    }
    const Series pt = at_order(ctx.phi_t[static_cast<std::size_t>(b + 1)], N);
    const Series ps = at_order(ctx.phi_s[static_cast<std::size_t>(b + 1)], N);
    const Series sp = at_order(ctx.s_prime, N);
    const Series em2 = at_order(ctx.eta.eta(-1), N) * FRational(2);
    Poly out(2);
    for (int k = 0; k <= K; ++k) {
        const Series zk = at_order(ctx.z_powers[static_cast<std::size_t>(k + 2)], N);
        const Series zsk = at_order(ctx.zs_powers[static_cast<std::size_t>(k + 2)], N);
        const Series S = term(pt, ps, sp, zk, zsk) * FRational(k + 1) / em2;
        const Poly p = plus_part_at_order(S, ctx, N);
        if (k == K && !p.is_zero()) {
            throw degree_cap_exceeded("t_i^" + std::to_string(K) + " coefficient of the Type II kernel for b = "
                                      + std::to_string(b) + " is " + to_string(p));
        }
        for (const auto &[e, c] : p.terms()) {
            out.add_term({e[0], k}, c);
        }
    }
    return out;
}

} // namespace detail

// P_b(t, t_i) = ( (phi_{b+1}(t) B(s,t_i) + phi_{b+1}(s) B(t,t_i)) / (2 eta_{-1}) )_+ with the Bergman
// factors expanded in t_i: 1/(t-t_i)^2 = sum_k (k+1) t_i^k z^{k+2}.
inline Poly kernel_II(int b, const KernelContext &ctx, int N, int K)
{
    return detail::kernel_II_driver(b, ctx, N, K,
                                    [](const Series &pt, const Series &ps, const Series &sp, const Series &zk,
                                       const Series &zsk) { return -(pt * sp * zsk + ps * zk); });
}

// The symmetrized form with numerator phi_{b+1}(t) B(t,t_i) + phi_{b+1}(s) B(s,t_i).
inline Poly kernel_II_symmetrized(int b, const KernelContext &ctx, int N, int K)
{
    return detail::kernel_II_driver(b, ctx, N, K,
                                    [](const Series &pt, const Series &ps, const Series &sp, const Series &zk,
                                       const Series &zsk) { return pt * zk + ps * sp * zsk; });
}

// Thread-safe memo of kernels and their phi' decompositions. Each entry is
// computed exactly once; concurrent requests for the same key wait on it.
class KernelStore
{
public:
    struct Entry {
        Poly kernel;
        PhiDecomposition decomposition;
    };

    explicit KernelStore(int truncation_margin = 0) : m_margin(truncation_margin) {}

    int truncation_margin() const
    {
        return m_margin;
    }

    // Precomputes Type I kernels with a + b <= ab_max and Type II kernels with
    // b <= b_max, spreading the work over `threads` workers.
    void prepare(int ab_max, int b_max, unsigned threads = std::thread::hardware_concurrency())
    {
        ensure_context(ab_max, b_max);
        std::vector<std::pair<int, int>> jobs;
        for (int s = ab_max; s >= 0; --s) {
            for (int a = 0; 2 * a <= s; ++a) {
                jobs.emplace_back(a, s - a);
            }
        }
        for (int b = b_max; b >= 0; --b) {
            jobs.emplace_back(-1, b);
        }
        run_parallel(jobs, std::max(1u, threads));
    }

    const Entry &type_I(int a, int b)
    {
        if (a > b) {
            std::swap(a, b);
        }
        return fetch({a, b});
    }
    const Entry &type_II(int b)
    {
        return fetch({-1, b});
    }

    std::shared_ptr<const KernelContext> context()
    {
        std::lock_guard<std::mutex> lock(m_mu);
        return m_ctx;
    }

    // Every kernel finished so far, keyed (a, b) for Type I and (-1, b) for Type II.
    std::map<std::pair<int, int>, std::shared_ptr<const Entry>> computed()
    {
        std::map<std::pair<int, int>, std::shared_future<std::shared_ptr<const Entry>>> snapshot;
        {
            std::lock_guard<std::mutex> lock(m_mu);
            snapshot = m_entries;
        }
        std::map<std::pair<int, int>, std::shared_ptr<const Entry>> out;
        for (auto &[k, fut] : snapshot) {
            if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
                continue;
            }
            try {
                out.emplace(k, fut.get());
            } catch (const error &) {
            }
        }
        return out;
    }

private:
    using Key = std::pair<int, int>; // (a, b) for Type I with a <= b; (-1, b) for Type II

    void ensure_context(int ab_max, int b_max)
    {
        const int N = std::max(kernel_I_order(0, ab_max, m_margin), kernel_II_order(b_max, m_margin));
        const int n_max = std::max(ab_max, b_max) + 1;
        const int z_max = kernel_II_cap(b_max) + 2;
        std::lock_guard<std::mutex> lock(m_mu);
        if (m_ctx && m_ctx->order() >= N && m_ctx->max_phi() >= n_max
            && static_cast<int>(m_ctx->z_powers.size()) > z_max) {
            return;
        }
        const int N2 = m_ctx ? std::max(N, m_ctx->order()) : N;
        const int n2 = m_ctx ? std::max(n_max, m_ctx->max_phi()) : n_max;
        const int z2 = m_ctx ? std::max(z_max, static_cast<int>(m_ctx->z_powers.size()) - 1) : z_max;
        m_ctx = make_kernel_context(N2, n2, z2);
    }

    Entry compute(const Key &key, const KernelContext &ctx) const
    {
        Entry e;
        if (key.first >= 0) {
            e.kernel = kernel_I(key.first, key.second, ctx, kernel_I_order(key.first, key.second, m_margin));
        } else {
            const int b = key.second;
            e.kernel = kernel_II(b, ctx, kernel_II_order(b, m_margin), kernel_II_cap(b));
        }
        e.decomposition = phi_prime_decompose(e.kernel, ctx.tower);
        return e;
    }

    const Entry &fetch(const Key &key)
    {
        std::shared_future<std::shared_ptr<const Entry>> fut;
        std::promise<std::shared_ptr<const Entry>> promise;
        bool owner = false;
        {
            std::lock_guard<std::mutex> lock(m_mu);
            auto it = m_entries.find(key);
            if (it != m_entries.end()) {
                fut = it->second;
            } else {
                fut = promise.get_future().share();
                m_entries.emplace(key, fut);
                owner = true;
            }
        }
        if (owner) {
            try {
                if (key.first >= 0) {
                    ensure_context(key.first + key.second, 0);
                } else {
                    ensure_context(0, key.second);
                }
                promise.set_value(std::make_shared<const Entry>(compute(key, *context())));
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return *fut.get();
    }

    void run_parallel(const std::vector<Key> &jobs, unsigned threads)
    {
        std::mutex qmu;
        std::size_t next = 0;
        std::exception_ptr failure;
        auto worker = [&] {
            for (;;) {
                Key key;
                {
                    std::lock_guard<std::mutex> lock(qmu);
                    if (next >= jobs.size() || failure) {
                        return;
                    }
                    key = jobs[next++];
                }
                try {
                    fetch(key);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(qmu);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
        for (unsigned k = 0; k < count; ++k) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    int m_margin;
    std::mutex m_mu;
    std::shared_ptr<const KernelContext> m_ctx;
    std::map<Key, std::shared_future<std::shared_ptr<const Entry>>> m_entries;
};

} // namespace fvtr
