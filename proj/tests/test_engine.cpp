#include <catch2/catch_amalgamated.hpp>

#include <fvtr/engine.hpp>
#include <fvtr/psi_oracle.hpp>

#include "random_values.hpp"

using namespace fvtr;

namespace
{

const FRational f = FRational::f();

Engine &engine5()
{
    static Engine e;
    static const bool ran = (e.run_to_budget(5), true);
    (void)ran;
    return e;
}

int total(const MultiIndex &b)
{
    int s = 0;
    for (int x : b) {
        s += x;
    }
    return s;
}

// Every sorted multi-index of length n with entries summing to at most m.
std::vector<MultiIndex> all_sorted(int n, int m)
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
    rec(rec, 0, m);
    return out;
}

} // namespace

TEST_CASE("orbit helpers count distinct orderings")
{
    CHECK(orbit_size({0, 0, 0}) == 1);
    CHECK(orbit_size({0, 1, 1}) == 3);
    CHECK(orbit_size({0, 1, 2, 2}) == 12);
    long k = 0;
    for_each_ordering({2, 0, 1, 1}, [&](const MultiIndex &) { ++k; });
    CHECK(k == 12);
}

TEST_CASE("seed data and table bookkeeping")
{
    const BracketTable t = seed_initial_data();
    CHECK(t.get(0, {0, 0, 0}) == FRational(1));
    CHECK(t.get(1, {0}) == (f * f + f + 1) / 24);
    CHECK(t.get(1, {1}) == -f * (f + 1) / 24);
    CHECK(t.get(1, {2}).is_zero());
    CHECK(t.chi_max() == 1);
    CHECK_THROWS_AS(t.get(0, {0, 0}), unstable_dependency);
    CHECK_THROWS_AS(t.get(0, {0, 0, 0, 1}), missing_dependency);

    BracketTable u;
    CHECK_THROWS_AS(u.publish({0, 2}, {}), unstable_dependency);
    CHECK_THROWS_AS(u.publish({0, 3}, {{{1, 0, 0}, FRational(1)}}), index_out_of_range);
    u.publish({0, 3}, {{{0, 0, 0}, FRational(1)}, {{0, 0, 1}, FRational(0)}});
    CHECK(u.cell({0, 3}).size() == 1);
}

TEST_CASE("recursion steps reject missing or unstable inputs")
{
    KernelStore store;
    const BracketTable t = seed_initial_data();
    CHECK_THROWS_AS(recursion_step(1, 3, t, store), missing_dependency);
    CHECK_THROWS_AS(recursion_step(0, 2, t, store), unstable_dependency);
    CHECK_THROWS_AS(recursion_step(1, 1, t, store), missing_dependency);
}

TEST_CASE("genus zero step values")
{
    const BracketTable &t = engine5().table();
    CHECK(t.get(0, {0, 0, 0, 1}) == FRational(1));
    CHECK(t.get(0, {0, 0, 0, 1, 1}) == FRational(2));
    CHECK(t.get(0, {0, 0, 0, 0, 2}) == FRational(1));
    for (int n = 3; n <= 7; ++n) {
        for (const auto &b : all_sorted(n, n - 2)) {
            INFO(to_string(b));
            CHECK(t.get(0, b) == FRational(psi_genus_zero(b)));
            CHECK(psi_intersection(0, b) == psi_genus_zero(b));
        }
    }
}

TEST_CASE("genus one agrees with psi and lambda_1 integrals")
{
    const BracketTable &t = engine5().table();
    for (int n = 1; n <= 5; ++n) {
        for (const auto &b : all_sorted(n, n + 1)) {
            INFO(to_string(b));
            const FRational expect = -f * (f + 1) * FRational(psi_intersection(1, b))
                                     + (f * f + f + 1) * FRational(lambda1_genus_one(b));
            CHECK(t.get(1, b) == expect);
        }
    }
}

TEST_CASE("top-degree brackets are framed psi intersections")
{
    const BracketTable &t = engine5().table();
    for (const auto &[c, entries] : t.cells()) {
        const FRational w = pow(-f * (f + 1), c.g);
        for (const auto &b : all_sorted(c.n, cell_dimension(c.g, c.n))) {
            if (total(b) == cell_dimension(c.g, c.n)) {
                INFO(to_string(c) << " " << to_string(b));
                CHECK(t.get(c.g, b) == w * FRational(psi_intersection(c.g, b)));
            }
        }
    }
    CHECK(t.get(3, {7}) == -pow(f * (f + 1), 3) / 82944);
}

TEST_CASE("extractions are symmetric and supported below the dimension")
{
    Engine &e = engine5();
    CHECK(e.table().chi_max() == 5);
    CHECK(e.table().has_cell({3, 1}));
    for (const auto &[c, r] : e.step_results()) {
        INFO(to_string(c));
        for (const auto &[b, v] : r.unsorted) {
            CHECK(total(b) <= cell_dimension(c.g, c.n));
            CHECK(e.table().get(c.g, b) == v);
        }
        long expanded = 0;
        for (const auto &[b, v] : r.entries) {
            expanded += orbit_size(b);
        }
        CHECK(expanded == static_cast<long>(r.unsorted.size()));
    }
}

TEST_CASE("coefficient route matches the polynomial route")
{
    Engine &e = engine5();
    const PhiTower tower = build_phi_tower(8);
    for (CellId c : {CellId{0, 4}, CellId{0, 5}, CellId{1, 2}, CellId{2, 1}, CellId{1, 3}, CellId{0, 6}}) {
        INFO(to_string(c));
        CHECK(recursion_step_via_polynomials(c.g, c.n, e.table(), e.kernels(), tower) == e.table().cell(c));
    }
}

TEST_CASE("runs are idempotent and reuse a warm table")
{
    Engine &e = engine5();
    const BracketTable before = e.table();
    e.run_to_budget(5);
    CHECK(e.table() == before);

    Engine warm;
    warm.load(before);
    warm.run_to_budget(5);
    CHECK(warm.step_results().empty());
    CHECK(warm.table() == before);
}

TEST_CASE("wider truncation margin leaves the brackets unchanged")
{
    Engine wide(EngineOptions{4, 0});
    wide.run_to_budget(4);
    const BracketTable &ref = engine5().table();
    for (const auto &[c, entries] : wide.table().cells()) {
        INFO(to_string(c));
        CHECK(entries == ref.cell(c));
    }
}

TEST_CASE("assembled H for the base cells")
{
    Engine &e = engine5();
    const PhiTower &tower = e.tower(5);
    const AssembledH h03 = assemble_H(0, 3, e.table(), tower);
    // -(f(f+1))^2 phi_0(t1) phi_0(t2) phi_0(t3)
    Poly expect = Poly::constant(3, -pow(f * (f + 1), 2));
    for (std::size_t i = 0; i < 3; ++i) {
        expect = expect * embed(tower.phi(0), 3, {i});
    }
    CHECK(h03.poly == expect);

    const AssembledH h11 = assemble_H(1, 1, e.table(), tower);
    CHECK(h11.poly == tower.phi(0) * -e.table().get(1, {0}) - tower.phi(1) * e.table().get(1, {1}));

    // H is symmetric under swapping variables
    const AssembledH h22 = assemble_H(2, 2, e.table(), tower);
    Poly swapped(2);
    for (const auto &[x, c] : h22.poly.terms()) {
        swapped.add_term({x[1], x[0]}, c);
    }
    CHECK(swapped == h22.poly);
    CHECK_THROWS_AS(assemble_H(4, 1, e.table(), tower), missing_dependency);
}
