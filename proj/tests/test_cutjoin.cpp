#include <catch2/catch_amalgamated.hpp>

#include <fvtr/cutjoin.hpp>
#include <fvtr/psi_oracle.hpp>

#include "random_values.hpp"

using namespace fvtr;

namespace
{

const FRational f = FRational::f();

const BracketTable &table5()
{
    static Engine e;
    static const bool ran = (e.run_to_budget(5), true);
    (void)ran;
    return e.table();
}

Poly t_var(std::size_t n, std::size_t i)
{
    return Poly::variable(n, i);
}

} // namespace

TEST_CASE("left-hand side on the three-point cell by hand")
{
    HAssembler h(table5());
    // H_0^3 = -f^2 (t1-1)(t2-1)(t3-1)/(f+1)
    const Poly one = Poly::constant(3, FRational(1));
    Poly prod = one;
    Poly sum(3);
    for (std::size_t i = 0; i < 3; ++i) {
        prod = prod * (t_var(3, i) - one);
        sum += t_var(3, i);
    }
    CHECK(h.H(0, 3) == prod * (-f * f / (f + 1)));
    const FRational d = FRational(1) / ((f + 1) * (f + 1));
    const Poly expect = prod * (one * (f * f + 2 * f) + sum * (f * f)) * (-d);
    CHECK(cutjoin_lhs(0, 3, h) == expect);
}

TEST_CASE("individual terms vanish where the sums are empty")
{
    HAssembler h(table5());
    CHECK(cutjoin_T1(0, 4, h).is_zero());
    CHECK(cutjoin_T1(0, 6, h).is_zero());
    CHECK(cutjoin_T2_T3(0, 4, h).is_zero());
    CHECK(cutjoin_T2_T3(1, 2, h).is_zero());
    CHECK(cutjoin_T4(2, 1, h).is_zero());
    CHECK(cutjoin_T4(3, 1, h).is_zero());
}

TEST_CASE("genus two one-point split term is half the square")
{
    HAssembler h(table5());
    const Poly e = apply_euler(h.H(1, 1), 0);
    CHECK(cutjoin_T2_T3(2, 1, h) == e * e * FRational(Rational(-1, 2)));
}

TEST_CASE("divided-difference term is symmetric")
{
    HAssembler h(table5());
    const Poly t4 = cutjoin_T4(0, 4, h);
    CHECK_FALSE(t4.is_zero());
    Poly swapped(4);
    for (const auto &[e, c] : t4.terms()) {
        swapped.add_term({e[1], e[0], e[3], e[2]}, c);
    }
    CHECK(swapped == t4);
}

TEST_CASE("cut-join identity holds exactly")
{
    HAssembler h(table5());
    for (CellId c : {CellId{0, 4}, CellId{1, 2}, CellId{2, 1}, CellId{0, 5}, CellId{1, 3}, CellId{2, 2}, CellId{1, 4},
                     CellId{3, 1}, CellId{2, 3}}) {
        INFO(to_string(c));
        const CutJoinReport r = verify_cutjoin(c.g, c.n, h);
        CHECK(r.passed());
        CHECK_FALSE(r.lhs.is_zero());
        CHECK(r.rhs == r.t1 + r.t2_t3 + r.t4);
    }
}

TEST_CASE("cells needing unstable H are outside the verifiable set")
{
    HAssembler h(table5());
    CHECK_THROWS_AS(verify_cutjoin(0, 3, h), outside_verifiable_set);
    CHECK_THROWS_AS(verify_cutjoin(1, 1, h), outside_verifiable_set);
    CHECK_THROWS_AS(verify_cutjoin(0, 2, h), outside_verifiable_set);
    CHECK_FALSE(in_verifiable_set(0, 3));
    CHECK(in_verifiable_set(0, 4));
}

TEST_CASE("a perturbed bracket breaks the identity")
{
    BracketTable t = table5();
    auto entries = t.cell({1, 2});
    entries[{0, 2}] += FRational(1) / 24;
    t.publish({1, 2}, entries);
    HAssembler h(t);
    CHECK_FALSE(verify_cutjoin(1, 2, h).passed());
    CHECK_FALSE(verify_cutjoin(1, 3, h).passed());
    CHECK(verify_cutjoin(0, 4, h).passed());
}

TEST_CASE("psi oracle reference values")
{
    CHECK(psi_intersection(0, {0, 0, 0}) == 1);
    CHECK(psi_intersection(0, {0, 0, 0, 1}) == 1);
    CHECK(psi_intersection(0, {0, 0, 0, 1, 1}) == 2);
    CHECK(psi_intersection(0, {0, 0, 0, 0, 2}) == 1);
    CHECK(psi_intersection(1, {1}) == Rational(1, 24));
    CHECK(psi_intersection(2, {4}) == Rational(1, 1152));
    CHECK(psi_intersection(3, {7}) == Rational(1, 82944));
    CHECK(psi_intersection(2, {2, 3}) == Rational(29, 5760));
    CHECK(psi_intersection(1, {1, 1}) == Rational(1, 24));
    // dimension filter
    CHECK(psi_intersection(0, {0, 0, 1}) == 0);
    CHECK(psi_intersection(1, {2}) == 0);
    CHECK(psi_intersection(0, {0, 0}) == 0);
}
