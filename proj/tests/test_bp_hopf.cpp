#include "doctest.h"

#include <set>

#include "algnov/bp_hopf.hpp"

using namespace algnov;

namespace {

Mono mono(std::initializer_list<std::pair<Group, std::pair<unsigned, unsigned>>> parts)
{
    Mono m;
    for (auto [g, ne] : parts)
        m.g[g][ne.first - 1] = static_cast<std::uint8_t>(ne.second);
    return m;
}

}  // namespace

TEST_CASE("truncation window")
{
    auto w = TruncationWindow::make(2, 31, 5);
    CHECK(w.t_max == 32);
    CHECK(w.N == 4);  // 2(2^4-1) = 30 <= 32 < 62
    CHECK(TruncationWindow::make(3, 16, 2).N == 2);
    CHECK(TruncationWindow::make(2, 0, 1).N == 0);
    CHECK_THROWS_AS(TruncationWindow::make(1, 10, 3), InvalidArgument);
    CHECK_THROWS_AS(TruncationWindow::make(2, 10, 0), InvalidArgument);
}

TEST_CASE("log coefficients at p = 2")
{
    HopfStructureMaps maps(TruncationWindow::make(2, 16, 6));
    CHECK(maps.log_coefficient(0) == rat_constant(1));
    // Hand expansion: m1 = v1/2, m2 = v2/2 + v1^3/4.
    CHECK(maps.log_coefficient(1) == RatPoly{{mono({{kV, {1, 1}}}), mpq_class(1, 2)}});
    RatPoly m2{{mono({{kV, {2, 1}}}), mpq_class(1, 2)}, {mono({{kV, {1, 3}}}), mpq_class(1, 4)}};
    CHECK(maps.log_coefficient(2) == m2);
    // Denominators divide p^n.
    for (unsigned n = 0; n <= maps.window().N; ++n)
        for (const auto& [m, c] : maps.log_coefficient(n))
            CHECK(mpz_class((1u << n)) % c.get_den() == 0);
}

TEST_CASE("right unit at p = 2")
{
    HopfStructureMaps maps(TruncationWindow::make(2, 16, 6));
    RatPoly e1{{mono({{kV, {1, 1}}}), 1}, {mono({{kT, {1, 1}}}), 2}};
    CHECK(maps.right_unit_exact(1) == e1);
    // Hand expansion of 2η_R(m2) − η_R(m1)η_R(v1)^2.
    RatPoly e2{{mono({{kV, {2, 1}}}), 1},
               {mono({{kV, {1, 1}}, {kT, {1, 2}}}), -5},
               {mono({{kV, {1, 2}}, {kT, {1, 1}}}), -3},
               {mono({{kT, {2, 1}}}), 2},
               {mono({{kT, {1, 3}}}), -4}};
    CHECK(maps.right_unit_exact(2) == e2);
    CHECK_THROWS_AS(maps.right_unit_exact(0), InvalidArgument);
    CHECK_THROWS_AS(maps.right_unit_exact(4), InvalidArgument);

    // Integral table: η_R(1) = 1 and η_R(v1) mod 64.
    auto one = maps.right_unit(Exps{});
    REQUIRE(one.size() == 1);
    CHECK(one[0].coeff == 1);
    Exps v1{};
    v1[0] = 1;
    auto t = maps.right_unit(v1);
    REQUIRE(t.size() == 2);
}

TEST_CASE("coproduct at p = 2")
{
    HopfStructureMaps maps(TruncationWindow::make(2, 16, 6));
    RatPoly d1{{mono({{kT, {1, 1}}}), 1}, {mono({{kT2, {1, 1}}}), 1}};
    CHECK(maps.coproduct_exact(1) == d1);
    CHECK(maps.coproduct_exact(0) == rat_constant(1));

    // Mod I: Δ(t2) = t2⊗1 + t1⊗t1^2 + 1⊗t2.
    Exps t2{};
    t2[1] = 1;
    auto bar = maps.bar_coproduct(t2);
    std::set<std::pair<Exps, Exps>> got;
    for (const auto& b : bar) {
        CHECK(b.coeff == 1);
        got.insert({b.left, b.right});
    }
    Exps t1{}, t1sq{};
    t1[0] = 1;
    t1sq[0] = 2;
    std::set<std::pair<Exps, Exps>> want{{t2, Exps{}}, {t1, t1sq}, {Exps{}, t2}};
    CHECK(got == want);
}

TEST_CASE("associated graded coaction")
{
    HopfStructureMaps maps(TruncationWindow::make(2, 32, 8));
    auto q0 = maps.gr_coaction(0);
    REQUIRE(q0.size() == 1);
    CHECK(q0[0].q_index == 0);
    // ψ(q_n) = Σ q_i ⊗ t̄_{n-i}^{2^i}.
    for (unsigned n = 1; n <= maps.window().N; ++n) {
        auto psi = maps.gr_coaction(n);
        REQUIRE(psi.size() == n + 1);
        for (unsigned i = 0; i <= n; ++i) {
            CHECK(psi[i].coeff == 1);
            CHECK(psi[i].q_index == i);
            Exps want{};
            if (n > i)
                want[n - i - 1] = static_cast<std::uint8_t>(1u << i);
            CHECK(psi[i].t == want);
        }
    }
}

TEST_CASE("Hopf algebroid axioms through degree 32")
{
    for (unsigned p : {2u, 3u}) {
        HopfStructureMaps maps(TruncationWindow::make(p, p == 2 ? 32 : 36, 6));
        auto rep = check_axioms(maps);
        for (const auto& c : rep.checks) {
            INFO(c.name);
            CHECK(c.pass);
        }
        CHECK(rep.all_pass());
    }
}

TEST_CASE("monomial enumeration")
{
    HopfStructureMaps maps(TruncationWindow::make(2, 12, 3));
    CHECK(maps.monomials(0).size() == 1);
    CHECK(maps.monomials(4).size() == 1);   // v1^2
    CHECK(maps.monomials(6).size() == 2);   // v1^3, v2
    CHECK(maps.monomials(12).size() == 3);  // v1^6, v1^3 v2, v2^2
    CHECK(maps.monomials(13).empty());
}
