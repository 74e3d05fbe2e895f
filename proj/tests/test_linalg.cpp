#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "algnov/linalg.hpp"

using namespace algnov;

namespace {

ModPkMatrix random_matrix(const Zpk& R, std::size_t rows, std::size_t cols, std::mt19937& rng, double density = 1.0)
{
    std::uniform_int_distribution<std::int64_t> coeff(0, static_cast<std::int64_t>(R.modulus()) - 1);
    std::uniform_real_distribution<double> u(0, 1);
    ModPkMatrix m(R, rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (u(rng) < density)
                m.set(r, c, coeff(rng));
    return m;
}

ModPkMatrix random_invertible(const Zpk& R, std::size_t n, std::mt19937& rng)
{
    // Unipotent lower times unipotent upper, with unit diagonal scaling.
    std::uniform_int_distribution<std::int64_t> coeff(0, static_cast<std::int64_t>(R.modulus()) - 1);
    ModPkMatrix L = ModPkMatrix::identity(R, n), U = ModPkMatrix::identity(R, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i > j)
                L.set(i, j, coeff(rng));
            if (i < j)
                U.set(i, j, coeff(rng));
            if (i == j)
                U.set(i, i, coeff(rng) * static_cast<std::int64_t>(R.prime()) + 1);
        }
    return L * U;
}

using Vec = std::vector<Residue>;

Vec times(const Zpk& R, const Vec& x, const ModPkMatrix& m)
{
    Vec out(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out[c] = R.add(out[c], R.mul(x[r], m.at(r, c)));
    return out;
}

// Every vector x of length n over Z/p^K, in lexicographic order.
std::vector<Vec> all_vectors(const Zpk& R, std::size_t n)
{
    std::vector<Vec> out{Vec(n, 0)};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Vec> next;
        for (const auto& v : out)
            for (Residue a = 0; a < R.modulus(); ++a) {
                Vec w = v;
                w[k] = a;
                next.push_back(w);
            }
        out = std::move(next);
    }
    return out;
}

std::set<Vec> brute_span(const Zpk& R, const ModPkMatrix& m)
{
    std::set<Vec> out;
    for (const auto& x : all_vectors(R, m.rows()))
        out.insert(times(R, x, m));
    return out;
}

SparseMatrix to_sparse(const ModPkMatrix& m)
{
    SparseMatrix s;
    s.cols = static_cast<std::uint32_t>(m.cols());
    s.rows.resize(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.at(r, c))
                s.rows[r].push(static_cast<std::uint32_t>(c), m.at(r, c));
    return s;
}

}  // namespace

TEST_CASE("Zpk arithmetic")
{
    Zpk R(2, 3);
    CHECK(R.modulus() == 8);
    CHECK(R.valuation(0) == 3);
    CHECK(R.valuation(4) == 2);
    CHECK(R.mul(R.inverse(3), 3) == 1);
    CHECK(R.mul(R.divide(4, 6), 6) == 4);
    CHECK(R.pow_p(3) == 0);
    CHECK_THROWS_AS(Zpk(1, 2), InvalidArgument);
    CHECK_THROWS_AS(Zpk(4, 2), InvalidArgument);
    CHECK_THROWS_AS(R.inverse(2), InvalidArgument);
    Zpk R3(3, 2);
    for (Residue a = 1; a < 9; ++a)
        if (a % 3)
            CHECK(R3.mul(a, R3.inverse(a)) == 1);
}

TEST_CASE("normal form: worked examples")
{
    Zpk R(2, 3);
    auto id = ModPkMatrix::identity(R, 2);
    CHECK(normal_form(id).form == id);

    auto two = ModPkMatrix::from_rows(R, 1, {{2}});
    SubmoduleBasis sb(normal_form(two).form);
    CHECK(sb.contains(Vec{4}));
    CHECK(sb.contains(Vec{6}));
    CHECK_FALSE(sb.contains(Vec{1}));
    CHECK(sb.length() == 2);
}

TEST_CASE("normal form is span-canonical against brute force")
{
    std::mt19937 rng(12345);
    for (unsigned K : {1u, 2u}) {
        Zpk R(2, K);
        for (int trial = 0; trial < 60; ++trial) {
            std::size_t rows = 1 + trial % 3, cols = 1 + (trial / 3) % 4;
            auto a = random_matrix(R, rows, cols, rng);
            auto b = random_matrix(R, rows, cols, rng, 0.5);
            auto sa = brute_span(R, a), sb = brute_span(R, b);
            auto na = normal_form(a).form, nb = normal_form(b).form;
            CHECK((sa == sb) == (na == nb));
            // Permuted copy with an extra redundant row spans the same module.
            ModPkMatrix c(R, 0, cols);
            for (std::size_t r = rows; r-- > 0;)
                c.append_row(a.row(r));
            Vec extra(cols, 0);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < cols; ++j)
                    extra[j] = R.add(extra[j], R.mul(static_cast<Residue>(r + 1), a.at(r, j)));
            c.append_row(extra);
            CHECK(normal_form(c).form == na);
            CHECK(normal_form(na).form == na);
            CHECK(SubmoduleBasis(na).length() == static_cast<unsigned>(std::lround(std::log2(sa.size()))));
            for (const auto& v : all_vectors(R, cols))
                CHECK(SubmoduleBasis(na).contains(v) == (sa.count(v) == 1));
            // form = transform · a
            auto nf = normal_form(a);
            CHECK(nf.transform * a == nf.form);
        }
    }
}

TEST_CASE("normal form: 20x20 over F2 permutation invariance")
{
    std::mt19937 rng(7);
    Zpk F(2, 1);
    auto m = random_matrix(F, 20, 20, rng, 0.3);
    std::vector<std::size_t> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ModPkMatrix pm(F, 0, 20);
    for (auto r : perm)
        pm.append_row(m.row(r));
    CHECK(normal_form(pm).form == normal_form(m).form);
}

TEST_CASE("kernel basis")
{
    Zpk F(2, 1);
    CHECK(kernel_basis(ModPkMatrix::identity(F, 3)).size() == 0);

    Zpk R(2, 3);
    auto k = kernel_basis(ModPkMatrix::from_rows(R, 1, {{2}}));
    REQUIRE(k.size() == 1);
    CHECK(k.generators().at(0, 0) == 4);

    std::mt19937 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_matrix(F, 9, 6, rng, 0.4);
        auto kb = kernel_basis(m);
        std::size_t count = 0;
        for (const auto& x : all_vectors(F, 9)) {
            auto y = times(F, x, m);
            bool zero = std::all_of(y.begin(), y.end(), [](Residue e) { return e == 0; });
            count += zero;
            CHECK(kb.contains(x) == zero);
        }
        CHECK(count == (std::size_t(1) << kb.size()));
        CHECK(kb.size() == 9 - normal_form(m).form.rows());
        if (kb.size() > 0)
            CHECK((kb.generators() * m).is_zero());
        // rank + kernel dimension = rows
        F2Matrix bits(9, 6);
        for (std::size_t r = 0; r < 9; ++r)
            for (std::size_t c = 0; c < 6; ++c)
                bits.set(r, c, m.at(r, c));
        CHECK(bits.rank() + kb.size() == 9);
    }

    Zpk R4(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_matrix(R4, 3, 3, rng);
        auto kb = kernel_basis(m);
        std::size_t count = 0;
        for (const auto& x : all_vectors(R4, 3)) {
            auto y = times(R4, x, m);
            bool zero = std::all_of(y.begin(), y.end(), [](Residue e) { return e == 0; });
            count += zero;
            CHECK(kb.contains(x) == zero);
        }
        CHECK(count == (std::size_t(1) << kb.length()));
    }
}

TEST_CASE("solve")
{
    Zpk R(2, 3);
    auto id = ModPkMatrix::identity(R, 3);
    Vec b{5, 0, 7};
    CHECK(*solve(id, b) == b);

    auto two = ModPkMatrix::from_rows(R, 1, {{2}});
    auto x = solve(two, Vec{4});
    REQUIRE(x);
    CHECK(R.mul((*x)[0], 2) == 4);
    CHECK_FALSE(solve(two, Vec{1}));
    CHECK_THROWS_AS(solve(two, Vec{1, 2}), InvalidArgument);

    std::mt19937 rng(5);
    Zpk R4(2, 2);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = random_matrix(R4, 3, 2, rng);
        auto span = brute_span(R4, m);
        for (const auto& v : all_vectors(R4, 2)) {
            auto s = solve(m, v);
            CHECK(s.has_value() == (span.count(v) == 1));
            if (s) {
                CHECK(times(R4, *s, m) == v);
                CHECK(*solve(m, v) == *s);
            }
        }
    }
}

TEST_CASE("homology: worked examples")
{
    Zpk R(2, 3);
    CHECK(homology(ModPkMatrix::from_rows(R, 1, {{2}}), ModPkMatrix(R, 1, 0)) == std::vector<unsigned>{1});
    CHECK(homology(ModPkMatrix(R, 0, 3), ModPkMatrix(R, 3, 0)) == std::vector<unsigned>{3, 3, 3});
    auto d = ModPkMatrix::from_rows(R, 1, {{1}});
    CHECK_THROWS_AS(homology(d, d), ConsistencyError);
}

TEST_CASE("homology over Z/4 against exhaustive quotient enumeration")
{
    std::mt19937 rng(2024);
    Zpk R(2, 2);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t a = 1 + trial % 3, b = 1 + (trial / 3) % 3, c = 1 + (trial / 9) % 3;
        auto d_out = random_matrix(R, b, c, rng, 0.6);
        auto kb = kernel_basis(d_out).generators();
        ModPkMatrix d_in(R, a, b);
        if (kb.rows() > 0)
            d_in = random_matrix(R, a, kb.rows(), rng) * kb;

        std::set<Vec> bnd = brute_span(R, d_in);
        std::size_t cycles = 0, two_torsion = 0;
        for (const auto& x : all_vectors(R, b)) {
            auto y = times(R, x, d_out);
            if (!std::all_of(y.begin(), y.end(), [](Residue e) { return e == 0; }))
                continue;
            ++cycles;
            Vec twice = x;
            for (auto& e : twice)
                e = R.mul(e, 2);
            two_torsion += bnd.count(twice);
        }
        auto ex = homology(d_in, d_out);
        unsigned log_order = 0;
        for (auto e : ex)
            log_order += e;
        CHECK((std::size_t(1) << log_order) * bnd.size() == cycles);
        CHECK((std::size_t(1) << ex.size()) * bnd.size() == two_torsion);

        // Invariance under change of basis in all three modules.
        auto P = random_invertible(R, a, rng), Q = random_invertible(R, b, rng), S = random_invertible(R, c, rng);
        // d_in' = P d_in Q, d_out' = Q^{-1} d_out S
        ModPkMatrix Qinv(R, b, b);
        for (std::size_t r = 0; r < b; ++r) {
            Vec e(b, 0);
            e[r] = 1;
            auto row = solve(Q, e);
            REQUIRE(row);
            for (std::size_t k = 0; k < b; ++k)
                Qinv.set(r, k, (*row)[k]);
        }
        CHECK(homology(P * d_in * Q, Qinv * d_out * S) == ex);
    }
}

TEST_CASE("smith exponents")
{
    Zpk R(2, 4);
    auto m = ModPkMatrix::from_rows(R, 2, {{2, 4}, {4, 0}});
    // det = -16 ≡ 0 mod 16 with elementary divisors 2 and 8.
    CHECK(smith_exponents(m) == std::vector<unsigned>{1, 3});
}

TEST_CASE("matrix text round trip")
{
    std::mt19937 rng(3);
    Zpk R(3, 2);
    auto m = random_matrix(R, 4, 5, rng);
    std::stringstream ss;
    write_matrix(ss, m);
    CHECK(ss.str().rfind("3 2 4 5\n", 0) == 0);
    CHECK(read_matrix(ss) == m);
    std::stringstream bad("2 1 2 2\n1 0\n");
    CHECK_THROWS_AS(read_matrix(bad), InvalidArgument);
}

TEST_CASE("sparse span length matches dense Howell length")
{
    std::mt19937 rng(11);
    for (unsigned K : {1u, 3u}) {
        Zpk R(2, K);
        std::uniform_int_distribution<unsigned> sh(0, K);
        for (int trial = 0; trial < 40; ++trial) {
            auto m = random_matrix(R, 6, 7, rng, 0.4);
            std::vector<unsigned> rs(6), cs(7);
            for (auto& x : rs)
                x = sh(rng);
            for (auto& x : cs)
                x = sh(rng);
            ModPkMatrix scaled(R, 6, 7);
            for (std::size_t r = 0; r < 6; ++r)
                for (std::size_t c = 0; c < 7; ++c)
                    scaled.set(r, c, R.mul(m.at(r, c), R.mul(R.pow_p(rs[r]), R.pow_p(cs[c]))));
            CHECK(span_length(R, to_sparse(m), rs, cs) == SubmoduleBasis(normal_form(scaled).form).length());
            CHECK(span_length(R, to_sparse(m)) == SubmoduleBasis(normal_form(m).form).length());
        }
    }
}

TEST_CASE("sparse elimination")
{
    std::mt19937 rng(17);
    Zpk F(2, 1);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = random_matrix(F, 15, 12, rng, 0.25);
        F2Matrix bits(15, 12);
        for (std::size_t r = 0; r < 15; ++r)
            for (std::size_t c = 0; c < 12; ++c)
                bits.set(r, c, m.at(r, c));
        CHECK(sparse_rank(F, to_sparse(m)) == bits.rank());
        CHECK(bits.rank() == normal_form(m).form.rows());
    }

    // Unit-only pivoting over Z/8: surviving rows are reduced in pivot columns,
    // and lengths add up.
    Zpk R(2, 3);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = random_matrix(R, 8, 8, rng, 0.3);
        auto el = eliminate(R, to_sparse(m), [&](std::uint32_t, std::uint32_t, Residue v) { return R.is_unit(v); });
        std::set<std::uint32_t> pcols;
        for (auto [r, c] : el.pivots) {
            CHECK_FALSE(el.row_alive[r]);
            pcols.insert(c);
        }
        for (std::size_t r = 0; r < 8; ++r)
            if (el.row_alive[r])
                for (auto c : el.reduced.rows[r].idx)
                    CHECK(pcols.count(c) == 0);
        SparseMatrix rest;
        rest.cols = 8;
        for (std::size_t r = 0; r < 8; ++r)
            if (el.row_alive[r])
                rest.rows.push_back(el.reduced.rows[r]);
        CHECK(span_length(R, rest) + 3 * el.pivots.size() == span_length(R, to_sparse(m)));
    }
    CHECK_THROWS_AS(sparse_rank(R, SparseMatrix{}), InvalidArgument);
}

TEST_CASE("F2Matrix rref")
{
    F2Matrix m(3, 70);
    m.set(0, 65, true);
    m.set(1, 65, true);
    m.set(1, 2, true);
    m.set(2, 69, true);
    auto piv = m.rref();
    CHECK(piv == std::vector<std::size_t>{2, 65, 69});
    CHECK(m.get(0, 2));
    CHECK_FALSE(m.get(0, 65));
    m.append_zero_row();
    CHECK(m.row_is_zero(3));
    CHECK(m.rank() == 3);
}
