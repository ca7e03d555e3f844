#include <doctest.h>

#include <algorithm>
#include <random>

#include "normal_form.hpp"

using namespace pmc;

namespace {
const PrimeField F0(32003);
Ctx<PrimeField> ctx() { return Ctx<PrimeField>(F0); }

using SMat = SeriesMat<PrimeField>;

SMat smat(const std::vector<std::vector<std::string>>& rows, int p) {
    SMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), p, F0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.at(static_cast<int>(i), static_cast<int>(j)) = ring_from_poly(F0, parse_poly(rows[i][j]), 1, p);
    return m;
}

// ---- independent oracle: invariant factors via determinantal divisors ----

Series<PrimeField> minor_det(const SMat& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    if (rows.size() == 1) return A.at(rows[0], cols[0]);
    Series<PrimeField> acc = series_make(F0, A.p);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        std::vector<int> subrows(rows.begin() + 1, rows.end());
        std::vector<int> subcols;
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != k) subcols.push_back(cols[j]);
        auto sub = minor_det(A, subrows, subcols);
        auto term = ring_mul(F0, A.at(rows[0], cols[k]), sub);
        for (int c = 0; c < A.p; ++c)
            acc.c[c] = k % 2 == 0 ? F0.add(acc.c[c], term.c[c]) : F0.sub(acc.c[c], term.c[c]);
    }
    return acc;
}

void combos(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= n - (k - depth); ++i) {
            cur[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

// valuation multiset of the invariant factors, from minimal k x k minor valuations
std::vector<long> oracle_valuations(const SMat& A) {
    std::vector<long> dvals{0};
    int t = 1;
    for (; t <= std::min(A.rows, A.cols); ++t) {
        std::vector<std::vector<int>> rsel, csel;
        combos(A.rows, t, rsel);
        combos(A.cols, t, csel);
        long best = -1;
        for (const auto& r : rsel)
            for (const auto& c : csel) {
                int v = series_valuation(F0, minor_det(A, r, c));
                if (v >= 0 && (best < 0 || v < best)) best = v;
            }
        if (best < 0) break;
        dvals.push_back(best);
    }
    std::vector<long> vals;
    for (std::size_t k = 1; k < dvals.size(); ++k) vals.push_back(dvals[k] - dvals[k - 1]);
    std::sort(vals.begin(), vals.end());
    return vals;
}

std::vector<long> sorted(std::vector<long> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("dvr smith: worked examples") {
    auto s1 = dvr_smith(F0, smat({{"x"}}, 8));
    CHECK(s1.diag_valuations == std::vector<long>{1});
    CHECK(s1.zero_rows == 0);
    CHECK(s1.zero_cols == 0);

    auto s2 = dvr_smith(F0, smat({{"1"}}, 8));
    CHECK(s2.diag_valuations == std::vector<long>{0});

    // oracle for the 2x2 case: minors give D_1 = x, D_2 = 0
    auto A = smat({{"x", "x^2"}, {"x^2", "x^3"}}, 8);
    CHECK(oracle_valuations(A) == std::vector<long>{1});
    auto s3 = dvr_smith(F0, A);
    CHECK(s3.diag_valuations == std::vector<long>{1});
    CHECK(s3.zero_rows == 1);
    CHECK(s3.zero_cols == 1);
}

TEST_CASE("dvr smith: transforms multiply back to the reduced matrix") {
    auto A = smat({{"x + 2*x^2", "3", "x^3"}, {"x^2", "5*x", "1 + x"}}, 8);
    auto sm = dvr_smith(F0, A);
    auto prod = series_mat_mul(F0, series_mat_mul(F0, sm.left, A), sm.right);
    for (std::size_t i = 0; i < prod.a.size(); ++i)
        for (int c = 0; c < prod.p; ++c) CHECK(prod.a[i].c[c] == sm.reduced.a[i].c[c]);
    // off-diagonal entries vanish
    for (int i = 0; i < sm.reduced.rows; ++i)
        for (int j = 0; j < sm.reduced.cols; ++j)
            if (i != j) CHECK(ring_is_zero(F0, sm.reduced.at(i, j)));
}

TEST_CASE("dvr smith matches the minor oracle on random matrices") {
    std::mt19937_64 rng(41);
    const int p = 8;
    for (int trial = 0; trial < 25; ++trial) {
        SMat A(3, 3, p, F0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                long val = static_cast<long>(rng() % 3);
                if (rng() % 5 == 0) continue;  // occasional zero entry
                Series<PrimeField> s = series_make(F0, p);
                s.c[val] = F0.from_int(1 + static_cast<long long>(rng() % 31999));
                if (val + 1 < p) s.c[val + 1] = F0.from_int(static_cast<long long>(rng() % 32003));
                A.at(i, j) = s;
            }
        std::vector<long> viaSmith;
        bool ok = true;
        try {
            viaSmith = sorted(dvr_smith(F0, A).diag_valuations);
        } catch (const precision_error&) {
            ok = false;  // guard fired; skip this sample
        }
        if (!ok) continue;
        CHECK(viaSmith == oracle_valuations(A));
    }
}

TEST_CASE("dvr smith valuations are invariant under invertible transforms") {
    std::mt19937_64 rng(99);
    const int p = 8;
    auto random_invertible = [&](int d) {
        SMat M(d, d, p, F0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Series<PrimeField> s = series_make(F0, p);
                if (i == j)
                    s.c[0] = F0.from_int(1 + static_cast<long long>(rng() % 31999));
                else if (rng() % 2)
                    s.c[1 + rng() % 2] = F0.from_int(static_cast<long long>(rng() % 32003));
                M.at(i, j) = s;
            }
        return M;
    };
    auto A = smat({{"x", "x^2", "0"}, {"1 + x", "x^3", "x"}, {"0", "x^2", "x^2"}}, p);
    auto base = sorted(dvr_smith(F0, A).diag_valuations);
    for (int t = 0; t < 10; ++t) {
        auto L = random_invertible(3);
        auto R = random_invertible(3);
        auto B = series_mat_mul(F0, series_mat_mul(F0, L, A), R);
        CHECK(sorted(dvr_smith(F0, B).diag_valuations) == base);
    }
}

TEST_CASE("dvr smith precision guard") {
    // valuation 7 with budget eaten by an earlier pivot of valuation 2
    auto A = smat({{"x^2", "0"}, {"0", "x^7"}}, 8);
    CHECK_THROWS_AS(dvr_smith(F0, A), precision_error);
}

TEST_CASE("classify_extension worked examples") {
    auto c = ctx();
    // class x^m: middle term is I_m
    for (long m : {1L, 2L, 3L}) {
        auto nf = classify_extension(F0, smat({{"x^" + std::to_string(m)}}, 8));
        CHECK(nf == TorsionFreeNF{{m}, 0, 0});
        // engine realization agrees
        PolyMat A(1, 1);
        A.at(0, 0) = Poly::monomial(1, static_cast<int>(m), 0);
        auto nf2 = classify_torsion_free(c, extension_expr(2, 1, 1, A), 6);
        CHECK(nf2 == nf);
    }
    // unit class: one O_2, checked against the quasi-free detector
    auto nfu = classify_extension(F0, smat({{"1 + x"}}, 8));
    CHECK(nfu == TorsionFreeNF{{}, 1, 0});
    PolyMat U(1, 1);
    U.at(0, 0) = parse_poly("1 + x");
    auto t = quasi_free_type(c, extension_expr(2, 1, 1, U), 5);
    REQUIRE(t.has_value());
    CHECK(*t == std::vector<long>{0, 1});
    // zero class: split, two O_C
    auto nf0 = classify_extension(F0, smat({{"0"}}, 8));
    CHECK(nf0 == TorsionFreeNF{{}, 0, 2});
}

TEST_CASE("classify_kernel worked examples") {
    auto c = ctx();
    // O_2 -> T_k by reduction: kernel I_k
    for (long k : {1L, 2L, 3L}) {
        PolyMat pi(1, 1);
        pi.at(0, 0) = Poly::constant(1);
        auto nf = classify_kernel(c, {0, 1}, {k}, pi, 5);
        CHECK(nf == TorsionFreeNF{{k}, 0, 0});
    }
    // N = O_2 + O_C, T = 0
    {
        PolyMat pi(0, 2);
        auto nf = classify_kernel(c, {1, 1}, {}, pi, 5);
        CHECK(nf == TorsionFreeNF{{}, 1, 1});
    }
    // N = 2 O_2, T = T_1 + T_1, generic projection
    {
        PolyMat pi(2, 2);
        pi.at(0, 0) = Poly::constant(1);
        pi.at(0, 1) = Poly::constant(2);
        pi.at(1, 0) = Poly::constant(1);
        pi.at(1, 1) = Poly::constant(3);
        auto nf = classify_kernel(c, {0, 2}, {1, 1}, pi, 5);
        CHECK(nf == TorsionFreeNF{{1, 1}, 0, 0});
    }
    // non-surjective map is refused
    {
        PolyMat pi(1, 1);
        pi.at(0, 0) = Poly::monomial(1, 1, 0);  // x is not onto T_1
        CHECK_THROWS_AS(classify_kernel(c, {0, 1}, {1}, pi, 5), precondition_error);
    }
}

TEST_CASE("nf invariants and realization") {
    auto c = ctx();
    // {I_3}: R = 2, index = 3, cross-checked against the engine
    TorsionFreeNF nf{{3}, 0, 0};
    auto inv = nf_invariants(nf);
    CHECK(inv.rank == 2);
    CHECK(inv.index == 3);
    auto rep = first_filtration(c, make_ideal_point(2, 3), 5);
    CHECK(report_rank(rep) == inv.rank);
    CHECK(report_torsion_total(rep) == inv.index);

    CHECK(nf_invariants(TorsionFreeNF{{}, 1, 0}).rank == 2);
    CHECK(nf_invariants(TorsionFreeNF{{}, 1, 0}).index == 0);
    auto i2 = nf_invariants(TorsionFreeNF{{1}, 0, 2});
    CHECK(i2.rank == 4);
    CHECK(i2.index == 1);

    // dim({1}, 1, 1) at p = 4 is 7 + 8 + 4 = 19
    CHECK(c.realize(nf_realize_expr(TorsionFreeNF{{1}, 1, 1}), 4)->dim() == 19);
    CHECK_THROWS_AS(c.realize(nf_realize_expr(TorsionFreeNF{{5}, 0, 0}), 4), precision_error);
}

TEST_CASE("round trip: classify(realize(nf)) = nf") {
    auto c = ctx();
    std::vector<TorsionFreeNF> cases{
        {{2}, 0, 0}, {{3, 1}, 1, 0}, {{1, 1}, 0, 2}, {{}, 2, 1}, {{2, 2, 1}, 0, 1},
    };
    for (const auto& nf : cases) {
        auto back = classify_torsion_free(c, nf_realize_expr(nf), 5);
        CHECK(back == nf);
    }
}

TEST_CASE("reflexivity") {
    auto c = ctx();
    CHECK(reflexivity_check(c, make_algebra(2), 3));          // free
    CHECK(reflexivity_check(c, make_structure(2, 1), 3));     // O_C
    CHECK(reflexivity_check(c, make_ideal_point(2, 2), 3));   // I_2
    CHECK(reflexivity_check(c, nf_realize_expr(TorsionFreeNF{{1}, 1, 1}), 3));
    CHECK(!reflexivity_check(c, make_torsion(2, 1), 3));      // torsion fails
    CHECK(!reflexivity_check(c, make_torsion(2, 2), 3));
    CHECK(!reflexivity_check(c, make_sum(make_ideal_point(2, 1), make_torsion(2, 1)), 3));
}

TEST_CASE("local normal forms are self-dual") {
    auto c = ctx();
    std::vector<TorsionFreeNF> cases{{{2}, 0, 0}, {{1}, 1, 0}, {{}, 1, 1}, {{2, 1}, 0, 1}};
    for (const auto& nf : cases) {
        auto dual_nf = classify_torsion_free(c, make_dual(nf_realize_expr(nf)), 4);
        CHECK(dual_nf == nf);
    }
}
