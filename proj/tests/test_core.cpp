#include <doctest.h>

#include "filtration.hpp"
#include "module.hpp"

using namespace pmc;

namespace {
const PrimeField F0(32003);

Ctx<PrimeField> ctx() { return Ctx<PrimeField>(F0); }
}  // namespace

TEST_CASE("algebra realization: monomial counts and nilpotency orders") {
    auto c = ctx();
    auto a23 = c.realize(make_algebra(2), 3);
    CHECK(a23->dim() == 6);  // basis 1, x, x^2, z, xz, x^2z
    auto a15 = c.realize(make_algebra(1), 5);
    CHECK(a15->dim() == 5);
    CHECK(mat_is_zero(F0, a15->Z));
    CHECK(!mat_is_zero(F0, mat_pow(F0, a15->X, 4)));  // x nilpotent of exact order p
    CHECK(mat_is_zero(F0, mat_pow(F0, a15->X, 5)));
    auto a32 = c.realize(make_algebra(3), 2);
    CHECK(a32->dim() == 6);
}

TEST_CASE("algebra rejects bad parameters") {
    CHECK_THROWS_AS(make_algebra(0), precondition_error);
    CHECK_THROWS_AS(PrimeField(32001), precondition_error);  // 3 * 10667
    auto c = ctx();
    CHECK_THROWS_AS(c.realize(make_algebra(2), 0), precondition_error);
}

TEST_CASE("presentations: free module, torsion quotient, ideal relations") {
    auto c = ctx();
    CHECK(c.realize(make_pres(2, 1, PolyMat(1, 0)), 4)->dim() == 8);

    // T_k = A/(x^k, z) has dimension k
    for (long k : {1L, 2L, 3L}) CHECK(c.realize(make_torsion(2, k), 5)->dim() == k);

    // relations z u - x v and z v present the ideal (x, z) up to a length-1
    // boundary echo: honest cokernel dim is g n p - rank = 8 at (2, 4)
    PolyMat rels(2, 2);
    rels.at(0, 0) = parse_poly("z");
    rels.at(1, 0) = parse_poly("-x");
    rels.at(1, 1) = parse_poly("z");
    auto pres = make_pres(2, 2, rels);
    CHECK(c.realize(pres, 4)->dim() == 8);
    // the embedded ideal itself has the enumerated monomial basis x, x^2, x^3,
    // z, xz, x^2 z, x^3 z
    CHECK(c.realize(make_ideal_point(2, 1), 4)->dim() == 7);
    // the two realizations carry the same stabilized graded invariants
    auto rp = first_filtration(c, pres, 4);
    auto ri = first_filtration(c, make_ideal_point(2, 1), 4);
    CHECK(rp.graded == ri.graded);
}

TEST_CASE("standard modules") {
    auto c = ctx();
    auto o1 = c.realize(make_structure(2, 1), 4);
    CHECK(o1->dim() == 4);
    CHECK(mat_is_zero(F0, o1->Z));

    // I_2 restricted to C: rank-1 free plus torsion of length 2
    auto rep = first_filtration(c, make_ideal_point(2, 2), 6);
    CHECK(rep.graded[0].rank == 1);
    CHECK(rep.graded[0].torsion == std::vector<long>{2});
    CHECK(rep.graded[1].rank == 1);
    CHECK(rep.graded[1].torsion.empty());

    // subscheme colengths: d = p' + 2q and d = p' + 2q + 2m, precision-stable
    for (int p : {6, 12}) {
        auto amb = c.realize(make_algebra(2), p);
        auto ia = c.realize(make_subscheme_a(2, 1, 1), p);
        CHECK(amb->dim() - ia->dim() == 3);
        auto ib = c.realize(make_subscheme_b(2, 1, 1, 1, 1), p);
        CHECK(amb->dim() - ib->dim() == 5);
    }

    CHECK_THROWS_AS(make_ideal_point(3, 1), precondition_error);
    CHECK_THROWS_AS(ctx().realize(make_torsion(2, 7), 5), precision_error);
}

TEST_CASE("direct sums") {
    auto c = ctx();
    auto s = make_sum(make_algebra(2), make_structure(2, 1));  // O_2 + O_1 at n = 2
    CHECK(c.realize(s, 3)->dim() == 9);

    auto m = make_ideal_point(2, 2);
    auto msum = make_sum(m, make_zero(2));
    CHECK(c.realize(m, 5)->dim() == c.realize(msum, 5)->dim());
    CHECK(first_filtration(c, m, 5).graded == first_filtration(c, msum, 5).graded);

    // T_1 + T_2 has torsion partition {2, 1} at level 1
    auto t = make_sum(make_torsion(2, 1), make_torsion(2, 2));
    auto rep = first_filtration(c, t, 5);
    CHECK(rep.graded[0].rank == 0);
    CHECK(rep.graded[0].torsion == std::vector<long>{2, 1});
    // brute-force oracle: partition of the nilpotent x-action on the realized sum
    auto inst = c.realize(t, 5);
    CHECK(nilpotent_partition(F0, inst->X) == std::vector<long>{2, 1});
}

TEST_CASE("module axioms hold after constructors") {
    auto c = ctx();
    for (const auto& e : {make_algebra(3), make_ideal_point(2, 2), make_j_ideal(3),
                          make_sum(make_structure(3, 2), make_torsion(3, 2))}) {
        auto inst = c.realize(e, 5);
        CHECK(mat_equal(F0, mat_mul(F0, inst->X, inst->Z), mat_mul(F0, inst->Z, inst->X)));
        CHECK(mat_is_zero(F0, mat_pow(F0, inst->Z, inst->n)));
        CHECK(mat_is_zero(F0, mat_pow(F0, inst->X, inst->p)));
    }
}

TEST_CASE("stabilization law: dim(2p) - dim(p) = p * rank for standards") {
    auto c = ctx();
    struct Case { ExprPtr e; long rank; };
    std::vector<Case> cases{
        {make_algebra(2), 2},          {make_structure(3, 2), 2}, {make_ideal_point(2, 3), 2},
        {make_j_ideal(4), 4},          {make_torsion(2, 2), 0},   {make_subscheme_a(2, 1, 2), 2},
        {make_subscheme_b(2, 0, 1, 1, 5), 2},
    };
    int p = 6;
    for (const auto& cse : cases) {
        auto lo = c.realize(cse.e, p);
        auto hi = c.realize(cse.e, 2 * p);
        CHECK(hi->dim() - lo->dim() == p * cse.rank);
        CHECK(generalized_rank(c, cse.e, p) == cse.rank);
    }
}

TEST_CASE("kernel, image, cokernel of generator-level maps") {
    auto c = ctx();
    int p = 5;
    // reduction O_2 -> T_k: kernel is I_k (same dim, same chain)
    for (long k : {1L, 2L}) {
        PolyMat one(1, 1);
        one.at(0, 0) = Poly::constant(1);
        auto ker = make_kernel(one, make_algebra(2), make_torsion(2, k));
        auto ik = make_ideal_point(2, k);
        CHECK(c.realize(ker, p)->dim() == c.realize(ik, p)->dim());
        auto rk = first_filtration(c, ker, p);
        auto ri = first_filtration(c, ik, p);
        CHECK(rk.chain == ri.chain);
        CHECK(rk.graded == ri.graded);
    }
    // exactness bookkeeping: dim ker + dim im = dim src; dim coker = dim dst - dim im
    PolyMat mp(1, 2);
    mp.at(0, 0) = parse_poly("x^2");
    mp.at(0, 1) = parse_poly("z");
    auto src = make_sum(make_algebra(2), make_algebra(2));
    auto dst = make_algebra(2);
    auto ker = c.realize(make_kernel(mp, src, dst), p);
    auto img = c.realize(make_image(mp, src, dst), p);
    auto cok = c.realize(make_cokernel(mp, src, dst), p);
    CHECK(ker->dim() + img->dim() == c.realize(src, p)->dim());
    CHECK(cok->dim() == c.realize(dst, p)->dim() - img->dim());
    // the image of (x^2, z) is the embedded ideal I_2
    CHECK(img->dim() == c.realize(make_ideal_point(2, 2), p)->dim());

    // an ill-defined map is rejected: A/(z) -> A sending 1 to 1
    PolyMat bad(1, 1);
    bad.at(0, 0) = Poly::constant(1);
    CHECK_THROWS_AS(c.realize(make_kernel(bad, make_structure(2, 1), make_algebra(2)), p),
                    precondition_error);
}

TEST_CASE("field-matrix kernels: trivial cases and equivariance check") {
    auto c = ctx();
    int p = 4;
    auto m = c.realize(make_sum(make_algebra(2), make_structure(2, 1)), p);
    Mat<PrimeField> zero(static_cast<int>(m->dim()), static_cast<int>(m->dim()), F0);
    auto kz = field_map_kernel(F0, *m, *m, zero);
    CHECK(kz.dim() == m->dim());
    auto id = Mat<PrimeField>::identity(static_cast<int>(m->dim()), F0);
    CHECK(field_map_kernel(F0, *m, *m, id).dim() == 0);
    CHECK(field_map_image(F0, *m, *m, id).dim() == m->dim());
    CHECK(field_map_cokernel(F0, *m, *m, id).dim() == 0);
    // a non-equivariant map is refused
    Mat<PrimeField> bad(static_cast<int>(m->dim()), static_cast<int>(m->dim()), F0);
    bad.at(0, static_cast<int>(m->dim()) - 1) = F0.one();
    bool threw = false;
    try {
        field_map_kernel(F0, *m, *m, bad);
    } catch (const precondition_error&) {
        threw = true;
    }
    CHECK(threw);
}

TEST_CASE("rationals behind the same interface") {
    RationalField fq;
    Ctx<RationalField> c(fq);
    CHECK(c.realize(make_algebra(2), 3)->dim() == 6);
    CHECK(generalized_rank(c, make_ideal_point(2, 2), 5) == 2);
    auto rep = first_filtration(c, make_ideal_point(2, 2), 5);
    CHECK(rep.graded[0].torsion == std::vector<long>{2});
}
