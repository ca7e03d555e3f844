#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "filtration.hpp"
#include "module.hpp"

namespace pmc {

/// Normal form of a torsion-free module on the double curve:
/// (+) I_{n_i} (+) m_free * O_2 (+) q_line * O_C.
struct TorsionFreeNF {
    std::vector<long> ideals;  // weakly decreasing, all >= 1
    long m_free = 0;
    long q_line = 0;

    bool operator==(const TorsionFreeNF& o) const {
        return ideals == o.ideals && m_free == o.m_free && q_line == o.q_line;
    }
    long rank() const { return 2 * static_cast<long>(ideals.size()) + 2 * m_free + q_line; }
    long index() const {
        long s = 0;
        for (long v : ideals) s += v;
        return s;
    }
};

/// Matrix over the truncated series ring k[x]/(x^p).
template <class F>
struct SeriesMat {
    int rows = 0, cols = 0, p = 1;
    std::vector<Series<F>> a;

    SeriesMat() = default;
    SeriesMat(int r, int c, int p_, const F& f)
        : rows(r), cols(c), p(p_), a(static_cast<std::size_t>(r) * c, series_make(f, p_)) {}
    Series<F>& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Series<F>& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

template <class F>
struct SmithResult {
    std::vector<long> diag_valuations;  // valuations of the nonzero diagonal entries, ascending
    int zero_rows = 0;
    int zero_cols = 0;
    SeriesMat<F> left, right, reduced;  // left * A * right = reduced
};

template <class F>
SeriesMat<F> series_mat_mul(const F& f, const SeriesMat<F>& A, const SeriesMat<F>& B) {
    SeriesMat<F> C(A.rows, B.cols, A.p, f);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            if (ring_is_zero(f, A.at(i, k))) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = ring_add(f, C.at(i, j), ring_mul(f, A.at(i, k), B.at(k, j)));
        }
    return C;
}

/// Shift a series down by m (exact division by x^m; requires valuation >= m).
template <class F>
Series<F> series_shift_down(const F& f, const Series<F>& s, long m) {
    Series<F> r = series_make(f, s.p);
    for (int a = 0; a + m < s.p; ++a) r.c[a] = s.c[a + m];
    return r;
}

/// Diagonalization over the DVR model: pivot on the minimal valuation
/// (row-major tie break), clear its row and column, recurse.
template <class F>
SmithResult<F> dvr_smith(const F& f, SeriesMat<F> A) {
    const int p = A.p, r = A.rows, s = A.cols;
    SmithResult<F> out;
    out.left = SeriesMat<F>(r, r, p, f);
    out.right = SeriesMat<F>(s, s, p, f);
    for (int i = 0; i < r; ++i) out.left.at(i, i).c[0] = f.one();
    for (int j = 0; j < s; ++j) out.right.at(j, j).c[0] = f.one();
    long consumed = 0;
    int t = 0;
    const int steps = std::min(r, s);
    for (; t < steps; ++t) {
        // precision guard: every finite valuation in the submatrix must stay
        // below the remaining budget so unit inverses are exact
        long best = -1;
        int pi = -1, pj = -1;
        for (int i = t; i < r; ++i)
            for (int j = t; j < s; ++j) {
                int v = series_valuation(f, A.at(i, j));
                if (v < 0) continue;
                if (v >= p - consumed)
                    throw precision_error("entry valuation exceeds remaining series precision");
                if (best < 0 || v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best < 0) break;  // submatrix is zero
        if (pi != t)
            for (int j = 0; j < s; ++j) std::swap(A.at(t, j), A.at(pi, j));
        if (pi != t)
            for (int j = 0; j < r; ++j) std::swap(out.left.at(t, j), out.left.at(pi, j));
        if (pj != t)
            for (int i = 0; i < r; ++i) std::swap(A.at(i, t), A.at(i, pj));
        if (pj != t)
            for (int i = 0; i < s; ++i) std::swap(out.right.at(i, t), out.right.at(i, pj));
        auto unit = series_shift_down(f, A.at(t, t), best);
        auto unit_inv = series_inverse(f, unit);
        for (int i = t + 1; i < r; ++i) {
            if (ring_is_zero(f, A.at(i, t))) continue;
            auto factor = ring_mul(f, series_shift_down(f, A.at(i, t), best), unit_inv);
            for (int j = 0; j < s; ++j) {
                auto sub = ring_mul(f, factor, A.at(t, j));
                for (int c = 0; c < p; ++c) A.at(i, j).c[c] = f.sub(A.at(i, j).c[c], sub.c[c]);
            }
            for (int j = 0; j < r; ++j) {
                auto sub = ring_mul(f, factor, out.left.at(t, j));
                for (int c = 0; c < p; ++c) out.left.at(i, j).c[c] = f.sub(out.left.at(i, j).c[c], sub.c[c]);
            }
        }
        for (int j = t + 1; j < s; ++j) {
            if (ring_is_zero(f, A.at(t, j))) continue;
            auto factor = ring_mul(f, series_shift_down(f, A.at(t, j), best), unit_inv);
            for (int i = 0; i < r; ++i) {
                auto sub = ring_mul(f, factor, A.at(i, t));
                for (int c = 0; c < p; ++c) A.at(i, j).c[c] = f.sub(A.at(i, j).c[c], sub.c[c]);
            }
            for (int i = 0; i < s; ++i) {
                auto sub = ring_mul(f, factor, out.right.at(i, t));
                for (int c = 0; c < p; ++c) out.right.at(i, j).c[c] = f.sub(out.right.at(i, j).c[c], sub.c[c]);
            }
        }
        out.diag_valuations.push_back(best);
        consumed += best;
    }
    out.zero_rows = r - static_cast<int>(out.diag_valuations.size());
    out.zero_cols = s - static_cast<int>(out.diag_valuations.size());
    out.reduced = std::move(A);
    return out;
}

/// Middle term of 0 -> r O_C -> N -> s O_C -> 0 with class matrix A:
/// unit pivots give O_2, valuation-m pivots give I_m, zero rows and
/// columns each give one O_C.
template <class F>
TorsionFreeNF classify_extension(const F& f, const SeriesMat<F>& A) {
    auto sm = dvr_smith(f, A);
    TorsionFreeNF nf;
    for (long v : sm.diag_valuations) {
        if (v == 0)
            ++nf.m_free;
        else
            nf.ideals.push_back(v);
    }
    nf.q_line = sm.zero_rows + sm.zero_cols;
    std::sort(nf.ideals.rbegin(), nf.ideals.rend());
    return nf;
}

/// Presentation of the extension of s O_C by r O_C with class matrix A
/// (entries polynomials in x): generators e_1..e_r, f_1..f_s with relations
/// z e_i = 0 and sum_i A[i][j] e_i + z f_j = 0.
inline ExprPtr extension_expr(int n, int r, int s, const PolyMat& A) {
    PolyMat rels(r + s, r + s);
    for (int i = 0; i < r; ++i) rels.at(i, i) = Poly::monomial(1, 0, 1);
    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < r; ++i) rels.at(i, r + j) = A.at(i, j);
        rels.at(r + j, r + j) = Poly::monomial(1, 0, 1);
    }
    return make_pres(n, r + s, rels);
}

inline ExprPtr nf_realize_expr(const TorsionFreeNF& nf) {
    ExprPtr e;
    auto add = [&e](ExprPtr x) { e = e ? make_sum(e, std::move(x)) : std::move(x); };
    std::vector<long> ideals = nf.ideals;
    std::sort(ideals.rbegin(), ideals.rend());
    for (long k : ideals) add(make_ideal_point(2, k));
    for (long i = 0; i < nf.m_free; ++i) add(make_algebra(2));
    for (long i = 0; i < nf.q_line; ++i) add(make_structure(2, 1));
    if (!e) e = make_zero(2);
    return e;
}

struct NfInvariants {
    long rank = 0;
    long index = 0;
    std::vector<long> char_first;        // (0, t+m, R)
    std::vector<long> graded_rank;       // per level
    std::vector<std::vector<long>> graded_torsion;
};

inline NfInvariants nf_invariants(const TorsionFreeNF& nf) {
    NfInvariants out;
    long t = static_cast<long>(nf.ideals.size());
    out.rank = nf.rank();
    out.index = nf.index();
    out.graded_rank = {t + nf.m_free + nf.q_line, t + nf.m_free};
    std::vector<long> tor = nf.ideals;
    std::sort(tor.rbegin(), tor.rend());
    out.graded_torsion = {tor, {}};
    out.char_first = {0, t + nf.m_free, out.rank};
    return out;
}

/// Read the normal form off the stabilized graded data of the first
/// canonical filtration (n = 2 classification).
template <class F>
TorsionFreeNF classify_torsion_free(Ctx<F>& ctx, const ExprPtr& e, int p) {
    if (e->n != 2) throw precondition_error("torsion-free classification requires n = 2");
    auto rep = first_filtration(ctx, e, p);
    const auto& g1 = rep.graded[0];
    const auto& g2 = rep.graded[1];
    if (!g2.torsion.empty())
        throw precondition_error("module has z-level torsion; not torsion-free");
    TorsionFreeNF nf;
    nf.ideals = g1.torsion;
    long t = static_cast<long>(nf.ideals.size());
    nf.m_free = g2.rank - t;
    nf.q_line = g1.rank - g2.rank;
    if (nf.m_free < 0 || nf.q_line < 0)
        throw precondition_error("graded ranks incompatible with a torsion-free normal form");
    long R = generalized_rank(ctx, e, p);
    if (R != nf.rank()) throw internal_error("normal form rank mismatch against generalized rank");
    return nf;
}

/// Quasi-free type on the double curve, as the pair (m_1, m_2).
inline ExprPtr quasi_free_expr(int n, const std::vector<long>& type) {
    ExprPtr e;
    for (int i = 0; i < static_cast<int>(type.size()); ++i)
        for (long c = 0; c < type[i]; ++c) {
            auto s = i + 1 == n ? make_algebra(n) : make_structure(n, i + 1);
            e = e ? make_sum(e, std::move(s)) : std::move(s);
        }
    if (!e) e = make_zero(n);
    return e;
}

/// Classify ker(pi : N -> T) for quasi-free N and torsion T, then validate
/// against the realized normal form at equal precision.
template <class F>
TorsionFreeNF classify_kernel(Ctx<F>& ctx, const std::vector<long>& n_type, const std::vector<long>& torsion,
                              const PolyMat& pi, int p) {
    if (n_type.size() != 2) throw precondition_error("classify_kernel is proved for n = 2 only");
    auto N = quasi_free_expr(2, n_type);
    ExprPtr T;
    for (long k : torsion) {
        auto t = make_torsion(2, k);
        T = T ? make_sum(T, std::move(t)) : std::move(t);
    }
    if (!T) T = make_zero(2);
    auto ker = make_kernel(pi, N, T);
    // surjectivity of pi at both precisions
    for (int q : {p, 2 * p}) {
        auto ni = ctx.realize(N, q);
        auto ti = ctx.realize(T, q);
        auto ki = ctx.realize(ker, q);
        if (ki->dim() != ni->dim() - ti->dim())
            throw precondition_error("map to the torsion module is not surjective");
    }
    auto nf = classify_torsion_free(ctx, ker, p);
    // validation: invariant match against the realized normal form
    auto w = nf_realize_expr(nf);
    for (int q : {p, 2 * p}) {
        if (ctx.realize(w, q)->dim() != ctx.realize(ker, q)->dim())
            throw internal_error("normal form witness dimension mismatch");
    }
    auto rk = first_filtration(ctx, ker, p);
    auto rw = first_filtration(ctx, w, p);
    auto sk = second_filtration(ctx, ker, p);
    auto sw = second_filtration(ctx, w, p);
    if (!(rk.graded == rw.graded && sk.graded == sw.graded && char_function(rk) == char_function(rw)))
        throw internal_error("normal form witness invariants mismatch");
    return nf;
}

namespace detail {

/// Instance of the stabilized double dual tau(raw Hom(D, A) at 2q) at q,
/// kept light: carrier and actions only.
template <class F>
Instance<F> dd_instance(Ctx<F>& ctx, const ExprPtr& dual_expr, int q) {
    const F& f = ctx.f;
    int n = dual_expr->n;
    auto H2 = ctx.raw_hom(dual_expr, 2 * q);
    int h2 = ctx.realize(dual_expr, 2 * q)->gens;
    std::vector<Vec<F>> rows;
    for (int i = 0; i < H2.dim(); ++i) {
        Vec<F> v(H2.basis.a.begin() + static_cast<std::size_t>(i) * H2.ambient,
                 H2.basis.a.begin() + static_cast<std::size_t>(i + 1) * H2.ambient);
        rows.push_back(truncate_vec(f, v, h2, n, 2 * q, q));
    }
    auto DD = row_space(f, mat_from_rows(f, rows, h2 * n * q));
    Instance<F> m;
    m.n = n;
    m.p = q;
    m.gens = -1;
    m.X = restrict_operator(f, DD, block_diag(f, x_op(f, n, q), h2));
    m.Z = restrict_operator(f, DD, block_diag(f, z_op(f, n, q), h2));
    return m;
}

/// Evaluation map M -> A^h against the dual generators; columns indexed by
/// the basis of M, rows by the coordinates of A^h.
template <class F>
Mat<F> evaluation_matrix(const F& f, const Instance<F>& m, const Instance<F>& dual) {
    int n = m.n, q = m.p, d = n * q;
    int g = m.gens;
    int h = dual.gens;
    Mat<F> ev(h * d, static_cast<int>(m.dim()), f);
    // cache multiplication operators for the dual generator components
    std::vector<Mat<F>> psi_ops(static_cast<std::size_t>(h) * g);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < g; ++i) {
            RingElem<F> comp(n, q, f);
            for (int t = 0; t < d; ++t)
                comp.c[t] = dual.dual_gen_vecs.at(j, i * d + t);
            psi_ops[static_cast<std::size_t>(j) * g + i] = mult_op(f, comp);
        }
    for (int c = 0; c < m.dim(); ++c) {
        // ambient representative of basis vector c
        for (int j = 0; j < h; ++j) {
            Vec<F> acc(static_cast<std::size_t>(d), f.zero());
            for (int i = 0; i < g; ++i) {
                const auto& op = psi_ops[static_cast<std::size_t>(j) * g + i];
                for (int a = 0; a < d; ++a) {
                    auto coef = m.rep.at(i * d + a, c);
                    if (f.is_zero(coef)) continue;
                    for (int b = 0; b < d; ++b)
                        acc[b] = f.add(acc[b], f.mul(op.at(b, a), coef));
                }
            }
            for (int b = 0; b < d; ++b) ev.at(j * d + b, c) = acc[b];
        }
    }
    return ev;
}

}  // namespace detail

/// Prop-6.5.4-style reflexivity: the natural evaluation into the stabilized
/// double dual must be injective with matching stabilized invariants.
template <class F>
bool reflexivity_check(Ctx<F>& ctx, const ExprPtr& e, int p) {
    const F& f = ctx.f;
    // the evaluation pairing only descends to the presentation-flavor model:
    // its relations are exactly the polynomial syzygies the dual annihilates
    auto pp = poly_pres(*e);
    if (!pp) throw precondition_error("reflexivity check needs a presented module");
    auto pe = make_pres(e->n, pp->first, pp->second);
    auto dual_expr = make_dual(pe);
    auto m_lo = ctx.realize(pe, p);
    auto m_hi = ctx.realize(pe, 2 * p);
    if (m_lo->gens < 0) throw precondition_error("reflexivity check needs a generator-backed module");
    auto d_lo = ctx.realize(dual_expr, p);
    auto d_hi = ctx.realize(dual_expr, 2 * p);
    if (d_lo->dim() == 0 && d_hi->dim() == 0) return m_lo->dim() == 0;
    if (d_lo->gens != d_hi->gens) throw precision_error("dual generator count unstable");
    Instance<F> imev_lo, imev_hi;
    long ker_lo = 0, ker_hi = 0;
    for (int round = 0; round < 2; ++round) {
        const auto& mi = round == 0 ? *m_lo : *m_hi;
        const auto& di = round == 0 ? *d_lo : *d_hi;
        auto ev = detail::evaluation_matrix(f, mi, di);
        long rk = mat_rank(f, ev);
        long ker = mi.dim() - rk;
        Mat<F> cols(ev.cols, ev.rows, f);
        for (int i = 0; i < ev.rows; ++i)
            for (int j = 0; j < ev.cols; ++j) cols.at(j, i) = ev.at(i, j);
        auto B = row_space(f, std::move(cols));
        Instance<F> im;
        im.n = mi.n;
        im.p = mi.p;
        im.gens = -1;
        im.X = restrict_operator(f, B, block_diag(f, x_op(f, mi.n, mi.p), di.gens));
        im.Z = restrict_operator(f, B, block_diag(f, z_op(f, mi.n, mi.p), di.gens));
        if (round == 0) { imev_lo = std::move(im); ker_lo = ker; }
        else { imev_hi = std::move(im); ker_hi = ker; }
    }
    if (ker_lo > 0 || ker_hi > 0) {
        if ((ker_lo > 0) != (ker_hi > 0))
            throw precision_error("evaluation kernel unstable between precisions");
        return false;  // torsion obstructs injectivity
    }
    auto dd_lo = detail::dd_instance(ctx, dual_expr, p);
    auto dd_hi = detail::dd_instance(ctx, dual_expr, 2 * p);
    auto rep_im = stabilized_report(f, imev_lo, imev_hi, '1');
    auto rep_dd = stabilized_report(f, dd_lo, dd_hi, '1');
    if (rep_im.graded.size() != rep_dd.graded.size()) return false;
    for (std::size_t i = 0; i < rep_im.graded.size(); ++i)
        if (!(rep_im.graded[i] == rep_dd.graded[i])) return false;
    return true;
}

}  // namespace pmc
