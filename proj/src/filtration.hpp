#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "module.hpp"

namespace pmc {

/// Classification data of a k[[x]]-module: free rank plus torsion partition.
struct CxInvariants {
    long rank = 0;
    std::vector<long> torsion;  // weakly decreasing

    bool operator==(const CxInvariants& o) const { return rank == o.rank && torsion == o.torsion; }
};

struct FiltrationReport {
    char which = '1';            // '1' or '2'
    std::vector<long> chain;     // length n+1, dims at the stated precision
    std::vector<CxInvariants> graded;  // length n, two-precision stabilized
};

namespace detail {

template <class F>
std::vector<Subspace<F>> first_chain_spaces(const F& f, const Instance<F>& m) {
    // V_i = im(Z^{i-1}), i = 1..n+1
    int d = static_cast<int>(m.dim());
    std::vector<Subspace<F>> v;
    Mat<F> P = Mat<F>::identity(d, f);
    for (int i = 1; i <= m.n + 1; ++i) {
        Mat<F> rows(P.cols, P.rows, f);
        for (int r = 0; r < P.rows; ++r)
            for (int c = 0; c < P.cols; ++c) rows.at(c, r) = P.at(r, c);
        v.push_back(row_space(f, std::move(rows)));
        if (i <= m.n) P = mat_mul(f, m.Z, P);
    }
    return v;
}

template <class F>
std::vector<Subspace<F>> second_chain_spaces(const F& f, const Instance<F>& m) {
    // K_i = ker(Z^{n+1-i}), i = 1..n+1
    int d = static_cast<int>(m.dim());
    std::vector<Mat<F>> pows;
    pows.push_back(Mat<F>::identity(d, f));
    for (int e = 1; e <= m.n; ++e) pows.push_back(mat_mul(f, m.Z, pows.back()));
    std::vector<Subspace<F>> v;
    for (int i = 1; i <= m.n + 1; ++i) v.push_back(row_space(f, kernel_basis(f, pows[m.n + 1 - i])));
    return v;
}

/// Jordan partition of X on V/W for W <= V, both X-invariant.
template <class F>
std::vector<long> graded_partition(const F& f, const Instance<F>& m, const Subspace<F>& V, const Subspace<F>& W) {
    if (V.dim() == W.dim()) return {};
    auto XV = restrict_operator(f, V, m.X);
    // express W inside V coordinates
    std::vector<Vec<F>> wc;
    for (int i = 0; i < W.dim(); ++i) {
        Vec<F> row(W.basis.a.begin() + static_cast<std::size_t>(i) * W.ambient,
                   W.basis.a.begin() + static_cast<std::size_t>(i + 1) * W.ambient);
        wc.push_back(express_in_basis(f, V, row));
    }
    Mat<F> wm(static_cast<int>(wc.size()), V.dim(), f);
    for (std::size_t i = 0; i < wc.size(); ++i)
        for (int j = 0; j < V.dim(); ++j) wm.at(static_cast<int>(i), j) = wc[i][j];
    auto Q = make_quotient(f, row_space(f, std::move(wm)));
    auto Xbar = quotient_operator(f, Q, XV);
    return nilpotent_partition(f, Xbar);
}

template <class F>
std::pair<std::vector<long>, std::vector<std::vector<long>>> chain_and_partitions(const F& f,
                                                                                  const Instance<F>& m,
                                                                                  char which) {
    auto spaces = which == '1' ? first_chain_spaces(f, m) : second_chain_spaces(f, m);
    std::vector<long> chain;
    for (const auto& s : spaces) chain.push_back(s.dim());
    std::vector<std::vector<long>> parts;
    for (int i = 0; i + 1 < static_cast<int>(spaces.size()); ++i)
        parts.push_back(graded_partition(f, m, spaces[i], spaces[i + 1]));
    return {chain, parts};
}

}  // namespace detail

/// Split a graded piece into free rank and torsion by comparing Jordan
/// partitions at p and 2p: blocks growing by exactly p are free, stable
/// blocks are torsion (and must be < p).
inline CxInvariants match_partitions(std::vector<long> lam_p, std::vector<long> lam_2p, int p) {
    if (lam_p.size() != lam_2p.size())
        throw precision_error("graded piece changes block count between precisions p and 2p");
    std::sort(lam_p.rbegin(), lam_p.rend());
    std::sort(lam_2p.rbegin(), lam_2p.rend());
    CxInvariants out;
    std::vector<long> pool = lam_p;
    auto take = [&pool](long v) {
        auto it = std::find(pool.begin(), pool.end(), v);
        if (it == pool.end()) return false;
        pool.erase(it);
        return true;
    };
    for (long v : lam_2p) {
        if (v > p) {
            if (!take(v - p))
                throw precision_error("graded block grows but not by the precision step");
            ++out.rank;
        } else {
            if (!take(v)) throw precision_error("graded block neither stable nor free");
            if (v >= p) throw precision_error("torsion length reaches the working precision");
            out.torsion.push_back(v);
        }
    }
    if (!pool.empty()) throw precision_error("unmatched graded blocks between precisions");
    std::sort(out.torsion.rbegin(), out.torsion.rend());
    return out;
}

/// Stabilized filtration report from two realizations of the same recipe.
template <class F>
FiltrationReport stabilized_report(const F& f, const Instance<F>& at_p, const Instance<F>& at_2p, char which) {
    auto lo = detail::chain_and_partitions(f, at_p, which);
    auto hi = detail::chain_and_partitions(f, at_2p, which);
    FiltrationReport rep;
    rep.which = which;
    rep.chain = lo.first;
    for (int i = 0; i < static_cast<int>(lo.second.size()); ++i)
        rep.graded.push_back(match_partitions(lo.second[i], hi.second[i], at_p.p));
    return rep;
}

template <class F>
FiltrationReport first_filtration(Ctx<F>& ctx, const ExprPtr& e, int p) {
    auto a = ctx.realize(e, p);
    auto b = ctx.realize(e, 2 * p);
    return stabilized_report(ctx.f, *a, *b, '1');
}

template <class F>
FiltrationReport second_filtration(Ctx<F>& ctx, const ExprPtr& e, int p) {
    auto a = ctx.realize(e, p);
    auto b = ctx.realize(e, 2 * p);
    return stabilized_report(ctx.f, *a, *b, '2');
}

inline long report_rank(const FiltrationReport& rep) {
    long r = 0;
    for (const auto& g : rep.graded) r += g.rank;
    return r;
}

inline long report_torsion_total(const FiltrationReport& rep) {
    long t = 0;
    for (const auto& g : rep.graded)
        for (long v : g.torsion) t += v;
    return t;
}

/// Characteristic function F(k) = R(M_{n+1-k}), cumulated from the top level.
inline std::vector<long> char_function(const FiltrationReport& rep) {
    int n = static_cast<int>(rep.graded.size());
    std::vector<long> F(n + 1, 0);
    for (int k = 1; k <= n; ++k) F[k] = F[k - 1] + rep.graded[n - k].rank;
    return F;
}

template <class F>
long rank_by_slope(Ctx<F>& ctx, const ExprPtr& e, int p) {
    auto a = ctx.realize(e, p);
    auto b = ctx.realize(e, 2 * p);
    long delta = b->dim() - a->dim();
    if (delta < 0 || delta % p != 0)
        throw precision_error("dimension growth is not an integer slope; precision insufficient");
    return delta / p;
}

template <class F>
long rank_by_graded(Ctx<F>& ctx, const ExprPtr& e, int p) {
    return report_rank(first_filtration(ctx, e, p));
}

/// Generalized rank; the two routes (precision slope, sum of graded ranks)
/// must agree or the precision is declared insufficient.
template <class F>
long generalized_rank(Ctx<F>& ctx, const ExprPtr& e, int p) {
    long rs = rank_by_slope(ctx, e, p);
    long rg = rank_by_graded(ctx, e, p);
    if (rs != rg) throw precision_error("slope rank and graded rank disagree; precision insufficient");
    return rs;
}

/// dim M/(x,z)M: the Nakayama minimal generator count (not additive).
template <class F>
long naive_min_generators(const F& f, const Instance<F>& m) {
    int d = static_cast<int>(m.dim());
    if (d == 0) return 0;
    Mat<F> rows(2 * d, d, f);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            rows.at(c, r) = m.X.at(r, c);
            rows.at(d + c, r) = m.Z.at(r, c);
        }
    return d - mat_rank(f, rows);
}

/// Quasi-free type (m_1..m_n) when all first-filtration graded pieces are
/// free; both detection routes run and must agree.
template <class F>
std::optional<std::vector<long>> quasi_free_type(Ctx<F>& ctx, const ExprPtr& e, int p) {
    auto rep = first_filtration(ctx, e, p);
    for (const auto& g : rep.graded)
        if (!g.torsion.empty()) return std::nullopt;
    int n = static_cast<int>(rep.graded.size());
    std::vector<long> m(n, 0);
    for (int i = 0; i < n; ++i) {
        long r = rep.graded[i].rank;
        long rn = i + 1 < n ? rep.graded[i + 1].rank : 0;
        if (r < rn) throw internal_error("graded ranks not weakly decreasing on a torsion-free graded module");
        m[i] = r - rn;
    }
    // second route: d_i = dim(z^i M / x z^i M) = sum_{j>i} (j-i) m_{j}
    const F& f = ctx.f;
    auto lo = ctx.realize(e, p);
    auto hi = ctx.realize(e, 2 * p);
    std::vector<long> d_lo, d_hi;
    for (const auto* inst : {lo.get(), hi.get()}) {
        auto spaces = detail::first_chain_spaces(f, *inst);
        std::vector<long> d;
        for (int i = 0; i < n; ++i) {
            const auto& V = spaces[i];  // z^i M
            std::vector<Vec<F>> ximg;
            for (int r = 0; r < V.dim(); ++r) {
                Vec<F> row(V.basis.a.begin() + static_cast<std::size_t>(r) * V.ambient,
                           V.basis.a.begin() + static_cast<std::size_t>(r + 1) * V.ambient);
                ximg.push_back(mat_apply(f, inst->X, row));
            }
            Mat<F> xm(static_cast<int>(ximg.size()), V.ambient, f);
            for (std::size_t r = 0; r < ximg.size(); ++r)
                for (int c = 0; c < V.ambient; ++c) xm.at(static_cast<int>(r), c) = ximg[r][c];
            d.push_back(V.dim() - mat_rank(f, std::move(xm)));
        }
        if (inst == lo.get()) d_lo = d; else d_hi = d;
    }
    if (d_lo != d_hi) throw precision_error("generator-count profile unstable between precisions");
    // d_i = sum_{j >= i+1} (j-i) m_j, solved from the bottom up
    std::vector<long> m2(n, 0);
    for (int i = n - 1; i >= 0; --i) {
        long acc = 0;
        for (int j = i + 2; j <= n; ++j) acc += (j - i) * m2[j - 1];
        long v = d_lo[i] - acc;
        if (v < 0) throw internal_error("triangular generator system yields a negative multiplicity");
        m2[i] = v;  // m_{i+1}
    }
    if (m != m2)
        throw internal_error("quasi-free type detection routes disagree (graded ranks vs triangular system)");
    return m;
}

/// F(M_0) for the generic type p*O_n + O_m with R = p*n + m.
inline std::vector<long> generic_char_bound(int n, long R) {
    long q = R / n, m = R % n;
    std::vector<long> F(n + 1, 0);
    for (int k = 0; k <= n; ++k) F[k] = q * k + std::max<long>(0, m + k - n);
    return F;
}

}  // namespace pmc
