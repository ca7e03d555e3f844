#pragma once

#include <deque>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "field.hpp"
#include "linalg.hpp"
#include "poly.hpp"

namespace pmc {

/// A module realized at one precision: finite-dimensional carrier with the
/// two commuting nilpotent actions. Quotient-style realizations also track
/// how generator-level (ambient A^g) vectors map to classes and back.
template <class F>
struct Instance {
    int n = 1, p = 1;
    Mat<F> X, Z;
    int gens = -1;     // -1: not generator-backed
    Mat<F> cls;        // dim x (gens*n*p)
    Mat<F> rep;        // (gens*n*p) x dim, cls*rep = id
    // dual realizations only:
    Mat<F> dual_gen_vecs;  // gens x (child_gens*n*p), the chosen generators
    Mat<F> dual_rel_gens;  // rel count x (gens*n*p), stabilized syzygies

    long dim() const { return X.rows; }
};

template <class F>
using InstPtr = std::shared_ptr<const Instance<F>>;

// ---- ambient free module A^g helpers ----

template <class F>
Mat<F> x_op(const F& f, int n, int p) {
    Mat<F> X(n * p, n * p, f);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a + 1 < p; ++a) X.at(b * p + a + 1, b * p + a) = f.one();
    return X;
}

template <class F>
Mat<F> z_op(const F& f, int n, int p) {
    Mat<F> Z(n * p, n * p, f);
    for (int b = 0; b + 1 < n; ++b)
        for (int a = 0; a < p; ++a) Z.at((b + 1) * p + a, b * p + a) = f.one();
    return Z;
}

template <class F>
Mat<F> block_diag(const F& f, const Mat<F>& B, int copies) {
    Mat<F> M(B.rows * copies, B.cols * copies, f);
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < B.rows; ++i)
            for (int j = 0; j < B.cols; ++j) M.at(c * B.rows + i, c * B.cols + j) = B.at(i, j);
    return M;
}

/// Matrix of multiplication by a ring element on the monomial basis of A.
template <class F>
Mat<F> mult_op(const F& f, const RingElem<F>& r) {
    int n = r.n, p = r.p, d = n * p;
    Mat<F> M(d, d, f);
    for (int b1 = 0; b1 < n; ++b1)
        for (int a1 = 0; a1 < p; ++a1) {
            if (f.is_zero(r.at(a1, b1))) continue;
            for (int b2 = 0; b2 + b1 < n; ++b2)
                for (int a2 = 0; a2 + a1 < p; ++a2)
                    M.at((b1 + b2) * p + a1 + a2, b2 * p + a2) =
                        f.add(M.at((b1 + b2) * p + a1 + a2, b2 * p + a2), r.at(a1, b1));
        }
    return M;
}

/// Field vector in k^{gens*n*p} for a column of ring elements.
template <class F>
Vec<F> column_vector(const F&, const std::vector<RingElem<F>>& col) {
    Vec<F> v;
    for (const auto& r : col) v.insert(v.end(), r.c.begin(), r.c.end());
    return v;
}

/// Smallest X,Z-stable subspace containing the seed rows.
template <class F>
Subspace<F> module_closure(const F& f, const std::vector<Vec<F>>& seeds, const Mat<F>& X, const Mat<F>& Z,
                           int ambient) {
    RrefBuilder<F> b(ambient);
    std::deque<Vec<F>> queue;
    for (const auto& s : seeds)
        if (b.insert(f, s)) queue.push_back(s);
    while (!queue.empty()) {
        Vec<F> v = std::move(queue.front());
        queue.pop_front();
        for (const Mat<F>* Op : {&X, &Z}) {
            auto w = mat_apply(f, *Op, v);
            if (b.insert(f, w)) queue.push_back(w);
        }
    }
    return b.finish(f);
}

template <class F>
Mat<F> mat_pow(const F& f, Mat<F> M, long e) {
    Mat<F> R = Mat<F>::identity(M.rows, f);
    while (e > 0) {
        if (e & 1) R = mat_mul(f, R, M);
        e >>= 1;
        if (e) M = mat_mul(f, M, M);
    }
    return R;
}

template <class F>
bool mat_is_zero(const F& f, const Mat<F>& M) {
    for (const auto& e : M.a)
        if (!f.is_zero(e)) return false;
    return true;
}

template <class F>
bool mat_equal(const F& f, const Mat<F>& A, const Mat<F>& B) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (std::size_t i = 0; i < A.a.size(); ++i)
        if (!f.is_zero(f.sub(A.a[i], B.a[i]))) return false;
    return true;
}

template <class F>
void check_module_axioms(const F& f, const Instance<F>& m) {
    if (m.dim() == 0) return;
    if (!mat_equal(f, mat_mul(f, m.X, m.Z), mat_mul(f, m.Z, m.X)))
        throw internal_error("module actions do not commute");
    if (!mat_is_zero(f, mat_pow(f, m.Z, m.n))) throw internal_error("z-action not nilpotent of order n");
    if (!mat_is_zero(f, mat_pow(f, m.X, m.p))) throw internal_error("x-action not nilpotent of order p");
}

// ---- realization ----

template <class F>
struct Ctx {
    const F& f;
    // keys hold owning pointers so recycled node addresses cannot collide
    std::map<std::pair<ExprPtr, int>, InstPtr<F>> cache;

    explicit Ctx(const F& field) : f(field) {}

    InstPtr<F> realize(const ExprPtr& e, int p);

    Subspace<F> raw_hom(const ExprPtr& m, int q);
};

/// Generating ring elements (columns of the map A^2 -> A) for embedded ideals.
template <class F>
std::vector<RingElem<F>> ideal_generators(const F& f, const Expr& e, int p) {
    using K = Expr::Kind;
    int n = e.n;
    std::vector<RingElem<F>> g;
    auto mono = [&](std::int64_t c, int a, int b) { return ring_from_poly(f, Poly::monomial(c, a, b), n, p); };
    switch (e.kind) {
        case K::IdealPoint:
            if (e.k >= p) throw precision_error("ideal exponent k must be < precision p");
            g.push_back(mono(1, static_cast<int>(e.k), 0));
            g.push_back(mono(1, 0, 1));
            break;
        case K::JIdeal:
            g.push_back(mono(1, 1, 0));
            g.push_back(mono(1, 0, n - 1));
            break;
        case K::SubschemeA:
            if (e.ppar + e.qpar >= p) throw precision_error("subscheme exponents must be < precision p");
            g.push_back(mono(1, static_cast<int>(e.ppar + e.qpar), 0));
            g.push_back(mono(1, static_cast<int>(e.qpar), 1));
            break;
        case K::SubschemeB: {
            if (e.qpar + e.mpar + e.ppar >= p) throw precision_error("subscheme exponents must be < precision p");
            auto g1 = ring_add(f, mono(1, static_cast<int>(e.qpar + e.mpar + e.ppar), 0),
                               mono(e.alpha, static_cast<int>(e.qpar), 1));
            g.push_back(g1);
            g.push_back(mono(1, static_cast<int>(e.qpar + e.mpar), 1));
            break;
        }
        default:
            throw internal_error("not an embedded ideal kind");
    }
    return g;
}

namespace detail {

template <class F>
Instance<F> realize_quotient(const F& f, int n, int p, int gens, const std::vector<Vec<F>>& rel_vecs) {
    int amb = gens * n * p;
    auto Xa = block_diag(f, x_op(f, n, p), gens);
    auto Za = block_diag(f, z_op(f, n, p), gens);
    auto S = module_closure(f, rel_vecs, Xa, Za, amb);
    auto Q = make_quotient(f, S);
    Instance<F> m;
    m.n = n;
    m.p = p;
    m.gens = gens;
    m.X = quotient_operator(f, Q, Xa);
    m.Z = quotient_operator(f, Q, Za);
    int d = Q.dim();
    m.cls = Mat<F>(d, amb, f);
    for (int j = 0; j < amb; ++j) {
        Vec<F> e(amb, f.zero());
        e[j] = f.one();
        auto c = quotient_project(f, Q, e);
        for (int i = 0; i < d; ++i) m.cls.at(i, j) = c[i];
    }
    m.rep = Mat<F>(amb, d, f);
    for (int i = 0; i < d; ++i) {
        Vec<F> e(static_cast<std::size_t>(d), f.zero());
        e[i] = f.one();
        auto v = quotient_lift(f, Q, e);
        for (int j = 0; j < amb; ++j) m.rep.at(j, i) = v[j];
    }
    return m;
}

template <class F>
std::vector<Vec<F>> instantiate_columns(const F& f, const PolyMat& pm, int n, int p) {
    std::vector<Vec<F>> cols;
    for (int j = 0; j < pm.cols; ++j) {
        std::vector<RingElem<F>> col;
        for (int i = 0; i < pm.rows; ++i) col.push_back(ring_from_poly(f, pm.at(i, j), n, p));
        cols.push_back(column_vector(f, col));
    }
    return cols;
}

/// Field matrix of a generator-level polynomial map on ambient free modules.
template <class F>
Mat<F> expand_map(const F& f, const PolyMat& pm, int n, int p) {
    int d = n * p;
    Mat<F> M(pm.rows * d, pm.cols * d, f);
    for (int i = 0; i < pm.rows; ++i)
        for (int j = 0; j < pm.cols; ++j) {
            if (pm.at(i, j).is_zero()) continue;
            auto blk = mult_op(f, ring_from_poly(f, pm.at(i, j), n, p));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (!f.is_zero(blk.at(a, b))) M.at(i * d + a, j * d + b) = blk.at(a, b);
        }
    return M;
}

template <class F>
Mat<F> mat_from_rows(const F& f, const std::vector<Vec<F>>& rows, int ambient) {
    Mat<F> M(static_cast<int>(rows.size()), ambient, f);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < ambient; ++j) M.at(static_cast<int>(i), j) = rows[i][j];
    return M;
}

/// Instance of a submodule B of an ambient A^g with tracked generators:
/// E maps ambient generator coordinates onto the submodule.
template <class F>
Instance<F> realize_submodule(const F& f, int n, int p, int gens, const Mat<F>& E, const Subspace<F>& B,
                              const Mat<F>& Xa, const Mat<F>& Za) {
    Instance<F> m;
    m.n = n;
    m.p = p;
    m.gens = gens;
    m.X = restrict_operator(f, B, Xa);
    m.Z = restrict_operator(f, B, Za);
    int d = B.dim();
    int amb_src = E.cols;
    m.cls = Mat<F>(d, amb_src, f);
    for (int j = 0; j < amb_src; ++j) {
        Vec<F> e(amb_src, f.zero());
        e[j] = f.one();
        auto c = express_in_basis(f, B, mat_apply(f, E, e));
        for (int i = 0; i < d; ++i) m.cls.at(i, j) = c[i];
    }
    m.rep = Mat<F>(amb_src, d, f);
    for (int i = 0; i < d; ++i) {
        Vec<F> target(B.basis.a.begin() + static_cast<std::size_t>(i) * B.ambient,
                      B.basis.a.begin() + static_cast<std::size_t>(i + 1) * B.ambient);
        auto sol = solve(f, E, target);
        if (!sol) throw internal_error("submodule basis vector has no generator-level preimage");
        for (int j = 0; j < amb_src; ++j) m.rep.at(j, i) = (*sol)[j];
    }
    return m;
}

/// Nakayama generators: lifts of a basis of S/(X S + Z S), rows in ambient coords.
template <class F>
std::vector<Vec<F>> nakayama_gens(const F& f, const Subspace<F>& S, const Mat<F>& Xa, const Mat<F>& Za) {
    std::vector<Vec<F>> ximg, zimg;
    for (int i = 0; i < S.dim(); ++i) {
        Vec<F> v(S.basis.a.begin() + static_cast<std::size_t>(i) * S.ambient,
                 S.basis.a.begin() + static_cast<std::size_t>(i + 1) * S.ambient);
        ximg.push_back(mat_apply(f, Xa, v));
        zimg.push_back(mat_apply(f, Za, v));
    }
    std::vector<Vec<F>> all = ximg;
    all.insert(all.end(), zimg.begin(), zimg.end());
    // coordinates inside S
    std::vector<Vec<F>> coords;
    for (const auto& w : all) coords.push_back(express_in_basis(f, S, w));
    auto Ssub = row_space(f, mat_from_rows(f, coords, S.dim()));
    auto Q = make_quotient(f, Ssub);
    std::vector<Vec<F>> gens;
    for (int k = 0; k < Q.dim(); ++k) {
        Vec<F> e(static_cast<std::size_t>(Q.dim()), f.zero());
        e[k] = f.one();
        auto c = quotient_lift(f, Q, e);
        Vec<F> v(S.ambient, f.zero());
        for (int i = 0; i < S.dim(); ++i) {
            if (f.is_zero(c[i])) continue;
            for (int j = 0; j < S.ambient; ++j)
                v[j] = f.add(v[j], f.mul(c[i], S.basis.at(i, j)));
        }
        gens.push_back(v);
    }
    return gens;
}

/// Coefficient truncation A_{2q}^g -> A_q^g, slot by slot.
template <class F>
Vec<F> truncate_vec(const F& f, const Vec<F>& v, int g, int n, int q2, int q) {
    Vec<F> out(static_cast<std::size_t>(g) * n * q, f.zero());
    for (int s = 0; s < g; ++s)
        for (int b = 0; b < n; ++b)
            for (int a = 0; a < q; ++a)
                out[(static_cast<std::size_t>(s) * n + b) * q + a] =
                    v[(static_cast<std::size_t>(s) * n + b) * q2 + a];
    return out;
}

}  // namespace detail

template <class F>
Subspace<F> Ctx<F>::raw_hom(const ExprPtr& m, int q) {
    int n = m->n;
    int g;
    std::vector<Vec<F>> rel_cols;
    if (auto pp = poly_pres(*m)) {
        g = pp->first;
        rel_cols = detail::instantiate_columns(f, pp->second, n, q);
    } else if (m->kind == Expr::Kind::Dual) {
        auto inst = realize(m, q);
        g = inst->gens;
        for (int i = 0; i < inst->dual_rel_gens.rows; ++i) {
            Vec<F> r(inst->dual_rel_gens.a.begin() + static_cast<std::size_t>(i) * inst->dual_rel_gens.cols,
                     inst->dual_rel_gens.a.begin() + static_cast<std::size_t>(i + 1) * inst->dual_rel_gens.cols);
            rel_cols.push_back(r);
        }
    } else {
        throw precondition_error("dual/hom requires a presented module (no polynomial presentation available)");
    }
    int d = n * q;
    int amb = g * d;
    // conditions: sum_i r_i * phi_i = 0 for every syzygy column r
    Mat<F> C(static_cast<int>(rel_cols.size()) * d, amb, f);
    for (std::size_t rix = 0; rix < rel_cols.size(); ++rix) {
        for (int i = 0; i < g; ++i) {
            RingElem<F> ri(n, q, f);
            for (int t = 0; t < d; ++t) ri.c[t] = rel_cols[rix][static_cast<std::size_t>(i) * d + t];
            if (ring_is_zero(f, ri)) continue;
            auto blk = mult_op(f, ri);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (!f.is_zero(blk.at(a, b)))
                        C.at(static_cast<int>(rix) * d + a, i * d + b) =
                            f.add(C.at(static_cast<int>(rix) * d + a, i * d + b), blk.at(a, b));
        }
    }
    return row_space(f, kernel_basis(f, C));
}

template <class F>
InstPtr<F> Ctx<F>::realize(const ExprPtr& e, int p) {
    if (p < 1) throw precondition_error("precision p must be >= 1");
    auto key = std::make_pair(e, p);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    using K = Expr::Kind;
    int n = e->n;
    Instance<F> m;
    switch (e->kind) {
        case K::Algebra:
        case K::StructureO:
        case K::Torsion:
        case K::Pres: {
            if (e->kind == K::Torsion && e->k >= p)
                throw precision_error("torsion exponent must be < precision p");
            auto pp = poly_pres(*e);
            auto rels = detail::instantiate_columns(f, pp->second, n, p);
            m = detail::realize_quotient(f, n, p, pp->first, rels);
            break;
        }
        case K::IdealPoint:
        case K::JIdeal:
        case K::SubschemeA:
        case K::SubschemeB: {
            auto gvec = ideal_generators(f, *e, p);
            auto Xa = x_op(f, n, p);
            auto Za = z_op(f, n, p);
            int d = n * p;
            Mat<F> E(d, 2 * d, f);
            for (int gi = 0; gi < 2; ++gi) {
                auto blk = mult_op(f, gvec[gi]);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) E.at(a, gi * d + b) = blk.at(a, b);
            }
            std::vector<Vec<F>> seeds;
            for (const auto& gv : gvec) seeds.push_back(Vec<F>(gv.c.begin(), gv.c.end()));
            auto B = module_closure(f, seeds, Xa, Za, d);
            m = detail::realize_submodule(f, n, p, 2, E, B, Xa, Za);
            break;
        }
        case K::Sum: {
            auto a = realize(e->src, p);
            auto b = realize(e->dst, p);
            m.n = n;
            m.p = p;
            m.X = Mat<F>(static_cast<int>(a->dim() + b->dim()), static_cast<int>(a->dim() + b->dim()), f);
            m.Z = m.X;
            for (int i = 0; i < a->X.rows; ++i)
                for (int j = 0; j < a->X.cols; ++j) {
                    m.X.at(i, j) = a->X.at(i, j);
                    m.Z.at(i, j) = a->Z.at(i, j);
                }
            for (int i = 0; i < b->X.rows; ++i)
                for (int j = 0; j < b->X.cols; ++j) {
                    m.X.at(a->X.rows + i, a->X.cols + j) = b->X.at(i, j);
                    m.Z.at(a->X.rows + i, a->X.cols + j) = b->Z.at(i, j);
                }
            if (a->gens >= 0 && b->gens >= 0) {
                m.gens = a->gens + b->gens;
                int amb = (a->gens + b->gens) * n * p;
                m.cls = Mat<F>(m.X.rows, amb, f);
                m.rep = Mat<F>(amb, m.X.rows, f);
                int ca = a->gens * n * p;
                for (int i = 0; i < a->cls.rows; ++i)
                    for (int j = 0; j < a->cls.cols; ++j) m.cls.at(i, j) = a->cls.at(i, j);
                for (int i = 0; i < b->cls.rows; ++i)
                    for (int j = 0; j < b->cls.cols; ++j) m.cls.at(a->cls.rows + i, ca + j) = b->cls.at(i, j);
                for (int i = 0; i < a->rep.rows; ++i)
                    for (int j = 0; j < a->rep.cols; ++j) m.rep.at(i, j) = a->rep.at(i, j);
                for (int i = 0; i < b->rep.rows; ++i)
                    for (int j = 0; j < b->rep.cols; ++j) m.rep.at(ca + i, a->rep.cols + j) = b->rep.at(i, j);
            } else {
                m.gens = -1;
            }
            break;
        }
        case K::Kernel:
        case K::Image:
        case K::Cokernel: {
            auto src = realize(e->src, p);
            auto dst = realize(e->dst, p);
            if (src->gens < 0 || dst->gens < 0)
                throw precondition_error("generator-level map needs generator-backed endpoints");
            auto Aphi = detail::expand_map(f, e->map, n, p);
            // well-definedness: map must send source relations into target relations
            auto Ksrc = kernel_basis(f, src->cls);
            for (int i = 0; i < Ksrc.rows; ++i) {
                Vec<F> w(Ksrc.a.begin() + static_cast<std::size_t>(i) * Ksrc.cols,
                         Ksrc.a.begin() + static_cast<std::size_t>(i + 1) * Ksrc.cols);
                if (!vec_is_zero(f, mat_apply(f, dst->cls, mat_apply(f, Aphi, w))))
                    throw precondition_error("generator-level map is not well defined on the presentation");
            }
            Mat<F> Phi = mat_mul(f, dst->cls, mat_mul(f, Aphi, src->rep));
            if (e->kind == K::Kernel) {
                auto Kker = row_space(f, kernel_basis(f, Phi));
                m.n = n;
                m.p = p;
                m.gens = -1;
                m.X = restrict_operator(f, Kker, src->X);
                m.Z = restrict_operator(f, Kker, src->Z);
            } else if (e->kind == K::Image) {
                Mat<F> cols(Phi.cols, Phi.rows, f);
                for (int i = 0; i < Phi.rows; ++i)
                    for (int j = 0; j < Phi.cols; ++j) cols.at(j, i) = Phi.at(i, j);
                auto B = row_space(f, cols);
                Mat<F> E = mat_mul(f, dst->cls, Aphi);  // ambient A^{g_src} -> dst coords
                m = detail::realize_submodule(f, n, p, src->gens, E, B, dst->X, dst->Z);
            } else {
                // cokernel: dst / im(Phi)
                Mat<F> cols(Phi.cols, Phi.rows, f);
                for (int i = 0; i < Phi.rows; ++i)
                    for (int j = 0; j < Phi.cols; ++j) cols.at(j, i) = Phi.at(i, j);
                auto B = row_space(f, cols);
                auto Q = make_quotient(f, B);
                m.n = n;
                m.p = p;
                m.gens = dst->gens;
                m.X = quotient_operator(f, Q, dst->X);
                m.Z = quotient_operator(f, Q, dst->Z);
                int d = Q.dim();
                m.cls = Mat<F>(d, dst->cls.cols, f);
                for (int j = 0; j < dst->cls.cols; ++j) {
                    Vec<F> col(static_cast<std::size_t>(dst->cls.rows), f.zero());
                    for (int i = 0; i < dst->cls.rows; ++i) col[i] = dst->cls.at(i, j);
                    auto c = quotient_project(f, Q, col);
                    for (int i = 0; i < d; ++i) m.cls.at(i, j) = c[i];
                }
                m.rep = Mat<F>(dst->rep.rows, d, f);
                for (int i = 0; i < d; ++i) {
                    Vec<F> eq(static_cast<std::size_t>(d), f.zero());
                    eq[i] = f.one();
                    auto v = quotient_lift(f, Q, eq);  // element of dst coords
                    Vec<F> w(static_cast<std::size_t>(dst->rep.rows), f.zero());
                    for (int r = 0; r < dst->rep.rows; ++r)
                        for (int c2 = 0; c2 < dst->rep.cols; ++c2)
                            w[r] = f.add(w[r], f.mul(dst->rep.at(r, c2), v[c2]));
                    for (int r = 0; r < dst->rep.rows; ++r) m.rep.at(r, i) = w[r];
                }
            }
            break;
        }
        case K::Dual: {
            // stabilized Hom(-, A): image of the coefficient truncation from 2p,
            // generators matched down from 4p so syzygies are truncation-free
            auto H2 = raw_hom(e->src, 2 * p);
            int g;
            if (auto pp = poly_pres(*e->src)) g = pp->first;
            else g = realize(e->src, 2 * p)->gens;
            std::vector<Vec<F>> drows;
            for (int i = 0; i < H2.dim(); ++i) {
                Vec<F> v(H2.basis.a.begin() + static_cast<std::size_t>(i) * H2.ambient,
                         H2.basis.a.begin() + static_cast<std::size_t>(i + 1) * H2.ambient);
                drows.push_back(detail::truncate_vec(f, v, g, n, 2 * p, p));
            }
            auto D = row_space(f, detail::mat_from_rows(f, drows, g * n * p));
            auto Xa = block_diag(f, x_op(f, n, p), g);
            auto Za = block_diag(f, z_op(f, n, p), g);
            m.n = n;
            m.p = p;
            m.X = restrict_operator(f, D, Xa);
            m.Z = restrict_operator(f, D, Za);
            // generators from the 4p level
            auto H4 = raw_hom(e->src, 4 * p);
            std::vector<Vec<F>> d2rows;
            for (int i = 0; i < H4.dim(); ++i) {
                Vec<F> v(H4.basis.a.begin() + static_cast<std::size_t>(i) * H4.ambient,
                         H4.basis.a.begin() + static_cast<std::size_t>(i + 1) * H4.ambient);
                d2rows.push_back(detail::truncate_vec(f, v, g, n, 4 * p, 2 * p));
            }
            auto D2 = row_space(f, detail::mat_from_rows(f, d2rows, g * n * 2 * p));
            auto Xa2 = block_diag(f, x_op(f, n, 2 * p), g);
            auto Za2 = block_diag(f, z_op(f, n, 2 * p), g);
            auto psi2 = detail::nakayama_gens(f, D2, Xa2, Za2);
            std::vector<Vec<F>> psi;
            for (const auto& v : psi2) psi.push_back(detail::truncate_vec(f, v, g, n, 2 * p, p));
            auto gen_span = module_closure(f, psi, Xa, Za, g * n * p);
            if (!subspace_equal(f, gen_span, D))
                throw precision_error("dual generators do not stabilize at this precision");
            int h = static_cast<int>(psi.size());
            m.gens = h;
            m.dual_gen_vecs = detail::mat_from_rows(f, psi, g * n * p);
            // stabilized syzygies of the generators, truncated from 2p
            int d2 = n * 2 * p;
            Mat<F> E2(g * d2, h * d2, f);
            for (int j = 0; j < h; ++j)
                for (int i = 0; i < g; ++i) {
                    RingElem<F> comp(n, 2 * p, f);
                    for (int t = 0; t < d2; ++t) comp.c[t] = psi2[j][static_cast<std::size_t>(i) * d2 + t];
                    if (ring_is_zero(f, comp)) continue;
                    auto blk = mult_op(f, comp);
                    for (int a = 0; a < d2; ++a)
                        for (int b = 0; b < d2; ++b)
                            if (!f.is_zero(blk.at(a, b))) E2.at(i * d2 + a, j * d2 + b) = blk.at(a, b);
                }
            auto K2 = row_space(f, kernel_basis(f, E2));
            std::vector<Vec<F>> krows;
            for (int i = 0; i < K2.dim(); ++i) {
                Vec<F> v(K2.basis.a.begin() + static_cast<std::size_t>(i) * K2.ambient,
                         K2.basis.a.begin() + static_cast<std::size_t>(i + 1) * K2.ambient);
                krows.push_back(detail::truncate_vec(f, v, h, n, 2 * p, p));
            }
            auto Ks = row_space(f, detail::mat_from_rows(f, krows, h * n * p));
            auto Xh = block_diag(f, x_op(f, n, p), h);
            auto Zh = block_diag(f, z_op(f, n, p), h);
            auto kgens = detail::nakayama_gens(f, Ks, Xh, Zh);
            m.dual_rel_gens = detail::mat_from_rows(f, kgens, h * n * p);
            // representative data for the dual as an abstract module
            m.cls = Mat<F>(0, 0, f);
            m.rep = Mat<F>(0, 0, f);
            // record the subspace basis so classes can be taken if needed
            break;
        }
    }
    check_module_axioms(f, m);
    auto ptr = std::make_shared<Instance<F>>(std::move(m));
    cache.emplace(key, ptr);
    return ptr;
}

// ---- single-precision (field matrix) operations of the core ----

template <class F>
void check_equivariant(const F& f, const Instance<F>& M, const Instance<F>& N, const Mat<F>& phi) {
    if (phi.rows != N.dim() || phi.cols != M.dim())
        throw precondition_error("map has wrong shape: expected dim(N) x dim(M)");
    if (!mat_equal(f, mat_mul(f, phi, M.X), mat_mul(f, N.X, phi)) ||
        !mat_equal(f, mat_mul(f, phi, M.Z), mat_mul(f, N.Z, phi)))
        throw precondition_error("map is not equivariant");
}

template <class F>
Instance<F> field_map_kernel(const F& f, const Instance<F>& M, const Instance<F>& N, const Mat<F>& phi) {
    check_equivariant(f, M, N, phi);
    auto K = row_space(f, kernel_basis(f, phi));
    Instance<F> m;
    m.n = M.n;
    m.p = M.p;
    m.gens = -1;
    m.X = restrict_operator(f, K, M.X);
    m.Z = restrict_operator(f, K, M.Z);
    check_module_axioms(f, m);
    return m;
}

template <class F>
Instance<F> field_map_image(const F& f, const Instance<F>& M, const Instance<F>& N, const Mat<F>& phi) {
    check_equivariant(f, M, N, phi);
    Mat<F> cols(phi.cols, phi.rows, f);
    for (int i = 0; i < phi.rows; ++i)
        for (int j = 0; j < phi.cols; ++j) cols.at(j, i) = phi.at(i, j);
    auto B = row_space(f, cols);
    Instance<F> m;
    m.n = M.n;
    m.p = M.p;
    m.gens = -1;
    m.X = restrict_operator(f, B, N.X);
    m.Z = restrict_operator(f, B, N.Z);
    check_module_axioms(f, m);
    return m;
}

template <class F>
Instance<F> field_map_cokernel(const F& f, const Instance<F>& M, const Instance<F>& N, const Mat<F>& phi) {
    check_equivariant(f, M, N, phi);
    Mat<F> cols(phi.cols, phi.rows, f);
    for (int i = 0; i < phi.rows; ++i)
        for (int j = 0; j < phi.cols; ++j) cols.at(j, i) = phi.at(i, j);
    auto B = row_space(f, cols);
    auto Q = make_quotient(f, B);
    Instance<F> m;
    m.n = M.n;
    m.p = M.p;
    m.gens = -1;
    m.X = quotient_operator(f, Q, N.X);
    m.Z = quotient_operator(f, Q, N.Z);
    check_module_axioms(f, m);
    return m;
}

/// dim Hom_A(M, N) by direct solve of the commutation equations; quadratic
/// in dim so reserved for small inputs (an independent degree-0 route).
template <class F>
long equivariant_hom_dim(const F& f, const Instance<F>& M, const Instance<F>& N) {
    long dm = M.dim(), dn = N.dim();
    if (dm == 0 || dn == 0) return 0;
    Mat<F> C(static_cast<int>(2 * dm * dn), static_cast<int>(dm * dn), f);
    // unknown Phi: dn x dm, entry (r, c) at index r*dm + c; conditions Phi*Op_M - Op_N*Phi = 0
    int row = 0;
    for (const auto* ops : {std::make_pair(&M.X, &N.X), std::make_pair(&M.Z, &N.Z)}) {
        const Mat<F>& OM = *ops->first;
        const Mat<F>& ON = *ops->second;
        for (int r = 0; r < dn; ++r)
            for (int c = 0; c < dm; ++c) {
                for (int t = 0; t < dm; ++t)
                    C.at(row, r * dm + t) = f.add(C.at(row, r * dm + t), OM.at(t, c));
                for (int t = 0; t < dn; ++t)
                    C.at(row, t * dm + c) = f.sub(C.at(row, t * dm + c), ON.at(r, t));
                ++row;
            }
    }
    return static_cast<long>(dm * dn) - mat_rank(f, C);
}

}  // namespace pmc
