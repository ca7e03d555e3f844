#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "poly.hpp"

namespace pmc {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Module recipe over A_{n,p} = k[x]/(x^p)[z]/(z^n). Recipes are
/// precision-free: every invariant re-instantiates them at p and 2p.
struct Expr {
    enum class Kind {
        Algebra,     // A itself
        StructureO,  // O_i = A/(z^i)
        Torsion,     // T_k = A/(x^k, z)
        IdealPoint,  // I_k = (x^k, z) < A, n = 2 only
        JIdeal,      // J_n = (x, z^{n-1}) < A
        SubschemeA,  // (x^{p'+q}, z x^q) < A, n = 2
        SubschemeB,  // (x^{q+m+p'} + alpha z x^q, z x^{q+m}) < A, n = 2
        Pres,        // cokernel of a polynomial relation matrix
        Sum,
        Kernel,      // kernel of a polynomial generator-level map
        Image,
        Cokernel,
        Dual,        // stabilized Hom(-, A)
    };

    Kind kind;
    int n = 1;
    long i = 0, k = 0, ppar = 0, qpar = 0, mpar = 0, alpha = 1;
    int gens = 0;
    PolyMat rels;  // Pres
    PolyMat map;   // Kernel/Image/Cokernel: rows = gens(dst), cols = gens(src)
    ExprPtr src, dst;
    std::string label;
};

inline ExprPtr make_algebra(int n) {
    if (n < 1) throw precondition_error("multiplicity n must be >= 1");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Algebra;
    e->n = n;
    e->gens = 1;
    e->label = "A";
    return e;
}

inline ExprPtr make_structure(int n, long i) {
    if (n < 1 || i < 1 || i > n) throw precondition_error("structure sheaf O_i needs 1 <= i <= n");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::StructureO;
    e->n = n;
    e->i = i;
    e->gens = 1;
    e->label = "O_" + std::to_string(i);
    return e;
}

inline ExprPtr make_torsion(int n, long k) {
    if (k < 1) throw precondition_error("torsion module T_k needs k >= 1");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Torsion;
    e->n = n;
    e->k = k;
    e->gens = 1;
    e->label = "T_" + std::to_string(k);
    return e;
}

inline ExprPtr make_ideal_point(int n, long k) {
    if (n != 2) throw precondition_error("ideal_point I_k requires n = 2");
    if (k < 1) throw precondition_error("ideal_point I_k needs k >= 1");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::IdealPoint;
    e->n = n;
    e->k = k;
    e->gens = 2;
    e->label = "I_" + std::to_string(k);
    return e;
}

inline ExprPtr make_j_ideal(int n) {
    if (n < 2) throw precondition_error("J_n requires n >= 2");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::JIdeal;
    e->n = n;
    e->gens = 2;
    e->label = "J";
    return e;
}

inline ExprPtr make_subscheme_a(int n, long pp, long qq) {
    if (n != 2) throw precondition_error("subscheme ideals live on the double curve (n = 2)");
    if (pp < 0 || qq < 0 || pp + qq <= 0) throw precondition_error("subscheme_a needs p,q >= 0 and p+q > 0");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::SubschemeA;
    e->n = n;
    e->ppar = pp;
    e->qpar = qq;
    e->gens = 2;
    e->label = "subA(" + std::to_string(pp) + "," + std::to_string(qq) + ")";
    return e;
}

inline ExprPtr make_subscheme_b(int n, long pp, long qq, long mm, long alpha) {
    if (n != 2) throw precondition_error("subscheme ideals live on the double curve (n = 2)");
    if (pp < 0 || qq < 0 || mm < 1) throw precondition_error("subscheme_b needs p,q >= 0 and m >= 1");
    if (alpha == 0) throw precondition_error("subscheme_b needs invertible alpha");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::SubschemeB;
    e->n = n;
    e->ppar = pp;
    e->qpar = qq;
    e->mpar = mm;
    e->alpha = alpha;
    e->gens = 2;
    e->label = "subB";
    return e;
}

inline ExprPtr make_pres(int n, int gens, PolyMat rels) {
    if (n < 1 || gens < 0) throw precondition_error("presentation needs n >= 1 and gens >= 0");
    if (rels.rows != gens && !(gens == 0 && rels.rows == 0))
        throw precondition_error("presentation relation matrix must have one row per generator");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Pres;
    e->n = n;
    e->gens = gens;
    e->rels = std::move(rels);
    e->label = "pres";
    return e;
}

inline ExprPtr make_zero(int n) { return make_pres(n, 0, PolyMat(0, 0)); }

inline ExprPtr make_sum(ExprPtr a, ExprPtr b) {
    if (a->n != b->n) throw precondition_error("direct sum of modules over different multiplicities");
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Sum;
    e->n = a->n;
    e->gens = a->gens >= 0 && b->gens >= 0 ? a->gens + b->gens : -1;
    e->src = std::move(a);
    e->dst = std::move(b);
    e->label = e->src->label + " + " + e->dst->label;
    return e;
}

inline ExprPtr make_map_node(Expr::Kind kind, PolyMat map, ExprPtr src, ExprPtr dst) {
    if (src->n != dst->n) throw precondition_error("map between modules over different multiplicities");
    if (src->gens <= -1 || dst->gens <= -1)
        throw precondition_error("generator-level maps need generator-backed endpoints");
    if (map.rows != dst->gens || map.cols != src->gens)
        throw precondition_error("map matrix must be gens(dst) x gens(src)");
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->n = src->n;
    e->map = std::move(map);
    e->gens = kind == Expr::Kind::Kernel ? 0 : (kind == Expr::Kind::Image ? src->gens : dst->gens);
    e->src = std::move(src);
    e->dst = std::move(dst);
    e->label = kind == Expr::Kind::Kernel ? "ker" : (kind == Expr::Kind::Image ? "im" : "coker");
    return e;
}

inline ExprPtr make_kernel(PolyMat map, ExprPtr src, ExprPtr dst) {
    return make_map_node(Expr::Kind::Kernel, std::move(map), std::move(src), std::move(dst));
}
inline ExprPtr make_image(PolyMat map, ExprPtr src, ExprPtr dst) {
    return make_map_node(Expr::Kind::Image, std::move(map), std::move(src), std::move(dst));
}
inline ExprPtr make_cokernel(PolyMat map, ExprPtr src, ExprPtr dst) {
    return make_map_node(Expr::Kind::Cokernel, std::move(map), std::move(src), std::move(dst));
}

inline ExprPtr make_dual(ExprPtr m) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Dual;
    e->n = m->n;
    e->gens = -1;  // generator count is decided at realization
    e->src = std::move(m);
    e->label = "dual(" + e->src->label + ")";
    return e;
}

/// Polynomial presentation (generators + syzygy columns), valid at every
/// precision. Embedded ideals carry their true syzygies, not the
/// x-truncation artifacts of a particular p.
inline std::optional<std::pair<int, PolyMat>> poly_pres(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Algebra:
            return std::make_pair(1, PolyMat(1, 0));
        case K::StructureO: {
            PolyMat r(1, 1);
            r.at(0, 0) = Poly::monomial(1, 0, static_cast<int>(e.i));
            return std::make_pair(1, r);
        }
        case K::Torsion: {
            PolyMat r(1, 2);
            r.at(0, 0) = Poly::monomial(1, static_cast<int>(e.k), 0);
            r.at(0, 1) = Poly::monomial(1, 0, 1);
            return std::make_pair(1, r);
        }
        case K::IdealPoint: {
            PolyMat r(2, 2);
            r.at(0, 0) = Poly::monomial(1, 0, 1);
            r.at(1, 0) = Poly::monomial(-1, static_cast<int>(e.k), 0);
            r.at(1, 1) = Poly::monomial(1, 0, 1);
            return std::make_pair(2, r);
        }
        case K::JIdeal: {
            PolyMat r(2, 2);
            r.at(0, 0) = Poly::monomial(1, 0, e.n - 1);
            r.at(1, 0) = Poly::monomial(-1, 1, 0);
            r.at(1, 1) = Poly::monomial(1, 0, 1);
            return std::make_pair(2, r);
        }
        case K::SubschemeA:
        case K::SubschemeB: {
            PolyMat r(2, 2);
            r.at(0, 0) = Poly::monomial(1, 0, 1);
            r.at(1, 0) = Poly::monomial(-1, static_cast<int>(e.ppar), 0);
            r.at(1, 1) = Poly::monomial(1, 0, 1);
            return std::make_pair(2, r);
        }
        case K::Pres:
            return std::make_pair(e.gens, e.rels);
        case K::Sum: {
            auto a = poly_pres(*e.src);
            auto b = poly_pres(*e.dst);
            if (!a || !b) return std::nullopt;
            PolyMat r(a->first + b->first, a->second.cols + b->second.cols);
            for (int i = 0; i < a->first; ++i)
                for (int j = 0; j < a->second.cols; ++j) r.at(i, j) = a->second.at(i, j);
            for (int i = 0; i < b->first; ++i)
                for (int j = 0; j < b->second.cols; ++j)
                    r.at(a->first + i, a->second.cols + j) = b->second.at(i, j);
            return std::make_pair(r.rows, r);
        }
        default:
            return std::nullopt;
    }
}

}  // namespace pmc
