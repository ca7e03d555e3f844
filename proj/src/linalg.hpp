#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace pmc {

template <class F>
struct Mat {
    using E = typename F::Elem;
    int rows = 0, cols = 0;
    std::vector<E> a;

    Mat() = default;
    Mat(int r, int c, const F& f) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, f.zero()) {}
    E& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const E& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int d, const F& f) {
        Mat m(d, d, f);
        for (int i = 0; i < d; ++i) m.at(i, i) = f.one();
        return m;
    }
};

template <class F>
using Vec = std::vector<typename F::Elem>;

template <class F>
Mat<F> mat_mul(const F& f, const Mat<F>& A, const Mat<F>& B) {
    Mat<F> C(A.rows, B.cols, f);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const auto& aik = A.at(i, k);
            if (f.is_zero(aik)) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = f.add(C.at(i, j), f.mul(aik, B.at(k, j)));
        }
    return C;
}

// operator M applied to a row-stored vector: out[i] = sum_j M[i][j] v[j]
template <class F>
Vec<F> mat_apply(const F& f, const Mat<F>& M, const Vec<F>& v) {
    Vec<F> out(M.rows, f.zero());
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) {
            if (f.is_zero(M.at(i, j))) continue;
            out[i] = f.add(out[i], f.mul(M.at(i, j), v[j]));
        }
    return out;
}

template <class F>
bool vec_is_zero(const F& f, const Vec<F>& v) {
    for (const auto& x : v)
        if (!f.is_zero(x)) return false;
    return true;
}

/// In-place row reduction to reduced row echelon form; returns pivot columns.
template <class F>
std::vector<int> rref(const F& f, Mat<F>& M) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < M.cols && r < M.rows; ++c) {
        int sel = -1;
        for (int i = r; i < M.rows; ++i)
            if (!f.is_zero(M.at(i, c))) { sel = i; break; }
        if (sel < 0) continue;
        if (sel != r)
            for (int j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(r, j));
        auto piv_inv = f.inv(M.at(r, c));
        for (int j = c; j < M.cols; ++j) M.at(r, j) = f.mul(M.at(r, j), piv_inv);
        for (int i = 0; i < M.rows; ++i) {
            if (i == r || f.is_zero(M.at(i, c))) continue;
            auto factor = M.at(i, c);
            for (int j = c; j < M.cols; ++j)
                M.at(i, j) = f.sub(M.at(i, j), f.mul(factor, M.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/// Row-stored basis of a subspace of k^dim, kept in rref for canonicity.
template <class F>
struct Subspace {
    int ambient = 0;
    Mat<F> basis;               // rank × ambient, rref rows
    std::vector<int> pivots;

    int dim() const { return basis.rows; }
};

template <class F>
Subspace<F> row_space(const F& f, Mat<F> M) {
    auto piv = rref(f, M);
    Subspace<F> s;
    s.ambient = M.cols;
    s.pivots = piv;
    s.basis = Mat<F>(static_cast<int>(piv.size()), M.cols, f);
    for (int i = 0; i < s.basis.rows; ++i)
        for (int j = 0; j < M.cols; ++j) s.basis.at(i, j) = M.at(i, j);
    return s;
}

template <class F>
Subspace<F> zero_subspace(const F& f, int ambient) {
    Subspace<F> s;
    s.ambient = ambient;
    s.basis = Mat<F>(0, ambient, f);
    return s;
}

template <class F>
int mat_rank(const F& f, Mat<F> M) {
    return static_cast<int>(rref(f, M).size());
}

/// Reduce v modulo the subspace (rref rows); residual is canonical.
template <class F>
Vec<F> reduce_mod(const F& f, const Subspace<F>& s, Vec<F> v) {
    for (int i = 0; i < s.basis.rows; ++i) {
        const auto& c = v[s.pivots[i]];
        if (f.is_zero(c)) continue;
        auto factor = c;
        for (int j = 0; j < s.ambient; ++j)
            v[j] = f.sub(v[j], f.mul(factor, s.basis.at(i, j)));
    }
    return v;
}

template <class F>
bool subspace_contains(const F& f, const Subspace<F>& s, const Vec<F>& v) {
    return vec_is_zero(f, reduce_mod(f, s, v));
}

template <class F>
bool subspace_equal(const F& f, const Subspace<F>& a, const Subspace<F>& b) {
    if (a.dim() != b.dim() || a.ambient != b.ambient) return false;
    for (int i = 0; i < a.basis.rows; ++i) {
        Vec<F> v(a.basis.a.begin() + static_cast<std::size_t>(i) * a.ambient,
                 a.basis.a.begin() + static_cast<std::size_t>(i + 1) * a.ambient);
        if (!subspace_contains(f, b, v)) return false;
    }
    return true;
}

template <class F>
Subspace<F> subspace_sum(const F& f, const Subspace<F>& a, const Subspace<F>& b) {
    Mat<F> M(a.dim() + b.dim(), a.ambient, f);
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.ambient; ++j) M.at(i, j) = a.basis.at(i, j);
    for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < a.ambient; ++j) M.at(a.dim() + i, j) = b.basis.at(i, j);
    return row_space(f, std::move(M));
}

/// Coordinates of v in an rref basis; throws if v is outside the span.
template <class F>
Vec<F> express_in_basis(const F& f, const Subspace<F>& s, Vec<F> v) {
    Vec<F> coords(s.dim(), f.zero());
    for (int i = 0; i < s.basis.rows; ++i) {
        const auto c = v[s.pivots[i]];
        if (f.is_zero(c)) continue;
        coords[i] = c;
        for (int j = 0; j < s.ambient; ++j)
            v[j] = f.sub(v[j], f.mul(c, s.basis.at(i, j)));
    }
    if (!vec_is_zero(f, v)) throw internal_error("vector not contained in claimed invariant subspace");
    return coords;
}

/// Incrementally maintained rref row basis; insert is O(rank * ambient).
template <class F>
struct RrefBuilder {
    int ambient = 0;
    std::vector<Vec<F>> rows;
    std::vector<int> pivots;  // sorted ascending, parallel to rows

    RrefBuilder() = default;
    explicit RrefBuilder(int amb) : ambient(amb) {}

    // returns the reduced representative if independent, empty optional otherwise
    std::optional<Vec<F>> insert(const F& f, Vec<F> v) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& c = v[pivots[i]];
            if (f.is_zero(c)) continue;
            auto factor = c;
            for (int j = 0; j < ambient; ++j) v[j] = f.sub(v[j], f.mul(factor, rows[i][j]));
        }
        int piv = -1;
        for (int j = 0; j < ambient; ++j)
            if (!f.is_zero(v[j])) { piv = j; break; }
        if (piv < 0) return std::nullopt;
        auto inv = f.inv(v[piv]);
        for (int j = piv; j < ambient; ++j) v[j] = f.mul(v[j], inv);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& c = rows[i][piv];
            if (f.is_zero(c)) continue;
            auto factor = c;
            for (int j = 0; j < ambient; ++j) rows[i][j] = f.sub(rows[i][j], f.mul(factor, v[j]));
        }
        auto pos = std::lower_bound(pivots.begin(), pivots.end(), piv) - pivots.begin();
        pivots.insert(pivots.begin() + pos, piv);
        rows.insert(rows.begin() + pos, v);
        return v;
    }

    Subspace<F> finish(const F& f) const {
        Subspace<F> s;
        s.ambient = ambient;
        s.pivots = pivots;
        s.basis = Mat<F>(static_cast<int>(rows.size()), ambient, f);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < ambient; ++j) s.basis.at(static_cast<int>(i), j) = rows[i][j];
        return s;
    }
};

/// Basis (rows) of { v : M v = 0 }, v a column vector.
template <class F>
Mat<F> kernel_basis(const F& f, const Mat<F>& M) {
    Mat<F> R = M;
    auto piv = rref(f, R);
    std::vector<char> is_piv(M.cols, 0);
    for (std::size_t i = 0; i < piv.size(); ++i) is_piv[piv[i]] = 1;
    std::vector<int> free_cols;
    for (int j = 0; j < M.cols; ++j)
        if (!is_piv[j]) free_cols.push_back(j);
    Mat<F> K(static_cast<int>(free_cols.size()), M.cols, f);
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        int fc = free_cols[k];
        K.at(static_cast<int>(k), fc) = f.one();
        for (std::size_t i = 0; i < piv.size(); ++i)
            K.at(static_cast<int>(k), piv[i]) = f.neg(R.at(static_cast<int>(i), fc));
    }
    return K;
}

/// Particular solution of M x = b (column sense), if consistent.
template <class F>
std::optional<Vec<F>> solve(const F& f, const Mat<F>& M, const Vec<F>& b) {
    Mat<F> Aug(M.rows, M.cols + 1, f);
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j) Aug.at(i, j) = M.at(i, j);
        Aug.at(i, M.cols) = b[i];
    }
    auto piv = rref(f, Aug);
    Vec<F> x(M.cols, f.zero());
    for (std::size_t i = 0; i < piv.size(); ++i) {
        if (piv[i] == M.cols) return std::nullopt;  // inconsistent
        x[piv[i]] = Aug.at(static_cast<int>(i), M.cols);
    }
    return x;
}

/// Quotient of k^ambient by a subspace, coordinatized on non-pivot columns.
template <class F>
struct QuotientMap {
    Subspace<F> denom;
    std::vector<int> keep;

    int dim() const { return static_cast<int>(keep.size()); }
};

template <class F>
QuotientMap<F> make_quotient(const F&, Subspace<F> denom) {
    QuotientMap<F> q;
    std::vector<char> is_piv(denom.ambient, 0);
    for (int c : denom.pivots) is_piv[c] = 1;
    for (int j = 0; j < denom.ambient; ++j)
        if (!is_piv[j]) q.keep.push_back(j);
    q.denom = std::move(denom);
    return q;
}

template <class F>
Vec<F> quotient_project(const F& f, const QuotientMap<F>& q, const Vec<F>& v) {
    Vec<F> r = reduce_mod(f, q.denom, v);
    Vec<F> out(q.keep.size(), f.zero());
    for (std::size_t k = 0; k < q.keep.size(); ++k) out[k] = r[q.keep[k]];
    return out;
}

template <class F>
Vec<F> quotient_lift(const F& f, const QuotientMap<F>& q, const Vec<F>& coords) {
    Vec<F> v(q.denom.ambient, f.zero());
    for (std::size_t k = 0; k < q.keep.size(); ++k) v[q.keep[k]] = coords[k];
    return v;
}

/// Matrix of an ambient operator Op on the quotient k^D / denom.
template <class F>
Mat<F> quotient_operator(const F& f, const QuotientMap<F>& q, const Mat<F>& Op) {
    int d = q.dim();
    Mat<F> M(d, d, f);
    for (int j = 0; j < d; ++j) {
        Vec<F> e(q.keep.size(), f.zero());
        e[j] = f.one();
        auto img = quotient_project(f, q, mat_apply(f, Op, quotient_lift(f, q, e)));
        for (int i = 0; i < d; ++i) M.at(i, j) = img[i];
    }
    return M;
}

/// Matrix of an ambient operator restricted to an invariant subspace
/// (coordinates in the rref basis rows).
template <class F>
Mat<F> restrict_operator(const F& f, const Subspace<F>& s, const Mat<F>& Op) {
    int d = s.dim();
    Mat<F> M(d, d, f);
    for (int j = 0; j < d; ++j) {
        Vec<F> row(s.basis.a.begin() + static_cast<std::size_t>(j) * s.ambient,
                   s.basis.a.begin() + static_cast<std::size_t>(j + 1) * s.ambient);
        auto coords = express_in_basis(f, s, mat_apply(f, Op, row));
        for (int i = 0; i < d; ++i) M.at(i, j) = coords[i];
    }
    return M;
}

/// Jordan block sizes (descending) of a nilpotent operator.
template <class F>
std::vector<long> nilpotent_partition(const F& f, const Mat<F>& X) {
    int d = X.rows;
    if (d == 0) return {};
    std::vector<long> ker_dims{0};
    Mat<F> P = Mat<F>::identity(d, f);
    while (true) {
        P = mat_mul(f, X, P);
        long k = d - mat_rank(f, P);
        ker_dims.push_back(k);
        if (k == d) break;
        if (static_cast<int>(ker_dims.size()) > d + 1)
            throw precondition_error("operator is not nilpotent");
    }
    // #blocks of size >= j equals ker_dims[j] - ker_dims[j-1]
    std::vector<long> counts;
    for (std::size_t j = 1; j < ker_dims.size(); ++j) counts.push_back(ker_dims[j] - ker_dims[j - 1]);
    std::vector<long> part;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        long next = j + 1 < counts.size() ? counts[j + 1] : 0;
        for (long c = 0; c < counts[j] - next; ++c) part.push_back(static_cast<long>(j + 1));
    }
    std::sort(part.rbegin(), part.rend());
    return part;
}

}  // namespace pmc
