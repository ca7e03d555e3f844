#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace pmc {

/// Precision-free polynomial in x and z with integer coefficients.
/// These are the entries of presentation matrices and equivariant maps;
/// they instantiate at any (n, p) without loss.
struct Poly {
    struct Term {
        std::int64_t coeff;
        int xdeg;
        int zdeg;
    };
    std::vector<Term> terms;

    bool is_zero() const { return terms.empty(); }

    static Poly zero() { return {}; }
    static Poly constant(std::int64_t c) {
        Poly p;
        if (c != 0) p.terms.push_back({c, 0, 0});
        return p;
    }
    static Poly monomial(std::int64_t c, int a, int b) {
        Poly p;
        if (c != 0) p.terms.push_back({c, a, b});
        return p;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms) t.coeff = -t.coeff;
        return r;
    }
};

// Grammar: poly := term (('+'|'-') term)*, term := [int] ['*'? var]*,
// var := ('x'|'z') ['^' int]. Whitespace ignored.
inline Poly parse_poly(const std::string& s) {
    Poly out;
    std::size_t i = 0;
    auto skip = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
    skip();
    if (i == s.size()) throw parse_error("empty polynomial");
    bool first = true;
    while (true) {
        skip();
        if (i == s.size()) break;
        std::int64_t sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            if (s[i] == '-') sign = -1;
            ++i;
        } else if (!first) {
            throw parse_error("expected '+' or '-' in polynomial: " + s);
        }
        first = false;
        skip();
        std::int64_t coeff = 1;
        bool saw_any = false;
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            coeff = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                coeff = coeff * 10 + (s[i++] - '0');
            saw_any = true;
        }
        int xdeg = 0, zdeg = 0;
        while (true) {
            skip();
            if (i < s.size() && s[i] == '*') { ++i; skip(); }
            if (i < s.size() && (s[i] == 'x' || s[i] == 'z')) {
                char v = s[i++];
                int d = 1;
                if (i < s.size() && s[i] == '^') {
                    ++i;
                    if (i == s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
                        throw parse_error("expected exponent in polynomial: " + s);
                    d = 0;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                        d = d * 10 + (s[i++] - '0');
                }
                if (v == 'x') xdeg += d; else zdeg += d;
                saw_any = true;
            } else {
                break;
            }
        }
        if (!saw_any) throw parse_error("malformed term in polynomial: " + s);
        if (coeff != 0) out.terms.push_back({sign * coeff, xdeg, zdeg});
    }
    return out;
}

inline std::string poly_to_string(const Poly& p) {
    if (p.terms.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : p.terms) {
        std::int64_t c = t.coeff;
        if (first) {
            if (c < 0) { s += "-"; c = -c; }
        } else {
            s += c < 0 ? " - " : " + ";
            if (c < 0) c = -c;
        }
        first = false;
        bool has_var = t.xdeg > 0 || t.zdeg > 0;
        if (c != 1 || !has_var) s += std::to_string(c);
        if (t.xdeg > 0) {
            if (c != 1) s += "*";
            s += "x";
            if (t.xdeg > 1) s += "^" + std::to_string(t.xdeg);
        }
        if (t.zdeg > 0) {
            if (c != 1 || t.xdeg > 0) s += "*";
            s += "z";
            if (t.zdeg > 1) s += "^" + std::to_string(t.zdeg);
        }
    }
    return s;
}

/// Matrix of polynomials; columns of a presentation are relations,
/// entries of a map act on generators.
struct PolyMat {
    int rows = 0, cols = 0;
    std::vector<Poly> a;

    PolyMat() = default;
    PolyMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    Poly& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Poly& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// Element of k[x]/(x^p)[z]/(z^n); coefficient of x^a z^b at index b*p + a.
template <class F>
struct RingElem {
    int n = 1, p = 1;
    std::vector<typename F::Elem> c;

    RingElem() = default;
    RingElem(int n_, int p_, const F& f) : n(n_), p(p_), c(static_cast<std::size_t>(n_) * p_, f.zero()) {}

    typename F::Elem& at(int a, int b) { return c[static_cast<std::size_t>(b) * p + a]; }
    const typename F::Elem& at(int a, int b) const { return c[static_cast<std::size_t>(b) * p + a]; }
};

template <class F>
RingElem<F> ring_from_poly(const F& f, const Poly& poly, int n, int p) {
    RingElem<F> r(n, p, f);
    for (const auto& t : poly.terms) {
        if (t.xdeg >= p || t.zdeg >= n) continue;  // truncated away
        r.at(t.xdeg, t.zdeg) = f.add(r.at(t.xdeg, t.zdeg), f.from_int(t.coeff));
    }
    return r;
}

template <class F>
bool ring_is_zero(const F& f, const RingElem<F>& a) {
    for (const auto& v : a.c)
        if (!f.is_zero(v)) return false;
    return true;
}

template <class F>
RingElem<F> ring_mul(const F& f, const RingElem<F>& a, const RingElem<F>& b) {
    RingElem<F> r(a.n, a.p, f);
    for (int b1 = 0; b1 < a.n; ++b1)
        for (int a1 = 0; a1 < a.p; ++a1) {
            if (f.is_zero(a.at(a1, b1))) continue;
            for (int b2 = 0; b2 + b1 < a.n; ++b2)
                for (int a2 = 0; a2 + a1 < a.p; ++a2) {
                    if (f.is_zero(b.at(a2, b2))) continue;
                    auto& dst = r.at(a1 + a2, b1 + b2);
                    dst = f.add(dst, f.mul(a.at(a1, b1), b.at(a2, b2)));
                }
        }
    return r;
}

template <class F>
RingElem<F> ring_add(const F& f, const RingElem<F>& a, const RingElem<F>& b) {
    RingElem<F> r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = f.add(r.c[i], b.c[i]);
    return r;
}

// Truncated series in x alone (the n = 1 case), used by the DVR reduction.
template <class F>
using Series = RingElem<F>;

template <class F>
Series<F> series_make(const F& f, int p) { return Series<F>(1, p, f); }

/// x-valuation; -1 encodes the zero series (a distinct sentinel, never p).
template <class F>
int series_valuation(const F& f, const Series<F>& s) {
    for (int a = 0; a < s.p; ++a)
        if (!f.is_zero(s.c[a])) return a;
    return -1;
}

/// Inverse of a unit (valuation 0) in k[x]/(x^p).
template <class F>
Series<F> series_inverse(const F& f, const Series<F>& u) {
    if (f.is_zero(u.c[0])) throw precondition_error("series inverse of a non-unit");
    Series<F> r = series_make(f, u.p);
    auto c0 = f.inv(u.c[0]);
    r.c[0] = c0;
    for (int k = 1; k < u.p; ++k) {
        auto acc = f.zero();
        for (int j = 1; j <= k; ++j) acc = f.add(acc, f.mul(u.c[j], r.c[k - j]));
        r.c[k] = f.neg(f.mul(c0, acc));
    }
    return r;
}

}  // namespace pmc
