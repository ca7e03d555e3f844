#include "descriptor.hpp"

namespace pmc {

RiemannRochResult rr_invariants(const SheafDescriptor& d, std::optional<long long> delta) {
    RiemannRochResult out;
    out.rank = d.rank();
    out.degree = d.degree();
    out.chi = out.degree + out.rank * (1 - d.genus);
    if (out.rank > 0) out.slope = Rational(out.degree, out.rank);
    if (delta) {
        if (*delta <= 0) throw precondition_error("Hilbert polynomial needs a positive polarization degree");
        out.hilbert = std::make_pair(out.chi, out.rank * *delta);
    }
    return out;
}

SheafDescriptor locally_free_descriptor(int n, long long r, long long deg_restriction, long long genus,
                                        long long degL) {
    if (n < 1 || r < 1) throw precondition_error("locally free descriptor needs n >= 1 and rank >= 1");
    SheafDescriptor d;
    d.n = n;
    d.genus = genus;
    d.degL = degL;
    for (int i = 1; i <= n; ++i) d.gr.push_back({r, deg_restriction + (i - 1) * r * degL});
    long long expected = n * deg_restriction + (static_cast<long long>(n) * (n - 1) / 2) * r * degL;
    if (d.degree() != expected) throw internal_error("locally free degree formula violated");
    return d;
}

SheafDescriptor ideal_points_descriptor(int n, long long genus, long long degL, long long p0) {
    if (n < 1 || p0 < 1) throw precondition_error("ideal descriptor needs n >= 1 and p0 >= 1");
    SheafDescriptor d;
    d.n = n;
    d.genus = genus;
    d.degL = degL;
    // level i < n carries (O_C(-Z) (x) L^{i-1}) (+) T_Z, level n only the line part
    for (int i = 1; i <= n; ++i) {
        long long deg = -p0 + (i - 1) * degL + (i < n ? p0 : 0);
        d.gr.push_back({1, deg});
    }
    return d;
}

bool semistability(const SheafDescriptor& sub, const SheafDescriptor& whole, bool strict) {
    long long rs = sub.rank(), rw = whole.rank();
    if (rs <= 0 || rw <= 0) throw precondition_error("semistability needs positive generalized ranks");
    // Deg(F)/R(F) <= Deg(E)/R(E), exact cross-multiplication
    boost::multiprecision::cpp_int lhs = boost::multiprecision::cpp_int(sub.degree()) * rw;
    boost::multiprecision::cpp_int rhs = boost::multiprecision::cpp_int(whole.degree()) * rs;
    return strict ? lhs < rhs : lhs <= rhs;
}

Qlf2Result qlf2_relations(QlfPair E, QlfPair F, long long degL) {
    if (F.rank < E.rank) throw precondition_error("surjectivity of Phi requires rank(F) >= rank(E)");
    Qlf2Result r;
    r.E = E;
    r.F = F;
    r.Gamma = {F.rank - E.rank, F.deg - E.deg + E.rank * degL};
    r.G = {E.rank + r.Gamma.rank, E.deg + r.Gamma.deg};
    r.total_degree = E.deg + F.deg;
    r.dual_E = {E.rank, -E.deg + 2 * E.rank * degL};
    r.dual_F = {r.G.rank, -r.G.deg + r.G.rank * degL};
    r.dual_G = {F.rank, -F.deg + F.rank * degL};
    return r;
}

QlfTensorResult qlf2_tensor(const Qlf2Result& a, const Qlf2Result& b, long long degL) {
    QlfTensorResult t;
    t.E = {a.E.rank * b.E.rank, b.E.rank * a.E.deg + a.E.rank * b.E.deg - a.E.rank * b.E.rank * degL};
    t.F = {a.F.rank * b.F.rank, b.F.rank * a.F.deg + a.F.rank * b.F.deg};
    t.G = {a.G.rank * b.G.rank, b.G.rank * a.G.deg + a.G.rank * b.G.deg - a.G.rank * b.G.rank * degL};
    return t;
}

HalvingResult rank2_degree(long long d, long long degL, long long index) {
    long long num = d - degL - index;
    HalvingResult r;
    r.parity_ok = num % 2 == 0;
    if (r.parity_ok) r.value = num / 2;
    return r;
}

HalvingResult deformation_threshold(long long d, long long degL, long long index) {
    long long num = d + degL + index;
    HalvingResult r;
    r.parity_ok = num % 2 == 0;
    if (r.parity_ok) r.value = num / 2;
    return r;
}

Rank3Result rank3_analysis(long long eps, long long gamma, long long l, long long genus) {
    if (l < 1) throw precondition_error("rank-3 analysis needs l >= 1");
    Rank3Result r;
    r.total_degree = 2 * eps + gamma + l;
    r.degF = eps + gamma + l;
    r.degG = eps + gamma;
    r.window_semistable = gamma - 2 * l <= eps && eps <= l + gamma;
    r.window_stable = gamma - 2 * l < eps && eps < l + gamma;
    r.moduli_hypothesis = gamma - l < eps && eps < gamma;
    r.moduli_dim = 5 * genus + 2 * l - 4;
    return r;
}

IdealExtResult ideal_ext_dims(int n, long long csq, long long ksc, long long p0, long long h0_a, long long h0_b,
                              long long h0_k) {
    if (n < 2) throw precondition_error("ideal Ext dimensions need n >= 2");
    if (p0 < 1) throw precondition_error("ideal Ext dimensions need p0 >= 1");
    if (h0_a < 0 || h0_b < 0 || h0_k < 0) throw precondition_error("h0 inputs must be nonnegative");
    long long nn = n;
    if ((nn * nn * csq + nn * ksc) % 2 != 0)
        throw precondition_error("n^2 C^2 / 2 + n K_S C / 2 is not an integer");
    if ((csq + ksc) % 2 != 0)
        throw precondition_error("C^2 + K_S C must be even (integral genus)");
    IdealExtResult r;
    r.dim_ext_cn = 1 + (nn * nn * csq + nn * ksc) / 2 + p0 + h0_a;
    r.dim_ext_s = 1 + nn * nn * csq + h0_a + h0_b + h0_k;
    r.end_dim = 1 + h0_a;
    // h0(O_C(-Z) (x) L^{-n}) via Riemann-Roch and Serre duality
    long long h0_neg = -p0 + ((2 * nn - 1) * csq - ksc) / 2 + h0_b;
    r.codim = ((nn - 1) * (nn - 1) * csq - (nn - 1) * ksc) / 2 + h0_neg + h0_k;
    return r;
}

}  // namespace pmc
