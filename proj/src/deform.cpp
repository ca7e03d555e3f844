#include "deform.hpp"

#include <algorithm>

namespace pmc {

long type_rank(const QfType& t) {
    long r = 0;
    for (std::size_t i = 0; i < t.size(); ++i) r += static_cast<long>(i + 1) * t[i];
    return r;
}

std::vector<long> type_char_function(const QfType& t) {
    int n = static_cast<int>(t.size());
    // r_i = sum_{j >= i} m_j; F(k) = sum_{i > n-k} r_i
    std::vector<long> r(n + 2, 0);
    for (int i = n; i >= 1; --i) r[i] = r[i + 1] + t[i - 1];
    std::vector<long> F(n + 1, 0);
    for (int k = 1; k <= n; ++k) F[k] = F[k - 1] + r[n + 1 - k];
    return F;
}

bool deforms_to(const QfType& from, const QfType& to) {
    if (from.size() != 2 || to.size() != 2)
        throw precondition_error("deformation predicate is proved for n = 2 only; use char_order (conjectural)");
    if (type_rank(from) != type_rank(to)) return false;
    return to[1] >= from[1];
}

TypeOrder char_order(const QfType& a, const QfType& b) {
    if (a.size() != b.size()) throw precondition_error("types live over different multiplicities");
    for (long v : a)
        if (v < 0) throw precondition_error("negative multiplicity in type");
    for (long v : b)
        if (v < 0) throw precondition_error("negative multiplicity in type");
    if (type_rank(a) != type_rank(b)) return TypeOrder::Incomparable;
    auto fa = type_char_function(a);
    auto fb = type_char_function(b);
    bool le = true, ge = true;
    for (std::size_t k = 0; k < fa.size(); ++k) {
        if (fa[k] > fb[k]) le = false;
        if (fa[k] < fb[k]) ge = false;
    }
    if (le && ge) return TypeOrder::Equal;
    if (le) return TypeOrder::Below;
    if (ge) return TypeOrder::Above;
    return TypeOrder::Incomparable;
}

namespace {

void enumerate_types(long remaining, int part, QfType& cur, std::vector<QfType>& out) {
    int n = static_cast<int>(cur.size());
    if (part > n) {
        if (remaining == 0) out.push_back(cur);
        return;
    }
    if (part == n) {
        if (remaining % n == 0) {
            cur[part - 1] = remaining / n;
            out.push_back(cur);
            cur[part - 1] = 0;
        }
        return;
    }
    for (long m = 0; m * part <= remaining; ++m) {
        cur[part - 1] = m;
        enumerate_types(remaining - m * part, part + 1, cur, out);
    }
    cur[part - 1] = 0;
}

}  // namespace

TypePoset type_poset(long rank, int n) {
    if (rank < 1 || n < 2) throw precondition_error("type poset needs rank >= 1 and n >= 2");
    TypePoset P;
    P.n = n;
    P.rank = rank;
    QfType cur(n, 0);
    enumerate_types(rank, 1, cur, P.nodes);
    std::sort(P.nodes.begin(), P.nodes.end());
    int N = static_cast<int>(P.nodes.size());
    std::vector<std::vector<bool>> lt(N, std::vector<bool>(N, false));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j && char_order(P.nodes[i], P.nodes[j]) == TypeOrder::Below) lt[i][j] = true;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (!lt[i][j]) continue;
            bool covering = true;
            for (int k = 0; k < N && covering; ++k)
                if (lt[i][k] && lt[k][j]) covering = false;
            if (covering) P.edges.push_back({i, j});
        }
    for (int i = 0; i < N; ++i) {
        bool maximal = true;
        for (int j = 0; j < N && maximal; ++j)
            if (lt[i][j]) maximal = false;
        if (maximal) {
            if (P.maximal >= 0) throw internal_error("deformation poset has multiple maximal nodes");
            P.maximal = i;
        }
    }
    // the unique maximal node is the generic type q*O_n (+) O_m
    QfType generic(n, 0);
    generic[n - 1] = rank / n;
    if (rank % n) generic[rank % n - 1] += 1;
    if (P.maximal < 0 || P.nodes[P.maximal] != generic)
        throw internal_error("deformation poset maximum is not the generic type");
    return P;
}

std::string type_to_string(const QfType& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

std::string poset_to_dot(const TypePoset& p) {
    std::string s = "digraph deformation_poset {\n";
    for (const auto& nd : p.nodes) s += "  \"" + type_to_string(nd) + "\";\n";
    for (const auto& e : p.edges)
        s += "  \"" + type_to_string(p.nodes[e.first]) + "\" -> \"" + type_to_string(p.nodes[e.second]) + "\";\n";
    s += "}\n";
    return s;
}

}  // namespace pmc
