#pragma once

#include <string>

#include <json.hpp>

#include "deform.hpp"
#include "descriptor.hpp"
#include "filtration.hpp"
#include "homology.hpp"
#include "module.hpp"
#include "normal_form.hpp"

namespace pmc {

using Json = nlohmann::ordered_json;

// ---- parsing ----

inline long long json_int(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw parse_error("expected integer field '" + key + "'");
    return j.at(key).get<long long>();
}

inline long long json_int_or(const Json& j, const std::string& key, long long dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer()) throw parse_error("expected integer field '" + key + "'");
    return j.at(key).get<long long>();
}

inline PolyMat parse_poly_matrix(const Json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("expected a nonempty matrix of polynomials");
    int rows = static_cast<int>(j.size());
    int cols = -1;
    for (const auto& r : j) {
        if (!r.is_array()) throw parse_error("matrix rows must be arrays");
        if (cols < 0) cols = static_cast<int>(r.size());
        if (static_cast<int>(r.size()) != cols) throw parse_error("ragged matrix");
    }
    PolyMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) {
            const auto& cell = j.at(i).at(c);
            if (cell.is_string())
                m.at(i, c) = parse_poly(cell.get<std::string>());
            else if (cell.is_number_integer())
                m.at(i, c) = Poly::constant(cell.get<long long>());
            else
                throw parse_error("matrix entries must be polynomial strings or integers");
        }
    return m;
}

inline ExprPtr parse_expr(const Json& j, int n) {
    if (!j.is_object() || !j.contains("kind")) throw parse_error("module expression needs a 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "algebra") return make_algebra(n);
    if (kind == "structure") return make_structure(n, json_int(j, "i"));
    if (kind == "torsion") return make_torsion(n, json_int(j, "k"));
    if (kind == "ideal_point") return make_ideal_point(n, json_int(j, "k"));
    if (kind == "j_ideal") return make_j_ideal(n);
    if (kind == "subscheme_a") return make_subscheme_a(n, json_int(j, "p"), json_int(j, "q"));
    if (kind == "subscheme_b")
        return make_subscheme_b(n, json_int(j, "p"), json_int(j, "q"), json_int(j, "m"),
                                json_int_or(j, "alpha", 1));
    if (kind == "zero") return make_zero(n);
    if (kind == "presentation") {
        int gens = static_cast<int>(json_int(j, "gens"));
        PolyMat rels(gens, 0);
        if (j.contains("relations") && !j.at("relations").empty()) rels = parse_poly_matrix(j.at("relations"));
        if (rels.rows != gens) throw parse_error("relations must have one row per generator");
        return make_pres(n, gens, std::move(rels));
    }
    if (kind == "sum") {
        if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty())
            throw parse_error("sum needs a nonempty 'terms' array");
        ExprPtr acc;
        for (const auto& t : j.at("terms")) {
            auto e = parse_expr(t, n);
            acc = acc ? make_sum(acc, e) : e;
        }
        return acc;
    }
    if (kind == "kernel" || kind == "image" || kind == "cokernel") {
        auto src = parse_expr(j.at("src"), n);
        auto dst = parse_expr(j.at("dst"), n);
        auto map = parse_poly_matrix(j.at("map"));
        if (kind == "kernel") return make_kernel(std::move(map), src, dst);
        if (kind == "image") return make_image(std::move(map), src, dst);
        return make_cokernel(std::move(map), src, dst);
    }
    if (kind == "dual") return make_dual(parse_expr(j.at("of"), n));
    throw parse_error("unknown module expression kind '" + kind + "'");
}

inline TorsionFreeNF parse_nf(const Json& j) {
    TorsionFreeNF nf;
    if (j.contains("ideals"))
        for (const auto& v : j.at("ideals")) nf.ideals.push_back(v.get<long>());
    std::sort(nf.ideals.rbegin(), nf.ideals.rend());
    nf.m_free = json_int_or(j, "free", 0);
    nf.q_line = json_int_or(j, "line", 0);
    for (long v : nf.ideals)
        if (v < 1) throw precondition_error("normal form ideals need exponents >= 1");
    if (nf.m_free < 0 || nf.q_line < 0) throw precondition_error("normal form multiplicities must be >= 0");
    return nf;
}

inline SheafDescriptor parse_descriptor(const Json& j) {
    SheafDescriptor d;
    d.n = static_cast<int>(json_int(j, "n"));
    d.genus = json_int(j, "genus");
    d.degL = json_int_or(j, "degL", 0);
    if (!j.contains("gr") || !j.at("gr").is_array() || static_cast<int>(j.at("gr").size()) != d.n)
        throw parse_error("descriptor needs a 'gr' array of length n");
    for (const auto& lev : j.at("gr")) {
        if (!lev.is_array() || lev.size() != 2) throw parse_error("descriptor levels are [rank, degree] pairs");
        long long r = lev.at(0).get<long long>();
        if (r < 0) throw precondition_error("descriptor ranks must be >= 0");
        d.gr.push_back({r, lev.at(1).get<long long>()});
    }
    return d;
}

template <class F>
SeriesMat<F> parse_series_matrix(const F& f, const Json& j, int p) {
    auto pm = parse_poly_matrix(j);
    SeriesMat<F> m(pm.rows, pm.cols, p, f);
    for (int i = 0; i < pm.rows; ++i)
        for (int c = 0; c < pm.cols; ++c) {
            for (const auto& t : pm.at(i, c).terms)
                if (t.zdeg != 0) throw precondition_error("series matrix entries are polynomials in x only");
            m.at(i, c) = ring_from_poly(f, pm.at(i, c), 1, p);
        }
    return m;
}

// ---- emission ----

inline Json nf_to_json(const TorsionFreeNF& nf) {
    Json j;
    j["ideals"] = nf.ideals;
    j["free"] = nf.m_free;
    j["line"] = nf.q_line;
    return j;
}

inline Json cx_to_json(const CxInvariants& c) {
    Json j;
    j["rank"] = c.rank;
    j["torsion"] = c.torsion;
    return j;
}

inline Json report_to_json(const FiltrationReport& r) {
    Json j;
    j["which"] = r.which == '1' ? "first" : "second";
    j["chain"] = r.chain;
    Json g = Json::array();
    for (const auto& c : r.graded) g.push_back(cx_to_json(c));
    j["graded"] = g;
    return j;
}

template <class F>
Json instance_to_json(const F& f, const Instance<F>& m, const Json& field_desc) {
    Json j;
    j["n"] = m.n;
    j["p"] = m.p;
    j["q"] = field_desc.contains("q") ? field_desc.at("q") : Json(nullptr);
    j["dim"] = m.dim();
    auto mat = [&](const Mat<F>& M) {
        Json rows = Json::array();
        for (int i = 0; i < M.rows; ++i) {
            Json row = Json::array();
            for (int c = 0; c < M.cols; ++c) {
                if constexpr (F::is_prime_field)
                    row.push_back(M.at(i, c));
                else
                    row.push_back(f.to_string(M.at(i, c)));
            }
            rows.push_back(row);
        }
        return rows;
    };
    j["X"] = mat(m.X);
    j["Z"] = mat(m.Z);
    return j;
}

inline Json descriptor_to_json(const SheafDescriptor& d) {
    Json j;
    j["n"] = d.n;
    j["genus"] = d.genus;
    j["degL"] = d.degL;
    Json gr = Json::array();
    for (auto& lev : d.gr) gr.push_back(Json::array({lev.first, lev.second}));
    j["gr"] = gr;
    j["rank"] = d.rank();
    j["degree"] = d.degree();
    return j;
}

inline Json rr_to_json(const RiemannRochResult& r) {
    Json j;
    j["rank"] = r.rank;
    j["degree"] = r.degree;
    if (r.slope)
        j["slope"] = r.slope->str();
    else
        j["slope"] = nullptr;
    j["chi"] = r.chi;
    if (r.hilbert) j["hilbert"] = Json::array({r.hilbert->first, r.hilbert->second});
    return j;
}

}  // namespace pmc
