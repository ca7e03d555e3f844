#include "job.hpp"

#include <optional>

#include "serialize.hpp"

namespace pmc {

namespace {

struct JobHeader {
    Json field_desc;
    int n = 2;
    int precision = 6;
    long long seed = 0;
    std::string emit = "json";
    std::string command;
};

JobHeader parse_header(const Json& job) {
    JobHeader h;
    h.field_desc = Json{{"kind", "prime"}, {"q", 32003}};
    if (job.contains("field")) {
        const auto& fd = job.at("field");
        if (fd.is_object() && fd.contains("kind")) {
            std::string k = fd.at("kind").get<std::string>();
            if (k == "prime")
                h.field_desc = Json{{"kind", "prime"}, {"q", json_int_or(fd, "q", 32003)}};
            else if (k == "rationals")
                h.field_desc = Json{{"kind", "rationals"}};
            else
                throw parse_error("unknown field kind '" + k + "'");
        } else {
            throw parse_error("'field' must be an object with a 'kind'");
        }
    }
    h.n = static_cast<int>(json_int_or(job, "multiplicity", 2));
    h.precision = static_cast<int>(json_int_or(job, "precision", 6));
    h.seed = json_int_or(job, "seed", 0);
    if (job.contains("emit")) h.emit = job.at("emit").get<std::string>();
    if (h.emit != "json" && h.emit != "dot") throw parse_error("emit must be 'json' or 'dot'");
    if (!job.contains("command") || !job.at("command").is_string())
        throw parse_error("job needs a 'command' string");
    h.command = job.at("command").get<std::string>();
    return h;
}

Json smith_to_json(const std::vector<long>& vals, int zero_rows, int zero_cols, bool verified) {
    Json j;
    j["valuations"] = vals;
    j["zero_rows"] = zero_rows;
    j["zero_cols"] = zero_cols;
    j["transforms_verified"] = verified;
    return j;
}

Resolution parse_resolution(const Json& job, int n) {
    if (!job.contains("target")) throw parse_error("resolution command needs a 'target'");
    const auto& t = job.at("target");
    int length = static_cast<int>(json_int_or(job, "length", 4));
    std::string kind = t.at("kind").get<std::string>();
    if (kind == "structure") return resolution_of(ResolutionTarget::Structure, json_int(t, "i"), n, length);
    if (kind == "torsion") return resolution_of(ResolutionTarget::TorsionOnDouble, json_int(t, "i"), n, length);
    if (kind == "ideal") return resolution_of(ResolutionTarget::IdealStalk, 0, n, length);
    throw parse_error("unknown resolution target '" + kind + "'");
}

Json resolution_to_json(const Resolution& res) {
    Json j;
    j["target"] = res.target;
    j["f0"] = res.f0;
    Json ds = Json::array();
    for (const auto& d : res.d) {
        Json mat = Json::array();
        for (int i = 0; i < d.rows; ++i) {
            Json row = Json::array();
            for (int c = 0; c < d.cols; ++c) row.push_back(poly_to_string(d.at(i, c)));
            mat.push_back(row);
        }
        ds.push_back(mat);
    }
    j["differentials"] = ds;
    return j;
}

QfType parse_type(const Json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("quasi-free type must be a nonempty array");
    QfType t;
    for (const auto& v : j) t.push_back(v.get<long>());
    return t;
}

// field-generic command execution
template <class F>
Json run_engine_command(const F& f, const JobHeader& h, const Json& job, std::string& dot_out) {
    Ctx<F> ctx(f);
    const int p = h.precision;
    const std::string& cmd = h.command;
    Json out;

    auto module_expr = [&](const char* key = "module") {
        if (!job.contains(key)) throw parse_error(std::string("command needs a '") + key + "' expression");
        return parse_expr(job.at(key), h.n);
    };

    if (cmd == "module") {
        auto e = module_expr();
        out = instance_to_json(f, *ctx.realize(e, p), h.field_desc);
    } else if (cmd == "rank") {
        auto e = module_expr();
        out["rank"] = generalized_rank(ctx, e, p);
    } else if (cmd == "invariants") {
        auto e = module_expr();
        auto lo = ctx.realize(e, p);
        auto hi = ctx.realize(e, 2 * p);
        auto r1 = first_filtration(ctx, e, p);
        auto r2 = second_filtration(ctx, e, p);
        out["dim"] = lo->dim();
        out["dim_2p"] = hi->dim();
        out["rank"] = generalized_rank(ctx, e, p);
        out["index"] = report_torsion_total(FiltrationReport{r1.which, r1.chain, {r1.graded[0]}});
        out["torsion_total"] = report_torsion_total(r1);
        out["naive_min_generators"] = naive_min_generators(f, *lo);
        auto qf = quasi_free_type(ctx, e, p);
        out["quasi_free_type"] = qf ? Json(*qf) : Json(nullptr);
        out["first"] = report_to_json(r1);
        out["second"] = report_to_json(r2);
        out["char_first"] = char_function(r1);
        out["char_second"] = char_function(r2);
    } else if (cmd == "classify") {
        if (job.contains("module")) {
            out = nf_to_json(classify_torsion_free(ctx, module_expr(), p));
        } else {
            if (!job.contains("N")) throw parse_error("classify needs 'module' or 'N' + 'T'");
            auto n_type = parse_type(job.at("N"));
            std::vector<long> torsion;
            if (job.contains("T"))
                for (const auto& v : job.at("T")) torsion.push_back(v.get<long>());
            long gens_n = 0;
            for (long v : n_type) gens_n += v;
            PolyMat pi(static_cast<int>(torsion.size()), static_cast<int>(gens_n));
            if (job.contains("map")) {
                pi = parse_poly_matrix(job.at("map"));
            } else {
                if (static_cast<long>(torsion.size()) > gens_n)
                    throw precondition_error("default projection needs at least one generator per torsion factor");
                for (int i = 0; i < static_cast<int>(torsion.size()); ++i) pi.at(i, i) = Poly::constant(1);
            }
            out = nf_to_json(classify_kernel(ctx, n_type, torsion, pi, p));
        }
    } else if (cmd == "nf_invariants") {
        auto nf = parse_nf(job.at("nf"));
        auto inv = nf_invariants(nf);
        out["rank"] = inv.rank;
        out["index"] = inv.index;
        out["char_first"] = inv.char_first;
        Json g = Json::array();
        for (std::size_t i = 0; i < inv.graded_rank.size(); ++i)
            g.push_back(Json{{"rank", inv.graded_rank[i]}, {"torsion", inv.graded_torsion[i]}});
        out["graded"] = g;
    } else if (cmd == "nf_realize") {
        auto nf = parse_nf(job.at("nf"));
        out = instance_to_json(f, *ctx.realize(nf_realize_expr(nf), p), h.field_desc);
    } else if (cmd == "reflexive") {
        out["reflexive"] = reflexivity_check(ctx, module_expr(), p);
    } else if (cmd == "dual") {
        auto e = make_dual(module_expr("module"));
        auto lo = ctx.realize(e, p);
        out["dim"] = lo->dim();
        out["dim_2p"] = ctx.realize(e, 2 * p)->dim();
        out["rank"] = generalized_rank(ctx, e, p);
        if (h.n == 2) out["nf"] = nf_to_json(classify_torsion_free(ctx, e, p));
    } else if (cmd == "smith") {
        auto A = parse_series_matrix(f, job.at("matrix"), p);
        auto sm = dvr_smith(f, A);
        auto prod = series_mat_mul(f, series_mat_mul(f, sm.left, A), sm.right);
        bool ok = true;
        for (std::size_t i = 0; i < prod.a.size(); ++i) {
            for (int c = 0; c < prod.p && ok; ++c)
                if (!f.is_zero(f.sub(prod.a[i].c[c], sm.reduced.a[i].c[c]))) ok = false;
        }
        out = smith_to_json(sm.diag_valuations, sm.zero_rows, sm.zero_cols, ok);
    } else if (cmd == "classify_extension") {
        auto A = parse_series_matrix(f, job.at("matrix"), p);
        out = nf_to_json(classify_extension(f, A));
    } else if (cmd == "resolution") {
        auto res = parse_resolution(job, h.n);
        check_resolution(ctx, res, p);
        out = resolution_to_json(res);
        out["checks"] = Json{{"composition_zero", true}, {"stage_defects_stable", true}, {"augmentation_match", true}};
    } else if (cmd == "ext") {
        auto res = parse_resolution(job, h.n);
        auto N = module_expr();
        int maxdeg = static_cast<int>(json_int_or(job, "max_degree", 2));
        auto reports = ext_dims(ctx, res, N, maxdeg, p);
        Json arr = Json::array();
        for (const auto& r : reports)
            arr.push_back(Json{{"dim_p", r.dim_p}, {"dim_2p", r.dim_2p}, {"slope", r.slope}, {"stable", r.stable}});
        out["target"] = res.target;
        out["ext"] = arr;
    } else if (cmd == "connecting") {
        long i = json_int(job, "i");
        out["i"] = i;
        out["vanishes"] = connecting_map_vanishing(ctx, i, p);
    } else if (cmd == "obstruction") {
        auto A = parse_series_matrix(f, job.at("matrix"), p);
        out["square_zero"] = obstruction_square(f, A);
    } else {
        throw parse_error("unknown command '" + cmd + "'");
    }
    (void)dot_out;
    return out;
}

// commands that do not need the field
std::optional<Json> run_symbolic_command(const JobHeader& h, const Json& job, std::string& dot_out) {
    const std::string& cmd = h.command;
    Json out;
    if (cmd == "riemann_roch") {
        auto d = parse_descriptor(job.at("descriptor"));
        std::optional<long long> delta;
        if (job.contains("delta")) delta = json_int(job, "delta");
        out["descriptor"] = descriptor_to_json(d);
        out["rr"] = rr_to_json(rr_invariants(d, delta));
    } else if (cmd == "locally_free_descriptor") {
        auto d = locally_free_descriptor(static_cast<int>(json_int(job, "n")), json_int(job, "rank"),
                                         json_int(job, "deg"), json_int(job, "genus"), json_int(job, "degL"));
        out = descriptor_to_json(d);
        out["rr"] = rr_to_json(rr_invariants(d, std::nullopt));
    } else if (cmd == "ideal_points_descriptor") {
        auto d = ideal_points_descriptor(static_cast<int>(json_int(job, "n")), json_int(job, "genus"),
                                         json_int(job, "degL"), json_int(job, "points"));
        out = descriptor_to_json(d);
        out["rr"] = rr_to_json(rr_invariants(d, std::nullopt));
    } else if (cmd == "semistability") {
        auto sub = parse_descriptor(job.at("sub"));
        auto whole = parse_descriptor(job.at("whole"));
        bool strict = job.contains("strict") && job.at("strict").get<bool>();
        out["semistable"] = semistability(sub, whole, strict);
        out["strict"] = strict;
    } else if (cmd == "qlf2") {
        auto pair = [&](const char* key) {
            const auto& a = job.at(key);
            return QlfPair{a.at(0).get<long long>(), a.at(1).get<long long>()};
        };
        auto r = qlf2_relations(pair("E"), pair("F"), json_int(job, "degL"));
        auto emit_pair = [](const QlfPair& q) { return Json::array({q.rank, q.deg}); };
        out["E"] = emit_pair(r.E);
        out["F"] = emit_pair(r.F);
        out["Gamma"] = emit_pair(r.Gamma);
        out["G"] = emit_pair(r.G);
        out["degree"] = r.total_degree;
        out["dual"] = Json{{"E", emit_pair(r.dual_E)}, {"F", emit_pair(r.dual_F)}, {"G", emit_pair(r.dual_G)}};
        if (job.contains("tensor_with")) {
            const auto& tw = job.at("tensor_with");
            auto r2 = qlf2_relations(QlfPair{tw.at("E").at(0).get<long long>(), tw.at("E").at(1).get<long long>()},
                                     QlfPair{tw.at("F").at(0).get<long long>(), tw.at("F").at(1).get<long long>()},
                                     json_int(job, "degL"));
            auto t = qlf2_tensor(r, r2, json_int(job, "degL"));
            out["tensor"] = Json{{"E", emit_pair(t.E)}, {"F", emit_pair(t.F)}, {"G", emit_pair(t.G)}};
        }
    } else if (cmd == "rank2") {
        auto r = rank2_degree(json_int(job, "d"), json_int(job, "degL"), json_int(job, "index"));
        out["parity_ok"] = r.parity_ok;
        if (r.parity_ok) out["degE"] = r.value;
    } else if (cmd == "deformation_threshold") {
        auto r = deformation_threshold(json_int(job, "d"), json_int(job, "degL"), json_int(job, "index"));
        out["parity_ok"] = r.parity_ok;
        if (r.parity_ok) out["degV"] = r.value;
    } else if (cmd == "rank3") {
        auto r = rank3_analysis(json_int(job, "eps"), json_int(job, "gamma"), json_int(job, "l"),
                                json_int(job, "genus"));
        out["degree"] = r.total_degree;
        out["degF"] = r.degF;
        out["degG"] = r.degG;
        out["window_semistable"] = r.window_semistable;
        out["window_stable"] = r.window_stable;
        out["moduli_hypothesis"] = r.moduli_hypothesis;
        out["moduli_dim"] = r.moduli_dim;
    } else if (cmd == "ideal_ext") {
        auto r = ideal_ext_dims(static_cast<int>(json_int(job, "n")), json_int(job, "csq"), json_int(job, "ksc"),
                                json_int(job, "p0"), json_int(job, "h0_a"), json_int(job, "h0_b"),
                                json_int(job, "h0_k"));
        out["dim_ext_cn"] = r.dim_ext_cn;
        out["dim_ext_s"] = r.dim_ext_s;
        out["codim"] = r.codim;
        out["end_dim"] = r.end_dim;
        out["identity_holds"] = r.dim_ext_s - r.dim_ext_cn == r.codim;
    } else if (cmd == "deforms") {
        out["deforms"] = deforms_to(parse_type(job.at("from")), parse_type(job.at("to")));
    } else if (cmd == "char_order") {
        auto a = parse_type(job.at("a"));
        auto b = parse_type(job.at("b"));
        auto o = char_order(a, b);
        out["order"] = o == TypeOrder::Below    ? "below"
                       : o == TypeOrder::Equal  ? "equal"
                       : o == TypeOrder::Above  ? "above"
                                                : "incomparable";
        if (char_order_conjectural(static_cast<int>(a.size()))) out["provenance"] = "conjecture-5.3.1";
    } else if (cmd == "poset") {
        auto P = type_poset(json_int(job, "rank"), static_cast<int>(json_int_or(job, "n", h.n)));
        if (h.emit == "dot") {
            dot_out = poset_to_dot(P);
            return Json();
        }
        Json nodes = Json::array();
        for (const auto& nd : P.nodes) nodes.push_back(nd);
        Json edges = Json::array();
        for (const auto& e : P.edges) edges.push_back(Json::array({e.first, e.second}));
        out["nodes"] = nodes;
        out["edges"] = edges;
        out["maximal"] = P.maximal;
        if (char_order_conjectural(P.n)) out["provenance"] = "conjecture-5.3.1";
    } else {
        return std::nullopt;
    }
    return out;
}

}  // namespace

std::string run_job_text(const std::string& job_json) {
    Json job;
    try {
        job = Json::parse(job_json);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("invalid job JSON: ") + e.what());
    }
    if (!job.is_object()) throw parse_error("job must be a JSON object");
    auto h = parse_header(job);

    std::string dot_out;
    Json result;
    if (auto sym = run_symbolic_command(h, job, dot_out)) {
        result = *sym;
    } else {
        if (h.field_desc.at("kind") == "prime") {
            PrimeField f(h.field_desc.at("q").get<std::int64_t>());
            result = run_engine_command(f, h, job, dot_out);
        } else {
            RationalField f;
            result = run_engine_command(f, h, job, dot_out);
        }
    }
    if (!dot_out.empty()) return dot_out;

    Json report;
    Json prov;
    prov["field"] = h.field_desc.at("kind");
    prov["q"] = h.field_desc.contains("q") ? h.field_desc.at("q") : Json(nullptr);
    prov["precision"] = h.precision;
    prov["seed"] = h.seed;
    prov["multiplicity"] = h.n;
    report["provenance"] = prov;
    report["command"] = h.command;
    report["result"] = result;
    return report.dump(2) + "\n";
}

}  // namespace pmc
