#include "pmcurve/pmcurve.h"

#include <cstring>
#include <string>
#include <variant>

#include "job.hpp"
#include "serialize.hpp"

using namespace pmc;

struct pmc_session {
    std::variant<PrimeField, RationalField> field;
};

struct pmc_module {
    ExprPtr expr;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
pmc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return PMC_OK;
    } catch (const parse_error& e) {
        g_last_error = e.what();
        return PMC_ERR_PARSE;
    } catch (const precision_error& e) {
        g_last_error = e.what();
        return PMC_ERR_PRECISION;
    } catch (const precondition_error& e) {
        g_last_error = e.what();
        return PMC_ERR_PRECONDITION;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PMC_ERR_INTERNAL;
    }
}

template <class Fn>
pmc_status with_field(pmc_session* s, Fn&& fn) {
    return guarded([&] { std::visit([&](const auto& f) { fn(f); }, s->field); });
}

}  // namespace

extern "C" {

pmc_status pmc_session_create_prime(int64_t q, pmc_session** out) {
    if (!out) return PMC_ERR_ARGUMENT;
    return guarded([&] { *out = new pmc_session{PrimeField(q)}; });
}

pmc_status pmc_session_create_rationals(pmc_session** out) {
    if (!out) return PMC_ERR_ARGUMENT;
    return guarded([&] { *out = new pmc_session{RationalField()}; });
}

void pmc_session_free(pmc_session* s) { delete s; }

pmc_status pmc_module_parse(pmc_session* s, int multiplicity, const char* expr_json, pmc_module** out) {
    if (!s || !expr_json || !out) return PMC_ERR_ARGUMENT;
    return guarded([&] {
        Json j;
        try {
            j = Json::parse(expr_json);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("invalid expression JSON: ") + e.what());
        }
        *out = new pmc_module{parse_expr(j, multiplicity)};
    });
}

pmc_status pmc_module_sum(pmc_session* s, const pmc_module* a, const pmc_module* b, pmc_module** out) {
    if (!s || !a || !b || !out) return PMC_ERR_ARGUMENT;
    return guarded([&] { *out = new pmc_module{make_sum(a->expr, b->expr)}; });
}

void pmc_module_free(pmc_module* m) { delete m; }

pmc_status pmc_module_dim(pmc_session* s, const pmc_module* m, int p, int64_t* out) {
    if (!s || !m || !out) return PMC_ERR_ARGUMENT;
    return with_field(s, [&](const auto& f) {
        Ctx<std::decay_t<decltype(f)>> ctx(f);
        *out = ctx.realize(m->expr, p)->dim();
    });
}

pmc_status pmc_module_rank(pmc_session* s, const pmc_module* m, int p, int64_t* out) {
    if (!s || !m || !out) return PMC_ERR_ARGUMENT;
    return with_field(s, [&](const auto& f) {
        Ctx<std::decay_t<decltype(f)>> ctx(f);
        *out = generalized_rank(ctx, m->expr, p);
    });
}

pmc_status pmc_module_invariants(pmc_session* s, const pmc_module* m, int p, char** out_json) {
    if (!s || !m || !out_json) return PMC_ERR_ARGUMENT;
    return with_field(s, [&](const auto& f) {
        Ctx<std::decay_t<decltype(f)>> ctx(f);
        auto r1 = first_filtration(ctx, m->expr, p);
        auto r2 = second_filtration(ctx, m->expr, p);
        Json out;
        out["dim"] = ctx.realize(m->expr, p)->dim();
        out["rank"] = generalized_rank(ctx, m->expr, p);
        auto qf = quasi_free_type(ctx, m->expr, p);
        out["quasi_free_type"] = qf ? Json(*qf) : Json(nullptr);
        out["first"] = report_to_json(r1);
        out["second"] = report_to_json(r2);
        out["char_first"] = char_function(r1);
        out["char_second"] = char_function(r2);
        *out_json = dup_string(out.dump(2) + "\n");
    });
}

pmc_status pmc_module_classify(pmc_session* s, const pmc_module* m, int p, char** out_json) {
    if (!s || !m || !out_json) return PMC_ERR_ARGUMENT;
    return with_field(s, [&](const auto& f) {
        Ctx<std::decay_t<decltype(f)>> ctx(f);
        auto nf = classify_torsion_free(ctx, m->expr, p);
        *out_json = dup_string(nf_to_json(nf).dump(2) + "\n");
    });
}

pmc_status pmc_module_reflexive(pmc_session* s, const pmc_module* m, int p, int* out_bool) {
    if (!s || !m || !out_bool) return PMC_ERR_ARGUMENT;
    return with_field(s, [&](const auto& f) {
        Ctx<std::decay_t<decltype(f)>> ctx(f);
        *out_bool = reflexivity_check(ctx, m->expr, p) ? 1 : 0;
    });
}

pmc_status pmc_run_job(const char* job_json, char** out_text) {
    if (!job_json || !out_text) return PMC_ERR_ARGUMENT;
    return guarded([&] { *out_text = dup_string(run_job_text(job_json)); });
}

const char* pmc_last_error(void) { return g_last_error.empty() ? nullptr : g_last_error.c_str(); }

const char* pmc_status_name(pmc_status st) {
    switch (st) {
        case PMC_OK: return "ok";
        case PMC_ERR_PARSE: return "parse error";
        case PMC_ERR_PRECISION: return "precision insufficient";
        case PMC_ERR_PRECONDITION: return "precondition violation";
        case PMC_ERR_INTERNAL: return "internal defect";
        case PMC_ERR_ARGUMENT: return "invalid argument";
    }
    return "unknown";
}

void pmc_string_free(char* s) { delete[] s; }

}  // extern "C"
