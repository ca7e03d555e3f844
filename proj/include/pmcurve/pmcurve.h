/* pmcurve - exact invariants of modules on primitive multiple curves.
 *
 * C interface around the C++ engine: opaque handles, integer error codes,
 * JSON in and out. All handles are immutable after creation and safe to
 * share between threads.
 */
#ifndef PMCURVE_H
#define PMCURVE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmc_status {
    PMC_OK = 0,
    PMC_ERR_PARSE = 2,        /* malformed job / expression / polynomial */
    PMC_ERR_PRECISION = 3,    /* invariant does not stabilize at this precision */
    PMC_ERR_PRECONDITION = 4, /* violated operation precondition */
    PMC_ERR_INTERNAL = 5,     /* internal consistency defect */
    PMC_ERR_ARGUMENT = 6      /* null pointer / bad handle */
} pmc_status;

typedef struct pmc_session pmc_session; /* field configuration */
typedef struct pmc_module pmc_module;   /* module recipe bound to a session */

/* sessions ------------------------------------------------------------- */

/* Exact prime field F_q; q must be prime (32003 is the default elsewhere). */
pmc_status pmc_session_create_prime(int64_t q, pmc_session** out);

/* Exact rational arithmetic behind the same interface. */
pmc_status pmc_session_create_rationals(pmc_session** out);

void pmc_session_free(pmc_session* s);

/* modules --------------------------------------------------------------- */

/* Parse a module expression (JSON, see README) over the curve C_n. */
pmc_status pmc_module_parse(pmc_session* s, int multiplicity, const char* expr_json, pmc_module** out);

pmc_status pmc_module_sum(pmc_session* s, const pmc_module* a, const pmc_module* b, pmc_module** out);

void pmc_module_free(pmc_module* m);

/* queries; p is the working x-precision (invariants stabilize over p, 2p) */

pmc_status pmc_module_dim(pmc_session* s, const pmc_module* m, int p, int64_t* out);

pmc_status pmc_module_rank(pmc_session* s, const pmc_module* m, int p, int64_t* out);

/* filtrations, characteristic functions, quasi-free type (JSON report) */
pmc_status pmc_module_invariants(pmc_session* s, const pmc_module* m, int p, char** out_json);

/* torsion-free normal form on the double curve (JSON {ideals, free, line}) */
pmc_status pmc_module_classify(pmc_session* s, const pmc_module* m, int p, char** out_json);

pmc_status pmc_module_reflexive(pmc_session* s, const pmc_module* m, int p, int* out_bool);

/* batch jobs ------------------------------------------------------------ */

/* Run one JSON job document (the CLI's engine); output is JSON or DOT. */
pmc_status pmc_run_job(const char* job_json, char** out_text);

/* diagnostics ----------------------------------------------------------- */

/* Message for the most recent failure on this thread (NULL if none). */
const char* pmc_last_error(void);

const char* pmc_status_name(pmc_status st);

void pmc_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PMCURVE_H */
