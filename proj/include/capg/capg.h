/*
 * capg — model CVE exploits as attack-position constraints, combine them
 * with a declarative information-system model, and query the resulting
 * attack-positions graph.
 *
 * C API conventions:
 *   - every function returns a capg_status; CAPG_OK means success;
 *   - handles (capg_records, capg_infra, capg_graph) are opaque and freed
 *     with their *_free function; freeing NULL is a no-op;
 *   - all text in and out is UTF-8; strings the library returns are
 *     heap-allocated and released with capg_string_free;
 *   - `out_report_json` parameters, where present, receive a JSON object
 *     {"errors": [...], "warnings": [...]} describing what happened. A
 *     report may accompany both success (warnings) and failure (errors).
 *     Pass NULL for any out parameter you do not care about;
 *   - handles are immutable once created, so sharing one across threads
 *     for concurrent reads is safe.
 */
#ifndef CAPG_CAPG_H
#define CAPG_CAPG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum capg_status {
    CAPG_OK = 0,
    CAPG_ERR_ARGUMENT = 1,   /* NULL handle, bad flag value, ... */
    CAPG_ERR_PARSE = 2,      /* text does not decode */
    CAPG_ERR_VALIDATION = 3, /* decoded but violates invariants */
    CAPG_ERR_SEMANTICS = 4,  /* vuln class mismatch, unresolved destination */
    CAPG_ERR_QUERY = 5,      /* unknown position, unreachable target */
    CAPG_ERR_DERIVATION = 6, /* population could not derive a record */
    CAPG_ERR_INTERNAL = 7
} capg_status;

typedef struct capg_records_s capg_records; /* a parsed CAPG record list */
typedef struct capg_infra_s capg_infra;     /* an information-system model */
typedef struct capg_graph_s capg_graph;     /* an attack-positions graph */

const char* capg_version(void);
const char* capg_status_name(capg_status status);
void capg_string_free(char* text);

/* ---- CAPG documents -------------------------------------------------- */

/* Parses a CAPG document (one record object or an array). `lenient` != 0
 * demotes unknown fields to warnings. */
capg_status capg_records_parse(const char* text, int lenient, capg_records** out_records,
                               char** out_report_json);

/* Canonical serialization: fixed field order, 4-space indent, trailing
 * newline. Byte-identical for equal inputs. */
capg_status capg_records_serialize(const capg_records* records, char** out_text);

size_t capg_records_count(const capg_records* records);
void capg_records_free(capg_records* records);

/* Validates every record of a document without rejecting it; the report
 * lists all violations per record. Returns CAPG_OK even when the document
 * has errors (inspect the report). */
capg_status capg_validate_document(const char* text, int lenient, char** out_report_json);

/* ---- information-system model ---------------------------------------- */

capg_status capg_infra_load(const char* text, capg_infra** out_infra, char** out_report_json);
capg_status capg_infra_save(const capg_infra* infra, char** out_text);
void capg_infra_free(capg_infra* infra);

/* ---- attack-positions graph ------------------------------------------ */

/* Fixpoint construction from the model's entry positions. Unresolvable
 * record/vuln pairs are skipped and reported as warnings. */
capg_status capg_graph_build(const capg_infra* infra, const capg_records* records,
                             capg_graph** out_graph, char** out_report_json);

size_t capg_graph_node_count(const capg_graph* graph);
size_t capg_graph_edge_count(const capg_graph* graph);

capg_status capg_graph_to_dot(const capg_graph* graph, char** out_text);
capg_status capg_graph_to_json(const capg_graph* graph, char** out_text);
capg_status capg_graph_from_json(const char* text, capg_graph** out_graph,
                                 char** out_report_json);

/* Positions reachable from `position` ("user@machine", or
 * "attacker@internet" for the external position), as a JSON array of
 * position labels. */
capg_status capg_graph_reachable(const capg_graph* graph, const char* position,
                                 char** out_json);

/* All simple attack paths from the entry positions to `target`, ranked.
 * max_len bounds the edge count per path; 0 means no explicit bound (the
 * node count). rank_key is "length" or "severity"; severity ranking uses
 * `severity_json`, an object mapping CVE ids to base scores (pass NULL or
 * "{}" when unknown; ranking then falls back to length). Returns
 * CAPG_ERR_QUERY when the target is absent or unreachable. */
capg_status capg_graph_paths(const capg_graph* graph, const char* target, size_t max_len,
                             const char* rank_key, const char* severity_json,
                             char** out_paths_json);

void capg_graph_free(capg_graph* graph);

/* ---- population ------------------------------------------------------ */

/* Derives a one-record CAPG document from recorded trial evidence.
 * `transcript_json` follows the transcript format described in the README.
 * On success `out_document` holds the serialized record. */
capg_status capg_populate(const char* cve, const char* exploit_url, const char* cpe,
                          const char* transcript_json, char** out_document,
                          char** out_report_json);

/* Extracts {"cve", "cpes", "cvss": {"vector", "base_score"}} from a locally
 * stored NVD API 2.0 single-CVE document. */
capg_status capg_nvd_extract(const char* nvd_text, char** out_summary_json);

/* Advisory CVSS consistency lint. `nvd_summaries_json` is a JSON array of
 * summaries as produced by capg_nvd_extract; records are matched by CVE
 * id. The report's warnings carry the findings; records without NVD data
 * are listed under "unmatched". */
capg_status capg_lint(const char* capg_text, const char* nvd_summaries_json,
                      char** out_report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CAPG_CAPG_H */
