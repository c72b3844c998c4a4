/* parsemble — ensemble resume parsing library.
 *
 * C API over the C++ core: opaque handles, status codes, and JSON/JSONL
 * strings. All returned char* buffers are heap-allocated and must be released
 * with parsemble_string_free(). Error details for the calling thread are
 * available via parsemble_last_error().
 */
#ifndef PARSEMBLE_H
#define PARSEMBLE_H

#include <stdint.h>

#if defined(_WIN32)
#define PARSEMBLE_API __declspec(dllexport)
#else
#define PARSEMBLE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum parsemble_status {
  PARSEMBLE_OK = 0,
  PARSEMBLE_ERR_IO = 1,               /* filesystem problems */
  PARSEMBLE_ERR_PARSE = 2,            /* malformed JSON / JSONL input */
  PARSEMBLE_ERR_SCHEMA = 3,           /* JSON that does not fit the resume schema */
  PARSEMBLE_ERR_CONFIG = 4,           /* invalid configuration or weights */
  PARSEMBLE_ERR_BACKEND = 5,          /* extractor backend failure */
  PARSEMBLE_ERR_INVALID_ARGUMENT = 6, /* null handle or missing argument */
  PARSEMBLE_ERR_INTERNAL = 7
} parsemble_status;

typedef struct parsemble_ontology parsemble_ontology; /* skill synonym table */
typedef struct parsemble_corpus parsemble_corpus;     /* documents + gold resumes */
typedef struct parsemble_panel parsemble_panel;       /* configured extractor backends */

PARSEMBLE_API const char* parsemble_version(void);

/* Message for the most recent failure on this thread; never NULL. */
PARSEMBLE_API const char* parsemble_last_error(void);

PARSEMBLE_API void parsemble_string_free(char* s);

/* ---- ontology ---------------------------------------------------------- */

PARSEMBLE_API parsemble_status parsemble_ontology_builtin(parsemble_ontology** out);

/* File format: {"case_insensitive": bool, "map": {"variant": "canonical", ...}} */
PARSEMBLE_API parsemble_status parsemble_ontology_load(const char* path,
                                                       parsemble_ontology** out);
PARSEMBLE_API void parsemble_ontology_free(parsemble_ontology* ontology);

/* ---- corpus ------------------------------------------------------------ */

/* options_json (optional, may be NULL):
 *   {"date_format_variation": 0..1, "skill_synonym_rate": 0..1,
 *    "field_omission_rate": 0..1, "edge_case_rate": 0..1}
 */
PARSEMBLE_API parsemble_status parsemble_corpus_generate(uint64_t n, uint64_t seed,
                                                         const char* options_json,
                                                         parsemble_corpus** out);

/* JSONL, one {"id", "raw_text", "gold", ["profession"]} object per line.
 * ontology may be NULL (built-in is used for gold normalization). */
PARSEMBLE_API parsemble_status parsemble_corpus_load(const char* path,
                                                     const parsemble_ontology* ontology,
                                                     parsemble_corpus** out);

/* metadata_path may be NULL; when given and the corpus was generated, the
 * per-entry noise provenance sidecar is written there. */
PARSEMBLE_API parsemble_status parsemble_corpus_save(const parsemble_corpus* corpus,
                                                     const char* path,
                                                     const char* metadata_path);

/* split_json (optional): {"train": 0.8, "validation": 0.1, "test": 0.1,
 *                         "seed": 42, "stratify": true} */
PARSEMBLE_API parsemble_status parsemble_corpus_split(const parsemble_corpus* corpus,
                                                      const char* split_json,
                                                      parsemble_corpus** train,
                                                      parsemble_corpus** validation,
                                                      parsemble_corpus** test);

PARSEMBLE_API uint64_t parsemble_corpus_size(const parsemble_corpus* corpus);
PARSEMBLE_API void parsemble_corpus_free(parsemble_corpus* corpus);

/* ---- extraction panel --------------------------------------------------- */

/* config_json:
 *   {"backends": [{"type": "mock", "model_id": ..., "seed": ...,
 *                  "default_error_rate": ..., "default_corruption_kind": ...,
 *                  "per_field_error_rate": {...}, "corruption_kind": {...}}
 *                 | {"type": "endpoint", "model_id": ..., "base_url": ...,
 *                    "api_key_env_var": ..., "path": ..., "timeout_ms": ...,
 *                    "max_retries": ..., "prompt_template_per_field": {...}}],
 *    "consensus": {"type": "endpoint", ...} | {"type": "fallback"}}
 * gold_source is required when any backend is a mock. */
PARSEMBLE_API parsemble_status parsemble_panel_create(const char* config_json,
                                                      const parsemble_corpus* gold_source,
                                                      const parsemble_ontology* ontology,
                                                      parsemble_panel** out);
PARSEMBLE_API parsemble_status parsemble_panel_load(const char* config_path,
                                                    const parsemble_corpus* gold_source,
                                                    const parsemble_ontology* ontology,
                                                    parsemble_panel** out);
PARSEMBLE_API void parsemble_panel_free(parsemble_panel* panel);

/* ---- pipeline ----------------------------------------------------------- */

/* options_json:
 *   {"weights": {"model": w, ...} | "calibrate",
 *    "parallelism": 1, "audit": false, "rs_weights": {...}}
 * predictions_jsonl receives one {"id", "prediction", ["failures"]} line per
 * document. audit_jsonl (optional out, requires "audit": true) receives one
 * {"id", "votes": [7 field votes]} line per aggregated document. */
PARSEMBLE_API parsemble_status parsemble_run_parse(const parsemble_panel* panel,
                                                   const parsemble_corpus* corpus,
                                                   const char* options_json,
                                                   char** predictions_jsonl,
                                                   char** audit_jsonl);

/* rs_weights_json (optional): {"skills": 0.35, "email": 0.15, ...} — partial
 * overrides of the default weighting; must still total 1. */
PARSEMBLE_API parsemble_status parsemble_evaluate(const char* predictions_jsonl,
                                                  const parsemble_corpus* gold,
                                                  const parsemble_ontology* ontology,
                                                  const char* rs_weights_json,
                                                  char** report_json);

/* labeled_reports_json: [{"label": ..., "report": <report_json>}, ...] */
PARSEMBLE_API parsemble_status parsemble_report_table(const char* labeled_reports_json,
                                                      char** table_text);

/* options_json (optional):
 *   {"grid": [{"model": w, ...}, ...], "rs_weights": {...}, "parallelism": 1}
 * An empty/absent grid uses every weight vector in {1,2,3}^k. table_text may
 * be NULL; when given it receives the grid trace sorted by RS. */
PARSEMBLE_API parsemble_status parsemble_calibrate(const parsemble_panel* panel,
                                                   const parsemble_corpus* validation,
                                                   const char* options_json, char** result_json,
                                                   char** table_text);

/* ---- primitives --------------------------------------------------------- */

/* Parses resume JSON, fills placeholders, normalizes (dates, skills), and
 * returns the canonical serialization. */
PARSEMBLE_API parsemble_status parsemble_normalize_resume(const char* resume_json,
                                                          const parsemble_ontology* ontology,
                                                          char** normalized_json);

/* Recovers the first JSON object from raw model output (fences, prose,
 * trailing commas). */
PARSEMBLE_API parsemble_status parsemble_repair_json(const char* raw, char** repaired);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PARSEMBLE_H */
