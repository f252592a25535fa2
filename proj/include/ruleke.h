/* C interface to the rule-based knowledge editing library.
 *
 * Conventions:
 *   - Every fallible call returns rk_status; RK_OK means the out-parameters
 *     are valid. On failure rk_last_error() holds a message for the calling
 *     thread until its next library call.
 *   - Handles are opaque and freed with their rk_*_free function. Freeing
 *     NULL is a no-op. A handle created from another (rk_oracle_from_kb)
 *     borrows it: the source must outlive the derived handle.
 *   - Strings returned through char** out-parameters are heap copies owned
 *     by the caller; release them with rk_string_free.
 */
#ifndef RULEKE_H
#define RULEKE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rk_status {
  RK_OK = 0,
  RK_ERR_IO = 1,        /* file missing or unreadable/unwritable */
  RK_ERR_PARSE = 2,     /* malformed input, message names file:line */
  RK_ERR_INVALID = 3,   /* argument outside its domain */
  RK_ERR_NOT_FOUND = 4, /* lookup target absent */
  RK_ERR_CONFLICT = 5,  /* inconsistent data, e.g. alias sets colliding */
  RK_ERR_INTERNAL = 6,  /* unexpected failure, message has details */
} rk_status;

/* Message for the last failure on this thread; "" when none. The pointer is
 * valid until the thread's next library call. */
const char* rk_last_error(void);

/* Library version as "major.minor.patch". */
const char* rk_version(void);

void rk_string_free(char* s);

typedef struct rk_kb rk_kb;
typedef struct rk_rules rk_rules;
typedef struct rk_edits rk_edits;
typedef struct rk_templates rk_templates;
typedef struct rk_dataset rk_dataset;
typedef struct rk_oracle rk_oracle;

/* ---------- knowledge base ---------- */

/* Triples file: subject<TAB>relation<TAB>object per line, '#' comments.
 * Alias file (optional, pass NULL to skip): canonical<TAB>alias... */
rk_status rk_kb_load(const char* triples_path, const char* aliases_path, rk_kb** out);
rk_status rk_kb_save(const rk_kb* kb, const char* path);
void rk_kb_free(rk_kb* kb);

size_t rk_kb_fact_count(const rk_kb* kb);
size_t rk_kb_entity_count(const rk_kb* kb);
size_t rk_kb_relation_count(const rk_kb* kb);

/* ---------- rules ---------- */

/* Rule file: one "body1(z0,z1) & body2(z1,z2) -> head(z0,z2)" per line,
 * optional " @support" suffix. */
rk_status rk_rules_load(const char* path, rk_rules** out);
rk_status rk_rules_save(const rk_rules* rules, const char* path);
void rk_rules_free(rk_rules* rules);

size_t rk_rules_count(const rk_rules* rules);
/* Text of rule `index` in file syntax. */
rk_status rk_rules_render(const rk_rules* rules, size_t index, char** out);

/* Mine length-2 composition rules from the graph. jobs = 0 picks the
 * hardware concurrency. */
rk_status rk_rules_mine(const rk_kb* kb, size_t min_support, double min_confidence,
                        size_t jobs, rk_rules** out);

/* ---------- edits ---------- */

/* Edits file: one JSON object per line with fields relation, subject,
 * old_object (string or null), new_object. */
rk_status rk_edits_load(const char* path, rk_edits** out);
rk_status rk_edits_save(const rk_edits* edits, const char* path);
void rk_edits_free(rk_edits* edits);

size_t rk_edits_count(const rk_edits* edits);

/* ---------- knowledge oracle ---------- */

/* Answers about the pre-edit world, standing in for a language model.
 * query_object: the object of relation(subject, .), as a malloc'd string
 * the library free()s, or NULL when unknown. query_subjects: a malloc'd
 * NULL-terminated array of malloc'd subject strings with relation(., object);
 * NULL or an empty array when none. The library frees array and elements. */
typedef struct rk_oracle_callbacks {
  char* (*query_object)(void* user, const char* subject, const char* relation);
  char** (*query_subjects)(void* user, const char* relation, const char* object);
  void* user;
} rk_oracle_callbacks;

/* Graph-plus-rule-closure oracle; kb and rules must outlive it. */
rk_status rk_oracle_from_kb(const rk_kb* kb, const rk_rules* rules, rk_oracle** out);
/* Custom backend; the callbacks struct is copied, its targets must stay
 * valid for the oracle's lifetime. */
rk_status rk_oracle_from_callbacks(const rk_oracle_callbacks* callbacks, rk_oracle** out);
void rk_oracle_free(rk_oracle* oracle);

/* ---------- augmentation ---------- */

typedef struct rk_augment_options {
  double delta;      /* activation threshold, default 0.8 */
  double theta;      /* retrieval threshold, default 0.7 */
  int fixpoint;      /* rescan derived edits until closure, default 0 */
  size_t max_rounds; /* extra fixpoint passes allowed, default 10 */
} rk_augment_options;
void rk_augment_options_init(rk_augment_options* opts);

typedef struct rk_augment_stats {
  size_t originals;
  size_t derived;
  double growth_ratio;
  size_t oracle_misses;
  size_t ambiguous_inverses;
  size_t empties;
  size_t conflicts;
  size_t rounds;
} rk_augment_stats;

/* Build the augmented edit set: originals in order, then the facts derived
 * through activated rules as introduction edits. The kb supplies aliases;
 * oracle NULL means the kb-plus-rules closure oracle. opts NULL means
 * defaults. stats may be NULL. */
rk_status rk_augment(const rk_kb* kb, const rk_rules* rules, const rk_edits* edits,
                     const rk_oracle* oracle, const rk_augment_options* opts,
                     rk_edits** out, rk_augment_stats* stats);

/* ---------- benchmark ---------- */

/* Template file: relation<TAB>domain<TAB>range<TAB>wh<TAB>phrase rows; the
 * phrase nests through an [S] slot. */
rk_status rk_templates_load(const char* path, rk_templates** out);
void rk_templates_free(rk_templates* templates);

typedef struct rk_generation_options {
  uint64_t seed;                /* default 0 */
  size_t max_hops;              /* questions cycle 2..max_hops, default 4 */
  int allow_ambiguous;          /* right edits sit on many-to-1 inverses, default 0 */
  double delta;                 /* default 0.8 */
  double theta;                 /* default 0.7 */
  size_t attempts_per_instance; /* default 500 */
} rk_generation_options;
void rk_generation_options_init(rk_generation_options* opts);

/* Generate no_edit+left_edit+right_edit+both_edit instances. Shortfalls are
 * reported in *warnings (newline-separated, may be NULL) and still RK_OK. */
rk_status rk_dataset_generate(const rk_kb* kb, const rk_rules* rules,
                              const rk_templates* templates, size_t no_edit, size_t left_edit,
                              size_t right_edit, size_t both_edit,
                              const rk_generation_options* opts, rk_dataset** out,
                              char** warnings);

/* Dataset file: one JSON instance per line. */
rk_status rk_dataset_load(const char* path, rk_dataset** out);
rk_status rk_dataset_save(const rk_dataset* dataset, const char* path);
void rk_dataset_free(rk_dataset* dataset);

size_t rk_dataset_count(const rk_dataset* dataset);
/* Per-scenario, per-hop counts as a JSON document. */
rk_status rk_dataset_stats_json(const rk_dataset* dataset, char** out);

/* ---------- evaluation ---------- */

typedef struct rk_experiment_options {
  size_t batch;   /* instances whose edits share one memory; 0 = all, default 0 */
  double delta;   /* default 0.8 */
  double theta;   /* default 0.7 */
  int augmented;  /* solve against the augmented memory, default 1 */
  int fixpoint;   /* default 0 */
  uint64_t seed;  /* batch shuffle seed, default 0 */
  size_t jobs;    /* parallel batches, 0 picks hardware concurrency, default 1 */
  int timings;    /* fill wall_time_seconds; off keeps output byte-stable, default 0 */
} rk_experiment_options;
void rk_experiment_options_init(rk_experiment_options* opts);

/* Run the batched experiment and return the report. report_json and
 * report_csv may each be NULL when that form is not wanted. */
rk_status rk_evaluate(const rk_kb* kb, const rk_rules* rules, const rk_dataset* dataset,
                      const rk_experiment_options* opts, char** report_json,
                      char** report_csv);

/* One augmented run per delta; rows come back as "delta,accuracy,growth_ratio"
 * CSV with a header. The augmented flag in opts is ignored. */
rk_status rk_sweep(const rk_kb* kb, const rk_rules* rules, const rk_dataset* dataset,
                   const double* deltas, size_t delta_count,
                   const rk_experiment_options* opts, char** csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RULEKE_H */
