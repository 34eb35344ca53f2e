/*
 * advprompt C API.
 *
 * Opaque handles own their memory; free each with its *_free function.
 * Every call returns an advp_status; on failure, advp_last_error() returns a
 * message for the calling thread that stays valid until that thread's next
 * API call.
 */
#ifndef ADVPROMPT_ADVPROMPT_H
#define ADVPROMPT_ADVPROMPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADVP_BUILDING_LIBRARY)
#define ADVP_API __attribute__((visibility("default")))
#else
#define ADVP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1 and 2 double as the CLI exit codes. */
typedef enum advp_status {
  ADVP_OK = 0,
  ADVP_ERR_CONFIG = 1,           /* malformed config, bad flag value */
  ADVP_ERR_ORACLE = 2,           /* oracle unavailable or protocol violation */
  ADVP_ERR_INVALID_ARGUMENT = 3, /* null handle, out-of-domain argument */
  ADVP_ERR_IO = 4,               /* unreadable input or unwritable output */
  ADVP_ERR_INTERNAL = 5
} advp_status;

typedef struct advp_config advp_config;
typedef struct advp_run advp_run;
typedef struct advp_freq_table advp_freq_table;

ADVP_API const char* advp_version(void);
ADVP_API const char* advp_last_error(void);
ADVP_API const char* advp_status_name(advp_status status);

/* ---- configuration ---- */

ADVP_API advp_status advp_config_load_file(const char* path, advp_config** out);
ADVP_API advp_status advp_config_load_string(const char* json, advp_config** out);
ADVP_API void advp_config_free(advp_config* cfg);

/* Returns 1 and stores the seed when the config carries one, else 0. */
ADVP_API int advp_config_get_seed(const advp_config* cfg, uint64_t* seed);
ADVP_API advp_status advp_config_set_seed(advp_config* cfg, uint64_t seed);
/* kind is "sim" or "http". */
ADVP_API advp_status advp_config_set_oracle(advp_config* cfg, const char* kind);
ADVP_API const char* advp_config_oracle(const advp_config* cfg);
ADVP_API advp_status advp_config_set_endpoint(advp_config* cfg, const char* base_url);
ADVP_API advp_status advp_config_set_population(advp_config* cfg, size_t population);
ADVP_API advp_status advp_config_set_asr_threshold(advp_config* cfg, double beta);
ADVP_API advp_status advp_config_set_awsr(advp_config* cfg, int enabled);
ADVP_API const char* advp_config_target_label(const advp_config* cfg);

/* ---- runs ---- */

/*
 * Runs the evolutionary attack. When out_dir is non-null, config.json,
 * run.jsonl (flushed per generation) and result.json are written there.
 * The config must carry a seed. On ADVP_ERR_ORACLE *out still receives the
 * partial run (termination reason "oracle_failure") and the artifacts are
 * written; on other errors *out is null.
 */
ADVP_API advp_status advp_run_attack(const advp_config* cfg, const char* out_dir, advp_run** out);
/* Random-word control: one generation of N random individuals. */
ADVP_API advp_status advp_run_baseline(const advp_config* cfg, const char* out_dir, advp_run** out);
ADVP_API void advp_run_free(advp_run* run);

/* "max_generations", "asr_threshold" or "oracle_failure". */
ADVP_API const char* advp_run_termination_reason(const advp_run* run);
ADVP_API uint64_t advp_run_seed(const advp_run* run);
ADVP_API size_t advp_run_generation_count(const advp_run* run);
ADVP_API size_t advp_run_total_queries(const advp_run* run);
ADVP_API size_t advp_run_distinct_prompts(const advp_run* run);
ADVP_API advp_status advp_run_generation_stats(const advp_run* run, size_t generation,
                                               double* mean_asr, double* best_asr,
                                               double* mean_fitness, double* best_fitness);
ADVP_API size_t advp_run_word_space_size(const advp_run* run);

/* ---- analysis ---- */

/* Aggregates every logged individual of the given runs (run.jsonl files or
 * run directories) and keeps those with asr >= threshold. */
ADVP_API advp_status advp_analyze_runs(const char* const* run_paths, size_t n_paths,
                                       double threshold, advp_freq_table** out);
ADVP_API advp_status advp_freq_table_load(const char* path, advp_freq_table** out);
/* Writes freq.json and freq.txt into out_dir. */
ADVP_API advp_status advp_freq_table_write(const advp_freq_table* table, const char* out_dir);
ADVP_API size_t advp_freq_table_sample_size(const advp_freq_table* table);
/* Rank-th most frequent word of an attribute (rank 0 = top), or null. */
ADVP_API const char* advp_freq_table_word(const advp_freq_table* table, const char* attribute,
                                          size_t rank, double* frequency);
ADVP_API void advp_freq_table_free(advp_freq_table* table);

/* Builds zero-shot prompts from the table over cfg's template (defaults from
 * the config's zero_shot_defaults) and writes them, one per line, to
 * out_path. *count receives the number of prompts. */
ADVP_API advp_status advp_zero_shot(const advp_config* cfg, const advp_freq_table* table,
                                    size_t top_n, size_t cap, const char* out_path,
                                    size_t* count);

/* Scores a JSONL file of {"id","predicted"} against target_label and writes
 * report.json to out_path. */
ADVP_API advp_status advp_eval_images(const char* jsonl_path, const char* target_label,
                                      const char* out_path, double* asr);

#ifdef __cplusplus
}
#endif

#endif /* ADVPROMPT_ADVPROMPT_H */
