#include "advprompt/advprompt.h"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "advprompt/analysis.hpp"
#include "advprompt/config.hpp"
#include "advprompt/errors.hpp"
#include "advprompt/ga.hpp"
#include "advprompt/runlog.hpp"

struct advp_config {
  advprompt::AttackConfig cfg;
  std::string oracle_name;
};

struct advp_run {
  advprompt::RunResult result;
};

struct advp_freq_table {
  advprompt::FreqTable table;
};

namespace {

thread_local std::string g_last_error;

advp_status fail(advp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Maps engine exceptions onto status codes.
template <class F>
advp_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const advprompt::ConfigError& e) {
    return fail(ADVP_ERR_CONFIG, e.what());
  } catch (const advprompt::OracleError& e) {
    return fail(ADVP_ERR_ORACLE, e.what());
  } catch (const advprompt::InvalidInput& e) {
    return fail(ADVP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const advprompt::IoError& e) {
    return fail(ADVP_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(ADVP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ADVP_ERR_INTERNAL, "unknown error");
  }
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw advprompt::IoError(std::string("cannot read ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using RunFn = advprompt::RunResult (*)(const advprompt::WordSpace&, const advprompt::PromptTemplate&,
                                       const advprompt::GaParams&, advprompt::Oracle&,
                                       const advprompt::GenerationSink&);

advp_status run_with(RunFn fn, const advp_config* cfg, const char* out_dir, advp_run** out) {
  if (!cfg || !out) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& c = cfg->cfg;
    if (!c.ga.seed) throw advprompt::ConfigError("ga/seed: no seed resolved for this run");
    auto oracle = advprompt::make_oracle(c, *c.ga.seed);

    std::optional<advprompt::RunWriter> writer;
    advprompt::GenerationSink sink;
    if (out_dir) {
      writer.emplace(out_dir, c);
      sink = [&](const advprompt::GenerationLog& log) { writer->write_generation(log); };
    }
    auto run = std::make_unique<advp_run>();
    run->result = fn(c.space, c.tmpl, c.ga, *oracle, sink);
    if (writer) writer->finish(run->result);

    const bool failed = run->result.termination_reason == advprompt::TerminationReason::OracleFailure;
    std::string error = run->result.error;
    *out = run.release();
    return failed ? fail(ADVP_ERR_ORACLE, error) : ADVP_OK;
  });
}

}  // namespace

extern "C" {

const char* advp_version(void) { return ADVPROMPT_VERSION; }

const char* advp_last_error(void) { return g_last_error.c_str(); }

const char* advp_status_name(advp_status status) {
  switch (status) {
    case ADVP_OK: return "ok";
    case ADVP_ERR_CONFIG: return "config error";
    case ADVP_ERR_ORACLE: return "oracle error";
    case ADVP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADVP_ERR_IO: return "i/o error";
    case ADVP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

advp_status advp_config_load_string(const char* json, advp_config** out) {
  if (!json || !out) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<advp_config>();
    h->cfg = advprompt::load_attack_config(json);
    h->oracle_name = advprompt::to_string(h->cfg.oracle.kind);
    *out = h.release();
    return ADVP_OK;
  });
}

advp_status advp_config_load_file(const char* path, advp_config** out) {
  if (!path || !out) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::string text;
    try {
      text = read_file(path);
    } catch (const advprompt::IoError& e) {
      throw advprompt::ConfigError(std::string("config: cannot read ") + path);
    }
    return advp_config_load_string(text.c_str(), out);
  });
}

void advp_config_free(advp_config* cfg) { delete cfg; }

int advp_config_get_seed(const advp_config* cfg, uint64_t* seed) {
  if (!cfg || !cfg->cfg.ga.seed) return 0;
  if (seed) *seed = *cfg->cfg.ga.seed;
  return 1;
}

advp_status advp_config_set_seed(advp_config* cfg, uint64_t seed) {
  if (!cfg) return fail(ADVP_ERR_INVALID_ARGUMENT, "null config");
  cfg->cfg.ga.seed = seed;
  return ADVP_OK;
}

advp_status advp_config_set_oracle(advp_config* cfg, const char* kind) {
  if (!cfg || !kind) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.oracle.kind = advprompt::parse_oracle_kind(kind);
    cfg->oracle_name = advprompt::to_string(cfg->cfg.oracle.kind);
    return ADVP_OK;
  });
}

const char* advp_config_oracle(const advp_config* cfg) {
  return cfg ? cfg->oracle_name.c_str() : nullptr;
}

advp_status advp_config_set_endpoint(advp_config* cfg, const char* base_url) {
  if (!cfg || !base_url) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  cfg->cfg.oracle.http.base_url = base_url;
  return ADVP_OK;
}

advp_status advp_config_set_population(advp_config* cfg, size_t population) {
  if (!cfg) return fail(ADVP_ERR_INVALID_ARGUMENT, "null config");
  if (population < 1) return fail(ADVP_ERR_CONFIG, "ga/population: must be at least 1");
  cfg->cfg.ga.population_size = population;
  return ADVP_OK;
}

advp_status advp_config_set_asr_threshold(advp_config* cfg, double beta) {
  if (!cfg) return fail(ADVP_ERR_INVALID_ARGUMENT, "null config");
  if (!(beta > 0.0 && beta <= 1.0)) return fail(ADVP_ERR_CONFIG, "ga/asr_threshold: must lie in (0, 1]");
  cfg->cfg.ga.asr_threshold = beta;
  return ADVP_OK;
}

advp_status advp_config_set_awsr(advp_config* cfg, int enabled) {
  if (!cfg) return fail(ADVP_ERR_INVALID_ARGUMENT, "null config");
  cfg->cfg.ga.awsr_enabled = enabled != 0;
  return ADVP_OK;
}

const char* advp_config_target_label(const advp_config* cfg) {
  return cfg ? cfg->cfg.tmpl.target_label.c_str() : nullptr;
}

advp_status advp_run_attack(const advp_config* cfg, const char* out_dir, advp_run** out) {
  return run_with(&advprompt::run_attack, cfg, out_dir, out);
}

advp_status advp_run_baseline(const advp_config* cfg, const char* out_dir, advp_run** out) {
  return run_with(&advprompt::run_baseline, cfg, out_dir, out);
}

void advp_run_free(advp_run* run) { delete run; }

const char* advp_run_termination_reason(const advp_run* run) {
  return run ? advprompt::to_string(run->result.termination_reason) : nullptr;
}

uint64_t advp_run_seed(const advp_run* run) { return run ? run->result.seed : 0; }

size_t advp_run_generation_count(const advp_run* run) {
  return run ? run->result.generations.size() : 0;
}

size_t advp_run_total_queries(const advp_run* run) { return run ? run->result.total_queries : 0; }

size_t advp_run_distinct_prompts(const advp_run* run) {
  return run ? run->result.distinct_prompts : 0;
}

advp_status advp_run_generation_stats(const advp_run* run, size_t generation, double* mean_asr,
                                      double* best_asr, double* mean_fitness,
                                      double* best_fitness) {
  if (!run) return fail(ADVP_ERR_INVALID_ARGUMENT, "null run");
  if (generation >= run->result.generations.size())
    return fail(ADVP_ERR_INVALID_ARGUMENT, "generation index out of range");
  const auto& g = run->result.generations[generation];
  if (mean_asr) *mean_asr = g.mean_asr;
  if (best_asr) *best_asr = g.best_asr;
  if (mean_fitness) *mean_fitness = g.mean_fitness;
  if (best_fitness) *best_fitness = g.best_fitness;
  return ADVP_OK;
}

size_t advp_run_word_space_size(const advp_run* run) {
  return run ? run->result.final_space.total_words() : 0;
}

advp_status advp_analyze_runs(const char* const* run_paths, size_t n_paths, double threshold,
                              advp_freq_table** out) {
  if (!out || (n_paths > 0 && !run_paths)) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (n_paths == 0) return fail(ADVP_ERR_INVALID_ARGUMENT, "at least one run log is required");
  return guarded([&] {
    std::vector<advprompt::ScoredIndividual> records;
    for (size_t i = 0; i < n_paths; ++i) {
      auto part = advprompt::read_run_records(run_paths[i]);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    auto h = std::make_unique<advp_freq_table>();
    h->table = advprompt::word_frequencies(records, threshold);
    *out = h.release();
    return ADVP_OK;
  });
}

advp_status advp_freq_table_load(const char* path, advp_freq_table** out) {
  if (!path || !out) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<advp_freq_table>();
    try {
      h->table = advprompt::freq_table_from_json(read_file(path));
    } catch (const advprompt::InvalidInput& e) {
      throw advprompt::IoError(std::string(path) + ": " + e.what());
    }
    *out = h.release();
    return ADVP_OK;
  });
}

advp_status advp_freq_table_write(const advp_freq_table* table, const char* out_dir) {
  if (!table || !out_dir) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw advprompt::IoError("cannot create " + dir.string() + ": " + ec.message());
    advprompt::write_file_atomic(dir / "freq.json", advprompt::freq_table_to_json(table->table));
    advprompt::write_file_atomic(dir / "freq.txt", advprompt::freq_table_to_text(table->table));
    return ADVP_OK;
  });
}

size_t advp_freq_table_sample_size(const advp_freq_table* table) {
  return table ? table->table.sample_size : 0;
}

const char* advp_freq_table_word(const advp_freq_table* table, const char* attribute, size_t rank,
                                 double* frequency) {
  if (!table || !attribute) return nullptr;
  const auto* af = table->table.find(attribute);
  if (!af || rank >= af->words.size()) return nullptr;
  if (frequency) *frequency = af->words[rank].frequency;
  return af->words[rank].word.c_str();
}

void advp_freq_table_free(advp_freq_table* table) { delete table; }

advp_status advp_zero_shot(const advp_config* cfg, const advp_freq_table* table, size_t top_n,
                           size_t cap, const char* out_path, size_t* count) {
  if (!cfg || !table || !out_path) return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    advprompt::ZeroShotOptions opts;
    opts.top_n = top_n;
    opts.cap = cap;
    opts.defaults = cfg->cfg.zero_shot_defaults;
    const auto prompts = advprompt::build_zero_shot_prompts(table->table, cfg->cfg.tmpl, opts);
    std::string text;
    for (const auto& p : prompts) text += p + "\n";
    const std::filesystem::path path(out_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    advprompt::write_file_atomic(path, text);
    if (count) *count = prompts.size();
    return ADVP_OK;
  });
}

advp_status advp_eval_images(const char* jsonl_path, const char* target_label,
                             const char* out_path, double* asr) {
  if (!jsonl_path || !target_label || !out_path)
    return fail(ADVP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto items = advprompt::parse_labeled_items(read_file(jsonl_path));
    const auto report = advprompt::evaluate_image_set(items, target_label);
    const std::filesystem::path path(out_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    advprompt::write_file_atomic(path, advprompt::image_report_to_json(report));
    if (asr) *asr = report.asr;
    return ADVP_OK;
  });
}

}  // extern "C"
