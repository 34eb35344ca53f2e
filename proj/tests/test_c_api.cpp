#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "advprompt/advprompt.h"
#include "test_support.hpp"

using testing_support::config_path;
using testing_support::read_text;
using testing_support::TempDir;
using testing_support::write_text;

namespace {

advp_config* load(const char* name) {
  advp_config* cfg = nullptr;
  EXPECT_EQ(advp_config_load_file(config_path(name).c_str(), &cfg), ADVP_OK) << advp_last_error();
  return cfg;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_GT(std::strlen(advp_version()), 0u);
  EXPECT_STREQ(advp_status_name(ADVP_ERR_ORACLE), "oracle error");
}

TEST(CApi, ConfigErrorsCarryMessages) {
  advp_config* cfg = nullptr;
  EXPECT_EQ(advp_config_load_string("{}", &cfg), ADVP_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_GT(std::strlen(advp_last_error()), 0u);
  EXPECT_EQ(advp_config_load_file("/nonexistent.json", &cfg), ADVP_ERR_CONFIG);
  EXPECT_EQ(advp_config_load_file(nullptr, &cfg), ADVP_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ConfigAccessors) {
  advp_config* cfg = load("animals.json");
  std::uint64_t seed = 0;
  EXPECT_EQ(advp_config_get_seed(cfg, &seed), 0);
  ASSERT_EQ(advp_config_set_seed(cfg, 17), ADVP_OK);
  EXPECT_EQ(advp_config_get_seed(cfg, &seed), 1);
  EXPECT_EQ(seed, 17u);
  EXPECT_STREQ(advp_config_oracle(cfg), "sim");
  EXPECT_EQ(advp_config_set_oracle(cfg, "carrier-pigeon"), ADVP_ERR_CONFIG);
  EXPECT_EQ(advp_config_set_population(cfg, 0), ADVP_ERR_CONFIG);
  EXPECT_EQ(advp_config_set_asr_threshold(cfg, 1.5), ADVP_ERR_CONFIG);
  EXPECT_STREQ(advp_config_target_label(cfg), "dog");
  advp_config_free(cfg);
}

TEST(CApi, RunWritesArtifactsAndStats) {
  TempDir dir;
  advp_config* cfg = load("animals.json");
  advp_config_set_seed(cfg, 3);
  advp_run* run = nullptr;
  ASSERT_EQ(advp_run_attack(cfg, (dir / "r").c_str(), &run), ADVP_OK) << advp_last_error();
  EXPECT_STREQ(advp_run_termination_reason(run), "max_generations");
  EXPECT_EQ(advp_run_seed(run), 3u);
  EXPECT_EQ(advp_run_generation_count(run), 8u);
  EXPECT_EQ(advp_run_total_queries(run), 8 * advp_run_distinct_prompts(run));
  double mean_asr, best_asr, mean_fit, best_fit;
  ASSERT_EQ(advp_run_generation_stats(run, 0, &mean_asr, &best_asr, &mean_fit, &best_fit), ADVP_OK);
  EXPECT_LE(mean_asr, best_asr);
  EXPECT_EQ(advp_run_generation_stats(run, 8, &mean_asr, &best_asr, &mean_fit, &best_fit),
            ADVP_ERR_INVALID_ARGUMENT);
  EXPECT_LE(advp_run_word_space_size(run), 48u);
  for (const char* f : {"config.json", "run.jsonl", "result.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / "r" / f)) << f;
  advp_run_free(run);
  advp_config_free(cfg);
}

TEST(CApi, RunNeedsSeed) {
  advp_config* cfg = load("animals.json");
  advp_run* run = nullptr;
  EXPECT_EQ(advp_run_attack(cfg, nullptr, &run), ADVP_ERR_CONFIG);
  EXPECT_EQ(run, nullptr);
  advp_config_free(cfg);
}

TEST(CApi, UnreachableHttpOracleReturnsPartialRun) {
  advp_config* cfg = load("animals.json");
  advp_config_set_seed(cfg, 1);
  advp_config_set_oracle(cfg, "http");
  advp_config_set_endpoint(cfg, "http://127.0.0.1:1");
  advp_run* run = nullptr;
  EXPECT_EQ(advp_run_attack(cfg, nullptr, &run), ADVP_ERR_ORACLE);
  ASSERT_NE(run, nullptr);
  EXPECT_STREQ(advp_run_termination_reason(run), "oracle_failure");
  EXPECT_EQ(advp_run_generation_count(run), 0u);
  advp_run_free(run);
  advp_config_free(cfg);
}

TEST(CApi, AnalyzeZeroShotAndEval) {
  TempDir dir;
  advp_config* cfg = load("animals.json");
  for (std::uint64_t seed : {0u, 1u}) {
    advp_config_set_seed(cfg, seed);
    advp_run* run = nullptr;
    ASSERT_EQ(advp_run_attack(cfg, (dir / ("run" + std::to_string(seed))).c_str(), &run), ADVP_OK);
    advp_run_free(run);
  }
  const std::string r0 = (dir / "run0").string(), r1 = (dir / "run1").string();
  const char* both[] = {r0.c_str(), r1.c_str()};

  advp_freq_table *t0 = nullptr, *t1 = nullptr, *t01 = nullptr;
  ASSERT_EQ(advp_analyze_runs(both, 1, 0.70, &t0), ADVP_OK);
  ASSERT_EQ(advp_analyze_runs(both + 1, 1, 0.70, &t1), ADVP_OK);
  ASSERT_EQ(advp_analyze_runs(both, 2, 0.70, &t01), ADVP_OK);
  EXPECT_EQ(advp_freq_table_sample_size(t01),
            advp_freq_table_sample_size(t0) + advp_freq_table_sample_size(t1));
  ASSERT_GT(advp_freq_table_sample_size(t01), 0u);

  double freq = 0;
  EXPECT_NE(advp_freq_table_word(t01, "weather", 0, &freq), nullptr);
  EXPECT_GT(freq, 0.0);
  EXPECT_EQ(advp_freq_table_word(t01, "no-such-attribute", 0, &freq), nullptr);

  ASSERT_EQ(advp_freq_table_write(t01, (dir / "freq").c_str()), ADVP_OK);
  advp_freq_table* loaded = nullptr;
  ASSERT_EQ(advp_freq_table_load((dir / "freq" / "freq.json").c_str(), &loaded), ADVP_OK);
  EXPECT_EQ(advp_freq_table_sample_size(loaded), advp_freq_table_sample_size(t01));

  std::size_t count = 0;
  ASSERT_EQ(advp_zero_shot(cfg, loaded, 1, 64, (dir / "prompts.txt").c_str(), &count), ADVP_OK);
  EXPECT_EQ(count, 1u);
  EXPECT_NE(read_text(dir / "prompts.txt").find("dog"), std::string::npos);

  write_text(dir / "images.jsonl", "{\"id\":\"1\",\"predicted\":\"cat\"}\n{\"id\":\"2\",\"predicted\":\"dog\"}\n");
  double asr = -1;
  ASSERT_EQ(advp_eval_images((dir / "images.jsonl").c_str(), "dog", (dir / "report.json").c_str(), &asr),
            ADVP_OK);
  EXPECT_EQ(asr, 0.5);
  EXPECT_EQ(advp_eval_images((dir / "missing.jsonl").c_str(), "dog", (dir / "r2.json").c_str(), &asr),
            ADVP_ERR_IO);

  advp_freq_table_free(t0);
  advp_freq_table_free(t1);
  advp_freq_table_free(t01);
  advp_freq_table_free(loaded);
  advp_config_free(cfg);
}

TEST(CApi, NullHandlesAreRejected) {
  advp_run* run = nullptr;
  EXPECT_EQ(advp_run_attack(nullptr, nullptr, &run), ADVP_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(advp_run_generation_count(nullptr), 0u);
  advp_run_free(nullptr);
  advp_config_free(nullptr);
  advp_freq_table_free(nullptr);
}
