// advprompt command-line front end. Talks to the engine only through the C API.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "advprompt/advprompt.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitOracle = 2;

int exit_code(advp_status status) {
  if (status == ADVP_OK) return kExitOk;
  if (status == ADVP_ERR_ORACLE) return kExitOracle;
  return kExitUsage;
}

int report(advp_status status, const std::string& what) {
  if (status != ADVP_OK)
    std::cerr << "advprompt: " << what << ": " << advp_status_name(status) << ": "
              << advp_last_error() << "\n";
  return exit_code(status);
}

struct ConfigHandle {
  advp_config* ptr = nullptr;
  ~ConfigHandle() { advp_config_free(ptr); }
};

struct RunHandle {
  advp_run* ptr = nullptr;
  ~RunHandle() { advp_run_free(ptr); }
};

struct FreqHandle {
  advp_freq_table* ptr = nullptr;
  ~FreqHandle() { advp_freq_table_free(ptr); }
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) return false;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  return !ec;
}

struct RunFlags {
  std::string config;
  std::optional<std::string> oracle;
  std::optional<std::string> endpoint;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> population;
  std::optional<double> threshold;
  std::string out;
  bool no_awsr = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool evolutionary) {
  cmd->add_option("--config", f.config, "Attack config (JSON)")->required();
  cmd->add_option("--oracle", f.oracle, "Oracle kind")->check(CLI::IsMember({"sim", "http"}));
  cmd->add_option("--endpoint", f.endpoint, "Model service base URL (default $ADVPROMPT_ENDPOINT)");
  cmd->add_option("--seed", f.seed, "Run seed; overrides the config");
  cmd->add_option("--population", f.population, "Population size; overrides the config");
  cmd->add_option("--out", f.out, "Output directory")->required();
  if (evolutionary) {
    cmd->add_option("--threshold", f.threshold, "Stop once the best ASR reaches this value");
    cmd->add_flag("--no-awsr", f.no_awsr, "Disable word space reduction");
  }
}

int cmd_run(const RunFlags& f, bool baseline) {
  const std::string started = utc_now();
  ConfigHandle cfg;
  if (auto st = advp_config_load_file(f.config.c_str(), &cfg.ptr); st != ADVP_OK)
    return report(st, "loading " + f.config);

  std::uint64_t seed = 0;
  if (f.seed) {
    seed = *f.seed;
  } else if (!advp_config_get_seed(cfg.ptr, &seed)) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  advp_config_set_seed(cfg.ptr, seed);

  if (f.oracle)
    if (auto st = advp_config_set_oracle(cfg.ptr, f.oracle->c_str()); st != ADVP_OK)
      return report(st, "--oracle");
  std::optional<std::string> endpoint = f.endpoint;
  if (!endpoint)
    if (const char* env = std::getenv("ADVPROMPT_ENDPOINT"); env && *env) endpoint = env;
  if (endpoint) advp_config_set_endpoint(cfg.ptr, endpoint->c_str());
  if (f.population)
    if (auto st = advp_config_set_population(cfg.ptr, *f.population); st != ADVP_OK)
      return report(st, "--population");
  if (f.threshold)
    if (auto st = advp_config_set_asr_threshold(cfg.ptr, *f.threshold); st != ADVP_OK)
      return report(st, "--threshold");
  if (f.no_awsr) advp_config_set_awsr(cfg.ptr, 0);

  RunHandle run;
  const advp_status st = baseline ? advp_run_baseline(cfg.ptr, f.out.c_str(), &run.ptr)
                                  : advp_run_attack(cfg.ptr, f.out.c_str(), &run.ptr);
  if (!run.ptr) return report(st, baseline ? "baseline" : "run");

  nlohmann::ordered_json manifest = {
      {"command", baseline ? "baseline" : "run"},
      {"config_path", f.config},
      {"seed", seed},
      {"oracle", advp_config_oracle(cfg.ptr)},
      {"start_time", started},
      {"end_time", utc_now()},
      {"engine_version", advp_version()},
      {"termination_reason", advp_run_termination_reason(run.ptr)},
      {"output_dir", f.out},
  };
  if (!write_atomic(fs::path(f.out) / "manifest.json", manifest.dump(2) + "\n")) {
    std::cerr << "advprompt: cannot write manifest.json in " << f.out << "\n";
    return kExitUsage;
  }

  const std::size_t gens = advp_run_generation_count(run.ptr);
  if (gens > 0) {
    double mean0 = 0, meanN = 0, bestN = 0;
    advp_run_generation_stats(run.ptr, 0, &mean0, nullptr, nullptr, nullptr);
    advp_run_generation_stats(run.ptr, gens - 1, &meanN, &bestN, nullptr, nullptr);
    std::cout << "seed " << seed << "  generations " << gens << "  termination "
              << advp_run_termination_reason(run.ptr) << "\n"
              << "mean asr " << mean0 << " -> " << meanN << "  best asr " << bestN
              << "  queries " << advp_run_total_queries(run.ptr) << "\n";
  }
  return report(st, baseline ? "baseline" : "run");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary adversarial prompt search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(advp_version()));

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Evolve adversarial prompts");
  add_run_flags(run, run_flags, true);

  RunFlags base_flags;
  auto* baseline = app.add_subcommand("baseline", "Evaluate N random prompts once (control)");
  add_run_flags(baseline, base_flags, false);

  std::vector<std::string> runs;
  double threshold = 0.875;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Word frequencies over high-ASR prompts");
  analyze->add_option("runs", runs, "Run directories or run.jsonl files")->required();
  analyze->add_option("--threshold", threshold, "Minimum per-prompt ASR")->capture_default_str();
  analyze->add_option("--out", analyze_out, "Output directory")->required();

  std::string zs_config, zs_freq, zs_out;
  std::size_t top_n = 1, cap = 64;
  auto* zero_shot = app.add_subcommand("zero-shot", "Render prompts from high-frequency words");
  zero_shot->add_option("--config", zs_config, "Config supplying the template")->required();
  zero_shot->add_option("--freq", zs_freq, "freq.json from analyze")->required();
  zero_shot->add_option("--top-n", top_n, "Words per slot")->capture_default_str();
  zero_shot->add_option("--cap", cap, "Maximum number of prompts")->capture_default_str();
  zero_shot->add_option("--out", zs_out, "Output directory")->required();

  std::string ev_input, ev_target, ev_config, ev_out;
  auto* eval = app.add_subcommand("eval-images", "ASR of an externally classified image set");
  eval->add_option("--input", ev_input, "JSONL of {\"id\",\"predicted\"}")->required();
  eval->add_option("--target", ev_target, "Ground-truth label");
  eval->add_option("--config", ev_config, "Take the target label from this config");
  eval->add_option("--out", ev_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(run_flags, false);
  if (*baseline) return cmd_run(base_flags, true);

  if (*analyze) {
    std::vector<const char*> paths;
    for (const auto& r : runs) paths.push_back(r.c_str());
    FreqHandle table;
    if (auto st = advp_analyze_runs(paths.data(), paths.size(), threshold, &table.ptr); st != ADVP_OK)
      return report(st, "analyze");
    if (auto st = advp_freq_table_write(table.ptr, analyze_out.c_str()); st != ADVP_OK)
      return report(st, "analyze");
    std::cout << "retained " << advp_freq_table_sample_size(table.ptr) << " prompts -> "
              << analyze_out << "/freq.json\n";
    return kExitOk;
  }

  if (*zero_shot) {
    ConfigHandle cfg;
    if (auto st = advp_config_load_file(zs_config.c_str(), &cfg.ptr); st != ADVP_OK)
      return report(st, "loading " + zs_config);
    FreqHandle table;
    if (auto st = advp_freq_table_load(zs_freq.c_str(), &table.ptr); st != ADVP_OK)
      return report(st, "loading " + zs_freq);
    const std::string out = (fs::path(zs_out) / "prompts.txt").string();
    std::size_t count = 0;
    if (auto st = advp_zero_shot(cfg.ptr, table.ptr, top_n, cap, out.c_str(), &count); st != ADVP_OK)
      return report(st, "zero-shot");
    std::cout << count << " prompts -> " << out << "\n";
    return kExitOk;
  }

  if (*eval) {
    std::string target = ev_target;
    if (target.empty() && !ev_config.empty()) {
      ConfigHandle cfg;
      if (auto st = advp_config_load_file(ev_config.c_str(), &cfg.ptr); st != ADVP_OK)
        return report(st, "loading " + ev_config);
      target = advp_config_target_label(cfg.ptr);
    }
    if (target.empty()) {
      std::cerr << "advprompt: eval-images needs --target or --config\n";
      return kExitUsage;
    }
    const std::string out = (fs::path(ev_out) / "report.json").string();
    double asr = 0.0;
    if (auto st = advp_eval_images(ev_input.c_str(), target.c_str(), out.c_str(), &asr); st != ADVP_OK)
      return report(st, "eval-images");
    std::cout << "asr " << asr << " -> " << out << "\n";
    return kExitOk;
  }
  return kExitUsage;
}
