#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "advprompt/config.hpp"
#include "advprompt/ga.hpp"

namespace advprompt {

// Line formats of {out_dir}/run.jsonl:
//   {"type":"generation", "generation":t, "individuals":[...], ...}   one per generation
//   {"type":"summary", "termination_reason":..., ...}                  last line
// {out_dir}/result.json holds the full RunResult, {out_dir}/config.json the
// resolved config. None of these files carry timestamps.

std::string scored_to_json(const ScoredIndividual& s);
ScoredIndividual scored_from_json(std::string_view text);  // throws IoError

std::string generation_to_json_line(const GenerationLog& log);
std::string summary_to_json_line(const RunResult& result);
std::string result_to_json(const RunResult& result);

/// Writes run artifacts as the run progresses. Each generation line is
/// flushed before the next generation starts.
class RunWriter {
 public:
  /// Creates `out_dir` and writes config.json. Throws IoError.
  RunWriter(std::filesystem::path out_dir, const AttackConfig& resolved);

  void write_generation(const GenerationLog& log);

  /// Appends the summary line and writes result.json atomically.
  void finish(const RunResult& result);

  const std::filesystem::path& out_dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::ofstream jsonl_;
};

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Every individual of every generation line in a run log. `path` may be the
/// run.jsonl file or the directory holding it. Throws IoError.
std::vector<ScoredIndividual> read_run_records(const std::filesystem::path& path);

}  // namespace advprompt
