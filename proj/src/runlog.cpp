#include "advprompt/runlog.hpp"

#include <sstream>

#include <json.hpp>

#include "advprompt/errors.hpp"

namespace advprompt {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json scored_json(const ScoredIndividual& s) {
  Json assignment = Json::object();
  for (const auto& g : s.individual.genes) assignment[g.attribute] = g.word;
  return {
      {"assignment", assignment},
      {"prompt", s.fitness.evaluated_prompt},
      {"asr", s.fitness.asr},
      {"sem", s.fitness.sem},
      {"fitness", s.fitness.combined},
  };
}

ScoredIndividual scored_from(const Json& j) {
  ScoredIndividual s;
  const auto& a = j.at("assignment");
  if (!a.is_object()) throw IoError("run log: assignment is not an object");
  for (const auto& [attr, word] : a.items()) s.individual.genes.push_back({attr, word.get<std::string>()});
  s.fitness.evaluated_prompt = j.at("prompt").get<std::string>();
  s.fitness.asr = j.at("asr").get<double>();
  s.fitness.sem = j.at("sem").get<double>();
  s.fitness.combined = j.at("fitness").get<double>();
  return s;
}

Json population_json(const std::vector<ScoredIndividual>& pop) {
  Json arr = Json::array();
  for (const auto& s : pop) arr.push_back(scored_json(s));
  return arr;
}

Json generation_json(const GenerationLog& log) {
  Json removed = Json::array();
  for (const auto& r : log.removed_words) removed.push_back({r.attribute, r.word});
  return {
      {"type", "generation"},
      {"generation", log.generation},
      {"individuals", population_json(log.individuals)},
      {"word_space_size_before", log.word_space_size_before},
      {"word_space_size_after", log.word_space_size_after},
      {"removed_words", removed},
      {"cumulative_queries", log.cumulative_queries},
      {"distinct_prompts", log.distinct_prompts},
      {"best_asr", log.best_asr},
      {"mean_asr", log.mean_asr},
      {"best_fitness", log.best_fitness},
      {"mean_fitness", log.mean_fitness},
  };
}

Json summary_json(const RunResult& r) {
  return {
      {"type", "summary"},
      {"termination_reason", to_string(r.termination_reason)},
      {"generations", r.generations.size()},
      {"seed", r.seed},
      {"total_queries", r.total_queries},
      {"distinct_prompts", r.distinct_prompts},
      {"error", r.error.empty() ? Json(nullptr) : Json(r.error)},
  };
}

}  // namespace

std::string scored_to_json(const ScoredIndividual& s) { return scored_json(s).dump(); }

ScoredIndividual scored_from_json(std::string_view text) {
  try {
    return scored_from(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("run log: malformed record: ") + e.what());
  }
}

std::string generation_to_json_line(const GenerationLog& log) { return generation_json(log).dump(); }

std::string summary_to_json_line(const RunResult& result) { return summary_json(result).dump(); }

std::string result_to_json(const RunResult& r) {
  Json j = summary_json(r);
  j.erase("type");
  Json gens = Json::array();
  for (const auto& g : r.generations) {
    gens.push_back({{"generation", g.generation},
                    {"best_asr", g.best_asr},
                    {"mean_asr", g.mean_asr},
                    {"best_fitness", g.best_fitness},
                    {"mean_fitness", g.mean_fitness},
                    {"word_space_size", g.word_space_size_after},
                    {"cumulative_queries", g.cumulative_queries}});
  }
  j["generation_summary"] = gens;
  j["final_population"] = population_json(r.final_population);
  Json ws = Json::object();
  for (const auto& a : r.final_space.attributes()) ws[a.name] = a.words;
  j["final_word_space"] = ws;
  return j.dump(2) + "\n";
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

RunWriter::RunWriter(fs::path out_dir, const AttackConfig& resolved) : dir_(std::move(out_dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  write_file_atomic(dir_ / "config.json", dump_attack_config(resolved));
  jsonl_.open(dir_ / "run.jsonl", std::ios::binary | std::ios::trunc);
  if (!jsonl_) throw IoError("cannot write " + (dir_ / "run.jsonl").string());
}

void RunWriter::write_generation(const GenerationLog& log) {
  jsonl_ << generation_to_json_line(log) << '\n';
  jsonl_.flush();
  if (!jsonl_) throw IoError("write failed: " + (dir_ / "run.jsonl").string());
}

void RunWriter::finish(const RunResult& result) {
  jsonl_ << summary_to_json_line(result) << '\n';
  jsonl_.flush();
  jsonl_.close();
  write_file_atomic(dir_ / "result.json", result_to_json(result));
}

std::vector<ScoredIndividual> read_run_records(const fs::path& path) {
  fs::path file = fs::is_directory(path) ? path / "run.jsonl" : path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read run log " + file.string());
  std::vector<ScoredIndividual> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      if (j.value("type", "") != "generation") continue;
      for (const auto& ind : j.at("individuals")) out.push_back(scored_from(ind));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace advprompt
