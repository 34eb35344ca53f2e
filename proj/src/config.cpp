#include "advprompt/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "advprompt/errors.hpp"

namespace advprompt {

using Json = nlohmann::ordered_json;

const char* to_string(OracleKind kind) { return kind == OracleKind::Sim ? "sim" : "http"; }

OracleKind parse_oracle_kind(std::string_view text) {
  if (text == "sim") return OracleKind::Sim;
  if (text == "http") return OracleKind::Http;
  throw ConfigError("oracle/kind: expected \"sim\" or \"http\", got \"" + std::string(text) + "\"");
}

namespace {

// Small typed accessors that report the JSON path of whatever is wrong.

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(path + "/" + key + ": unknown key");
  }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "/" + key + ": missing");
  return *it;
}

const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j;
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ConfigError(path + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

std::vector<std::string> get_string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_string(j[i], path + "/" + std::to_string(i)));
  return out;
}

template <class T, class Get>
void optional_field(const Json& obj, const std::string& path, const char* key, T& dst, Get get) {
  if (auto it = obj.find(key); it != obj.end()) dst = get(*it, path + "/" + key);
}

std::string expand_target(std::string text, const std::string& token) {
  static constexpr std::string_view kPlaceholder = "{target}";
  for (auto pos = text.find(kPlaceholder); pos != std::string::npos;
       pos = text.find(kPlaceholder, pos + token.size()))
    text.replace(pos, kPlaceholder.size(), token);
  return text;
}

PromptTemplate parse_template(const Json& root) {
  PromptTemplate tmpl;
  const auto& target = require_object(require(root, "", "target"), "/target");
  reject_unknown(target, "/target", {"token", "semantic_text", "label"});
  tmpl.target_token = get_string(require(target, "/target", "token"), "/target/token");
  tmpl.target_semantic_text = "a photo of a " + tmpl.target_token;
  tmpl.target_label = tmpl.target_token;
  optional_field(target, "/target", "semantic_text", tmpl.target_semantic_text, get_string);
  optional_field(target, "/target", "label", tmpl.target_label, get_string);

  const auto& segs = require(root, "", "template");
  if (!segs.is_array()) throw ConfigError("/template: expected a list of {lit} or {slot} objects");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string path = "/template/" + std::to_string(i);
    const auto& seg = require_object(segs[i], path);
    if (seg.size() != 1) throw ConfigError(path + ": expected exactly one of \"lit\" or \"slot\"");
    if (auto lit = seg.find("lit"); lit != seg.end()) {
      tmpl.segments.push_back(Literal{expand_target(get_string(*lit, path + "/lit"), tmpl.target_token)});
    } else if (auto slot = seg.find("slot"); slot != seg.end()) {
      tmpl.segments.push_back(Slot{get_string(*slot, path + "/slot")});
    } else {
      throw ConfigError(path + ": expected exactly one of \"lit\" or \"slot\"");
    }
  }
  return tmpl;
}

WordSpace parse_word_space(const Json& root) {
  const auto& ws = require_object(require(root, "", "word_space"), "/word_space");
  std::vector<Attribute> attrs;
  for (const auto& [name, words] : ws.items()) {
    const std::string path = "/word_space/" + name;
    auto list = get_string_list(words, path);
    if (list.empty()) throw ConfigError(path + ": attribute must list at least one word");
    attrs.push_back({name, std::move(list)});
  }
  return WordSpace(std::move(attrs));
}

GaParams parse_ga(const Json& root) {
  const std::string p = "/ga";
  const auto& ga = require_object(require(root, "", "ga"), p);
  reject_unknown(ga, p,
                 {"population", "mutation_prob", "lambda", "images_per_prompt", "max_generations",
                  "asr_threshold", "awsr", "seed", "elitism", "awsr_protected"});
  GaParams params;
  params.population_size = get_unsigned(require(ga, p, "population"), p + "/population");
  params.mutation_prob = get_number(require(ga, p, "mutation_prob"), p + "/mutation_prob");
  params.lambda = get_number(require(ga, p, "lambda"), p + "/lambda");
  params.images_per_prompt =
      get_unsigned(require(ga, p, "images_per_prompt"), p + "/images_per_prompt");
  params.max_generations = get_unsigned(require(ga, p, "max_generations"), p + "/max_generations");
  if (auto it = ga.find("asr_threshold"); it != ga.end() && !it->is_null())
    params.asr_threshold = get_number(*it, p + "/asr_threshold");
  optional_field(ga, p, "awsr", params.awsr_enabled, get_bool);
  optional_field(ga, p, "elitism", params.elitism, get_bool);
  if (auto it = ga.find("seed"); it != ga.end() && !it->is_null())
    params.seed = get_unsigned(*it, p + "/seed");
  if (auto it = ga.find("awsr_protected"); it != ga.end()) {
    auto names = get_string_list(*it, p + "/awsr_protected");
    params.awsr_protected = {names.begin(), names.end()};
  }
  params.validate(1);
  return params;
}

OracleSettings parse_oracle(const Json& root) {
  OracleSettings s;
  auto it = root.find("oracle");
  if (it == root.end() || it->is_null()) return s;
  const std::string p = "/oracle";
  const auto& o = require_object(*it, p);
  reject_unknown(o, p, {"kind", "sim", "http"});
  if (auto k = o.find("kind"); k != o.end()) s.kind = parse_oracle_kind(get_string(*k, p + "/kind"));

  if (auto simj = o.find("sim"); simj != o.end()) {
    const std::string sp = p + "/sim";
    const auto& sim = require_object(*simj, sp);
    reject_unknown(sim, sp,
                   {"planted", "base_rate", "boost", "miscls_cap", "sem_base", "sem_penalty",
                    "sem_noise", "seed"});
    if (auto pl = sim.find("planted"); pl != sim.end()) {
      s.sim.planted.clear();
      for (const auto& [attr, words] : require_object(*pl, sp + "/planted").items()) {
        auto list = get_string_list(words, sp + "/planted/" + attr);
        s.sim.planted[attr] = {list.begin(), list.end()};
      }
    }
    optional_field(sim, sp, "base_rate", s.sim.base_rate, get_number);
    optional_field(sim, sp, "boost", s.sim.boost, get_number);
    optional_field(sim, sp, "miscls_cap", s.sim.miscls_cap, get_number);
    optional_field(sim, sp, "sem_base", s.sim.sem_base, get_number);
    optional_field(sim, sp, "sem_penalty", s.sim.sem_penalty, get_number);
    optional_field(sim, sp, "sem_noise", s.sim.sem_noise, get_number);
    if (auto seed = sim.find("seed"); seed != sim.end() && !seed->is_null())
      s.sim_seed = get_unsigned(*seed, sp + "/seed");
    s.sim.validate();
  }

  if (auto httpj = o.find("http"); httpj != o.end()) {
    const std::string hp = p + "/http";
    const auto& http = require_object(*httpj, hp);
    reject_unknown(http, hp, {"base_url", "timeout_ms", "retries", "backoff_ms", "max_in_flight"});
    optional_field(http, hp, "base_url", s.http.base_url, get_string);
    if (auto v = http.find("timeout_ms"); v != http.end())
      s.http.timeout = std::chrono::milliseconds(get_unsigned(*v, hp + "/timeout_ms"));
    if (auto v = http.find("retries"); v != http.end())
      s.http.retry_count = static_cast<int>(get_unsigned(*v, hp + "/retries"));
    if (auto v = http.find("backoff_ms"); v != http.end())
      s.http.backoff = std::chrono::milliseconds(get_unsigned(*v, hp + "/backoff_ms"));
    if (auto v = http.find("max_in_flight"); v != http.end())
      s.http.max_in_flight = get_unsigned(*v, hp + "/max_in_flight");
  }
  return s;
}

}  // namespace

AttackConfig load_attack_config(std::string_view document) {
  Json root = Json::parse(document.begin(), document.end(), nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw ConfigError("config: document is not valid JSON");
  require_object(root, "/");
  reject_unknown(root, "", {"template", "target", "word_space", "ga", "oracle", "zero_shot_defaults"});

  AttackConfig cfg;
  cfg.tmpl = parse_template(root);
  cfg.space = parse_word_space(root);
  cfg.ga = parse_ga(root);
  cfg.oracle = parse_oracle(root);
  if (auto zs = root.find("zero_shot_defaults"); zs != root.end()) {
    for (const auto& [attr, word] : require_object(*zs, "/zero_shot_defaults").items())
      cfg.zero_shot_defaults[attr] = get_string(word, "/zero_shot_defaults/" + attr);
  }
  validate_template(cfg.tmpl, cfg.space);
  return cfg;
}

AttackConfig load_attack_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_attack_config(ss.str());
}

std::string dump_attack_config(const AttackConfig& cfg) {
  Json root;
  Json segs = Json::array();
  for (const auto& seg : cfg.tmpl.segments) {
    if (const auto* lit = std::get_if<Literal>(&seg))
      segs.push_back({{"lit", lit->text}});
    else
      segs.push_back({{"slot", std::get<Slot>(seg).attribute}});
  }
  root["template"] = segs;
  root["target"] = {{"token", cfg.tmpl.target_token},
                    {"semantic_text", cfg.tmpl.target_semantic_text},
                    {"label", cfg.tmpl.target_label}};
  Json ws = Json::object();
  for (const auto& a : cfg.space.attributes()) ws[a.name] = a.words;
  root["word_space"] = ws;

  const auto& g = cfg.ga;
  root["ga"] = {
      {"population", g.population_size},
      {"mutation_prob", g.mutation_prob},
      {"lambda", g.lambda},
      {"images_per_prompt", g.images_per_prompt},
      {"max_generations", g.max_generations},
      {"asr_threshold", g.asr_threshold ? Json(*g.asr_threshold) : Json(nullptr)},
      {"awsr", g.awsr_enabled},
      {"seed", g.seed ? Json(*g.seed) : Json(nullptr)},
      {"elitism", g.elitism},
      {"awsr_protected", Json(std::vector<std::string>(g.awsr_protected.begin(), g.awsr_protected.end()))},
  };

  const auto& s = cfg.oracle.sim;
  Json planted = Json::object();
  for (const auto& [attr, words] : s.planted)
    planted[attr] = std::vector<std::string>(words.begin(), words.end());
  root["oracle"] = {
      {"kind", to_string(cfg.oracle.kind)},
      {"sim",
       {{"planted", planted},
        {"base_rate", s.base_rate},
        {"boost", s.boost},
        {"miscls_cap", s.miscls_cap},
        {"sem_base", s.sem_base},
        {"sem_penalty", s.sem_penalty},
        {"sem_noise", s.sem_noise},
        {"seed", cfg.oracle.sim_seed ? Json(*cfg.oracle.sim_seed) : Json(nullptr)}}},
      {"http",
       {{"base_url", cfg.oracle.http.base_url},
        {"timeout_ms", cfg.oracle.http.timeout.count()},
        {"retries", cfg.oracle.http.retry_count},
        {"backoff_ms", cfg.oracle.http.backoff.count()},
        {"max_in_flight", cfg.oracle.http.max_in_flight}}},
  };
  Json zs = Json::object();
  for (const auto& [attr, word] : cfg.zero_shot_defaults) zs[attr] = word;
  root["zero_shot_defaults"] = zs;
  return root.dump(2) + "\n";
}

std::unique_ptr<Oracle> make_oracle(const AttackConfig& cfg, std::uint64_t run_seed) {
  if (cfg.oracle.kind == OracleKind::Sim) {
    SimOracleConfig sim = cfg.oracle.sim;
    sim.seed = cfg.oracle.sim_seed.value_or(run_seed);
    return std::make_unique<SimOracle>(std::move(sim));
  }
  return std::make_unique<HttpOracle>(cfg.oracle.http, cfg.tmpl.target_label,
                                      cfg.tmpl.target_semantic_text, run_seed);
}

}  // namespace advprompt
