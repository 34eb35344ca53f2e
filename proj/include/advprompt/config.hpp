#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "advprompt/ga.hpp"
#include "advprompt/oracle.hpp"
#include "advprompt/wordspace.hpp"

namespace advprompt {

enum class OracleKind { Sim, Http };

const char* to_string(OracleKind kind);
OracleKind parse_oracle_kind(std::string_view text);  // throws ConfigError

struct OracleSettings {
  OracleKind kind = OracleKind::Sim;
  SimOracleConfig sim = SimOracleConfig::defaults();
  /// Landscape seed; when absent the run seed is used.
  std::optional<std::uint64_t> sim_seed;
  OracleEndpoint http;

  bool operator==(const OracleSettings&) const = default;
};

/// Everything one run needs, as read from a single JSON document.
struct AttackConfig {
  WordSpace space;
  PromptTemplate tmpl;
  GaParams ga;
  OracleSettings oracle;
  /// Fallback words for zero-shot prompt construction, keyed by attribute.
  std::map<std::string, std::string> zero_shot_defaults;

  bool operator==(const AttackConfig&) const = default;
};

/// Parses and validates a config document. The literal "{target}" inside
/// template literals is replaced with target.token. Throws ConfigError with
/// the JSON path of the offending value.
AttackConfig load_attack_config(std::string_view document);
AttackConfig load_attack_config_file(const std::filesystem::path& path);

/// Serializes a config back to its document form (pretty printed). Loading
/// the output yields an equal AttackConfig.
std::string dump_attack_config(const AttackConfig& cfg);

/// Oracle for `cfg`, with the landscape seed resolved against `run_seed`.
std::unique_ptr<Oracle> make_oracle(const AttackConfig& cfg, std::uint64_t run_seed);

}  // namespace advprompt
