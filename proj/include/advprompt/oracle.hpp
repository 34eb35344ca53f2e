#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advprompt/wordspace.hpp"

namespace advprompt {

struct ImageResult {
  bool misclassified = false;
  double sem_score = 0.0;  // cosine similarity, [-1, 1]

  bool operator==(const ImageResult&) const = default;
};

/// What an oracle reports for one prompt: one entry per generated image.
struct EvalOutcome {
  std::string prompt;
  std::vector<ImageResult> per_image;
  std::size_t query_cost = 0;  // number of generated images
  std::string model_info;

  bool operator==(const EvalOutcome&) const = default;
};

/// Planted landscape for the simulated oracle. Each planted word present in
/// an individual raises the misclassification probability by `boost` and
/// lowers the semantic score by `sem_penalty`.
struct SimOracleConfig {
  std::map<std::string, std::set<std::string>> planted;
  double base_rate = 0.05;
  double boost = 0.25;
  double miscls_cap = 0.95;
  double sem_base = 0.9;
  double sem_penalty = 0.05;
  double sem_noise = 0.02;
  std::uint64_t seed = 0;

  /// {weather: foggy, humid; gesture: stretching; appearance: wearing clothes}
  static SimOracleConfig defaults(std::uint64_t seed = 0);

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  bool operator==(const SimOracleConfig&) const = default;
};

struct OracleEndpoint {
  std::string base_url;
  std::chrono::milliseconds timeout{30000};
  int retry_count = 3;
  std::chrono::milliseconds backoff{200};  // first retry delay, doubled each retry
  std::size_t max_in_flight = 4;

  bool operator==(const OracleEndpoint&) const = default;
};

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

std::uint64_t fmix64(std::uint64_t h);

/// FNV-1a of "<seed>|<s>|<i>", passed through fmix64, mapped to [0, 1). The
/// top 53 bits are used so the result is exactly representable and below 1.
double hash_to_unit(std::uint64_t seed, std::string_view s, std::uint64_t i);

/// Number of planted words carried by `individual`.
std::size_t planted_count(const Individual& individual, const SimOracleConfig& cfg);

/// Misclassification probability for `planted_words` planted words.
double misclassification_probability(std::size_t planted_words, const SimOracleConfig& cfg);

/// Deterministic stand-in for generator + classifier + semantic scorer.
/// Image randomness is keyed on the rendered prompt.
EvalOutcome sim_evaluate(const std::string& prompt, const Individual& individual, std::size_t k,
                         const SimOracleConfig& cfg);

/// Builds the JSON body of a POST /evaluate request.
std::string make_evaluate_request(const std::string& prompt, std::size_t k,
                                  const std::string& target_label,
                                  const std::string& target_semantic_text,
                                  std::optional<std::uint64_t> seed);

/// Parses a /evaluate response body. Throws ProtocolError naming the missing
/// or malformed field, or when the result count differs from k.
EvalOutcome parse_evaluate_response(const std::string& prompt, std::size_t k,
                                    std::string_view body);

/// One POST to {base_url}/evaluate with retry and exponential backoff.
/// Throws OracleUnavailable after exhausting retries, ProtocolError on a
/// malformed answer.
EvalOutcome http_evaluate(const std::string& prompt, std::size_t k,
                          const std::string& target_label,
                          const std::string& target_semantic_text, const OracleEndpoint& ep,
                          std::optional<std::uint64_t> seed = std::nullopt);

struct OracleRequest {
  std::string prompt;
  const Individual* individual = nullptr;
};

/// Evaluation boundary the optimizer talks to.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual EvalOutcome evaluate(const OracleRequest& request, std::size_t k) = 0;

  /// Evaluates a batch; results are returned in request order. The default
  /// implementation is sequential.
  virtual std::vector<EvalOutcome> evaluate_batch(std::span<const OracleRequest> requests,
                                                  std::size_t k);

  virtual std::string kind() const = 0;
};

class SimOracle final : public Oracle {
 public:
  explicit SimOracle(SimOracleConfig cfg);

  EvalOutcome evaluate(const OracleRequest& request, std::size_t k) override;
  std::string kind() const override { return "sim"; }

  const SimOracleConfig& config() const { return cfg_; }

 private:
  SimOracleConfig cfg_;
};

class HttpOracle final : public Oracle {
 public:
  HttpOracle(OracleEndpoint endpoint, std::string target_label, std::string target_semantic_text,
             std::optional<std::uint64_t> seed);

  EvalOutcome evaluate(const OracleRequest& request, std::size_t k) override;

  /// Up to endpoint.max_in_flight concurrent requests; merged in request order.
  std::vector<EvalOutcome> evaluate_batch(std::span<const OracleRequest> requests,
                                          std::size_t k) override;

  std::string kind() const override { return "http"; }

 private:
  OracleEndpoint endpoint_;
  std::string target_label_;
  std::string target_semantic_text_;
  std::optional<std::uint64_t> seed_;
};

}  // namespace advprompt
