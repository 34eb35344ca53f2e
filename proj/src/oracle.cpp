#include "advprompt/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "advprompt/errors.hpp"

namespace advprompt {

using nlohmann::json;

SimOracleConfig SimOracleConfig::defaults(std::uint64_t seed) {
  SimOracleConfig cfg;
  cfg.planted = {
      {"weather", {"foggy", "humid"}},
      {"gesture", {"stretching"}},
      {"appearance", {"wearing clothes"}},
  };
  cfg.seed = seed;
  return cfg;
}

void SimOracleConfig::validate() const {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ConfigError(std::string("/oracle/sim/") + name + ": must lie in [0, 1]");
  };
  prob(base_rate, "base_rate");
  prob(boost, "boost");
  prob(miscls_cap, "miscls_cap");
  prob(sem_base, "sem_base");
  if (!(sem_penalty >= 0.0)) throw ConfigError("/oracle/sim/sem_penalty: must be >= 0");
  if (!(sem_noise >= 0.0)) throw ConfigError("/oracle/sim/sem_noise: must be >= 0");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// murmur3 finalizer. FNV-1a alone barely moves the high bits when only the
// trailing index digit changes, which would make the k draws of a prompt
// nearly identical.
std::uint64_t fmix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

double hash_to_unit(std::uint64_t seed, std::string_view s, std::uint64_t i) {
  std::string buf = std::to_string(seed);
  buf.push_back('|');
  buf.append(s);
  buf.push_back('|');
  buf.append(std::to_string(i));
  return static_cast<double>(fmix64(fnv1a64(buf)) >> 11) * 0x1p-53;
}

std::size_t planted_count(const Individual& individual, const SimOracleConfig& cfg) {
  std::size_t m = 0;
  for (const auto& gene : individual.genes) {
    auto it = cfg.planted.find(gene.attribute);
    if (it != cfg.planted.end() && it->second.contains(gene.word)) ++m;
  }
  return m;
}

double misclassification_probability(std::size_t planted_words, const SimOracleConfig& cfg) {
  return std::min(cfg.base_rate + cfg.boost * static_cast<double>(planted_words), cfg.miscls_cap);
}

EvalOutcome sim_evaluate(const std::string& prompt, const Individual& individual, std::size_t k,
                         const SimOracleConfig& cfg) {
  if (k == 0) throw InvalidInput("sim_evaluate: k must be at least 1");
  const std::size_t m = planted_count(individual, cfg);
  const double q = misclassification_probability(m, cfg);
  const double centre = cfg.sem_base - cfg.sem_penalty * static_cast<double>(m);

  EvalOutcome out;
  out.prompt = prompt;
  out.query_cost = k;
  out.model_info = "sim";
  out.per_image.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    ImageResult r;
    r.misclassified = hash_to_unit(cfg.seed, prompt, i) < q;
    const double noise = (2.0 * hash_to_unit(cfg.seed + 1, prompt, i) - 1.0) * cfg.sem_noise;
    r.sem_score = std::clamp(centre + noise, 0.0, 1.0);
    out.per_image.push_back(r);
  }
  return out;
}

std::string make_evaluate_request(const std::string& prompt, std::size_t k,
                                  const std::string& target_label,
                                  const std::string& target_semantic_text,
                                  std::optional<std::uint64_t> seed) {
  json body = {
      {"prompt", prompt},
      {"k", k},
      {"target_label", target_label},
      {"target_semantic_text", target_semantic_text},
      {"seed", nullptr},
  };
  if (seed) body["seed"] = *seed;
  return body.dump();
}

EvalOutcome parse_evaluate_response(const std::string& prompt, std::size_t k,
                                    std::string_view body) {
  json doc = json::parse(body.begin(), body.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ProtocolError("evaluate response: body is not valid JSON");
  if (!doc.is_object()) throw ProtocolError("evaluate response: expected a JSON object");
  auto results = doc.find("results");
  if (results == doc.end()) throw ProtocolError("evaluate response: missing field \"results\"");
  if (!results->is_array()) throw ProtocolError("evaluate response: \"results\" is not an array");
  if (results->size() != k)
    throw ProtocolError("evaluate response: \"results\" has " + std::to_string(results->size()) +
                        " entries, expected k=" + std::to_string(k));

  EvalOutcome out;
  out.prompt = prompt;
  out.query_cost = k;
  out.per_image.reserve(k);
  for (std::size_t i = 0; i < results->size(); ++i) {
    const auto& item = (*results)[i];
    const std::string where = "evaluate response: results[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ProtocolError(where + " is not an object");
    auto mis = item.find("misclassified");
    if (mis == item.end()) throw ProtocolError(where + ": missing field \"misclassified\"");
    if (!mis->is_boolean()) throw ProtocolError(where + ".misclassified: expected boolean");
    auto sem = item.find("sem");
    if (sem == item.end()) throw ProtocolError(where + ": missing field \"sem\"");
    if (!sem->is_number()) throw ProtocolError(where + ".sem: expected number");
    const double s = sem->get<double>();
    if (!(s >= -1.0 && s <= 1.0)) throw ProtocolError(where + ".sem: outside [-1, 1]");
    out.per_image.push_back({mis->get<bool>(), s});
  }
  if (auto info = doc.find("model_info"); info != doc.end() && info->is_string())
    out.model_info = info->get<std::string>();
  return out;
}

EvalOutcome http_evaluate(const std::string& prompt, std::size_t k,
                          const std::string& target_label,
                          const std::string& target_semantic_text, const OracleEndpoint& ep,
                          std::optional<std::uint64_t> seed) {
  if (k == 0) throw InvalidInput("http_evaluate: k must be at least 1");
  if (ep.base_url.empty()) throw OracleUnavailable("http oracle: no endpoint configured");

  httplib::Client client(ep.base_url);
  if (!client.is_valid()) throw OracleUnavailable("http oracle: invalid endpoint " + ep.base_url);
  client.set_connection_timeout(ep.timeout);
  client.set_read_timeout(ep.timeout);
  client.set_write_timeout(ep.timeout);

  const std::string body = make_evaluate_request(prompt, k, target_label, target_semantic_text, seed);
  std::string last_error;
  auto delay = ep.backoff;
  for (int attempt = 0; attempt <= std::max(ep.retry_count, 0); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post("/evaluate", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    return parse_evaluate_response(prompt, k, res->body);
  }
  throw OracleUnavailable("http oracle: " + ep.base_url + "/evaluate failed after " +
                          std::to_string(std::max(ep.retry_count, 0) + 1) +
                          " attempts: " + last_error);
}

std::vector<EvalOutcome> Oracle::evaluate_batch(std::span<const OracleRequest> requests,
                                                std::size_t k) {
  std::vector<EvalOutcome> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(evaluate(r, k));
  return out;
}

SimOracle::SimOracle(SimOracleConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

EvalOutcome SimOracle::evaluate(const OracleRequest& request, std::size_t k) {
  if (!request.individual) throw InvalidInput("sim oracle: request carries no individual");
  return sim_evaluate(request.prompt, *request.individual, k, cfg_);
}

HttpOracle::HttpOracle(OracleEndpoint endpoint, std::string target_label,
                       std::string target_semantic_text, std::optional<std::uint64_t> seed)
    : endpoint_(std::move(endpoint)),
      target_label_(std::move(target_label)),
      target_semantic_text_(std::move(target_semantic_text)),
      seed_(seed) {}

EvalOutcome HttpOracle::evaluate(const OracleRequest& request, std::size_t k) {
  return http_evaluate(request.prompt, k, target_label_, target_semantic_text_, endpoint_, seed_);
}

std::vector<EvalOutcome> HttpOracle::evaluate_batch(std::span<const OracleRequest> requests,
                                                    std::size_t k) {
  const std::size_t workers =
      std::min<std::size_t>(std::max<std::size_t>(endpoint_.max_in_flight, 1), requests.size());
  if (workers <= 1) return Oracle::evaluate_batch(requests, k);

  std::vector<EvalOutcome> out(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        // after a failure, don't send anything new; the batch is lost anyway
        for (std::size_t i = next++; i < requests.size() && !failed; i = next++) {
          try {
            out[i] = evaluate(requests[i], k);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  // Report the first failure in request order so errors are reproducible too.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace advprompt
