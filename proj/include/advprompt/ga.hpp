#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advprompt/fitness.hpp"
#include "advprompt/oracle.hpp"
#include "advprompt/rng.hpp"
#include "advprompt/wordspace.hpp"

namespace advprompt {

struct GaParams {
  std::size_t population_size = 20;  // N
  double mutation_prob = 0.01;       // pm
  double lambda = 0.1;               // weight of the semantic term
  std::size_t images_per_prompt = 8; // k
  std::size_t max_generations = 8;   // alpha: number of evaluated generations
  std::optional<double> asr_threshold;  // beta
  bool awsr_enabled = true;
  std::optional<std::uint64_t> seed;
  bool elitism = false;
  std::set<std::string> awsr_protected;

  /// Throws ConfigError. `min_population` is 2 for evolution and 1 for the
  /// random baseline.
  void validate(std::size_t min_population = 2) const;

  bool operator==(const GaParams&) const = default;
};

struct ScoredIndividual {
  Individual individual;
  FitnessRecord fitness;

  bool operator==(const ScoredIndividual&) const = default;
};

struct RemovedWord {
  std::string attribute;
  std::string word;

  bool operator==(const RemovedWord&) const = default;
};

struct GenerationLog {
  std::size_t generation = 0;
  std::vector<ScoredIndividual> individuals;
  std::size_t word_space_size_before = 0;
  std::size_t word_space_size_after = 0;
  std::vector<RemovedWord> removed_words;
  std::size_t cumulative_queries = 0;  // images requested from the oracle so far
  std::size_t distinct_prompts = 0;    // prompts evaluated so far
  double best_asr = 0.0;
  double mean_asr = 0.0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;

  bool operator==(const GenerationLog&) const = default;
};

enum class TerminationReason { MaxGenerations, AsrThreshold, OracleFailure };

const char* to_string(TerminationReason reason);

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<ScoredIndividual> final_population;
  std::vector<GenerationLog> generations;
  TerminationReason termination_reason = TerminationReason::MaxGenerations;
  WordSpace final_space;
  std::size_t total_queries = 0;
  std::size_t distinct_prompts = 0;
  std::string error;  // set when termination_reason == OracleFailure
};

/// Called once per completed generation, before the next one starts.
using GenerationSink = std::function<void(const GenerationLog&)>;

/// Probability of picking each entry, proportional to its positive part.
/// Falls back to uniform when no entry is positive.
std::vector<double> selection_probabilities(std::span<const double> fitnesses);

/// Roulette draw over `probabilities` (which must sum to 1).
std::size_t roulette_pick(std::span<const double> probabilities, Rng& rng);

std::vector<Individual> init_population(const WordSpace& space, const GaParams& params, Rng& rng);

/// Uniform crossover: each gene comes from parent1 with probability 1/2.
/// Throws InvalidInput when the parents' attribute sequences differ.
Individual crossover(const Individual& parent1, const Individual& parent2, Rng& rng);

/// Each gene is, with probability pm, replaced by a different word drawn
/// uniformly from the attribute's current list. Attributes whose list has a
/// single word are left alone. Genes that are not hit keep their word even
/// if it has since been removed. One chance draw is consumed per gene.
Individual mutate(const Individual& individual, const WordSpace& space, double pm, Rng& rng);

struct Reduction {
  WordSpace space;
  std::vector<RemovedWord> removed;
};

/// Removes the words `lowest` carries for two distinct, randomly chosen
/// eligible attributes. An attribute is eligible when it is not protected,
/// still has more than one word, and still lists lowest's word. Fewer than
/// two eligible attributes means fewer removals.
Reduction adaptive_reduce(const WordSpace& space, const Individual& lowest,
                          const std::set<std::string>& protected_attributes, Rng& rng);

/// Index of the smallest combined fitness; ties go to the lowest index.
std::size_t lowest_fitness_index(std::span<const ScoredIndividual> population);

/// The evolutionary attack loop. Oracle failures do not throw: the run stops
/// with TerminationReason::OracleFailure and the generations completed so far.
/// `params.seed` must be set.
RunResult run_attack(const WordSpace& space, const PromptTemplate& tmpl, const GaParams& params,
                     Oracle& oracle, const GenerationSink& sink = {});

/// Control: evaluates N random individuals once, no evolution.
RunResult run_baseline(const WordSpace& space, const PromptTemplate& tmpl, const GaParams& params,
                       Oracle& oracle, const GenerationSink& sink = {});

}  // namespace advprompt
