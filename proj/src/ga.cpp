#include "advprompt/ga.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "advprompt/errors.hpp"

namespace advprompt {

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::MaxGenerations: return "max_generations";
    case TerminationReason::AsrThreshold: return "asr_threshold";
    case TerminationReason::OracleFailure: return "oracle_failure";
  }
  return "unknown";
}

void GaParams::validate(std::size_t min_population) const {
  if (population_size < min_population)
    throw ConfigError("/ga/population: must be at least " + std::to_string(min_population));
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw ConfigError("/ga/mutation_prob: must lie in [0, 1]");
  if (images_per_prompt < 1) throw ConfigError("/ga/images_per_prompt: must be at least 1");
  if (max_generations < 1) throw ConfigError("/ga/max_generations: must be at least 1");
  if (asr_threshold && !(*asr_threshold > 0.0 && *asr_threshold <= 1.0))
    throw ConfigError("/ga/asr_threshold: must lie in (0, 1]");
}

std::vector<double> selection_probabilities(std::span<const double> fitnesses) {
  std::vector<double> out(fitnesses.size(), 0.0);
  if (fitnesses.empty()) return out;
  double total = 0.0;
  for (double f : fitnesses) total += std::max(f, 0.0);
  if (!(total > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(fitnesses.size()));
    return out;
  }
  for (std::size_t i = 0; i < fitnesses.size(); ++i) out[i] = std::max(fitnesses[i], 0.0) / total;
  return out;
}

std::size_t roulette_pick(std::span<const double> probabilities, Rng& rng) {
  if (probabilities.empty()) throw InvalidInput("roulette_pick: no candidates");
  const double u = rng.unit();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_positive = i;
    if (u < acc) return i;
  }
  // Rounding left the cumulative sum a hair under 1.
  return last_positive;
}

std::vector<Individual> init_population(const WordSpace& space, const GaParams& params, Rng& rng) {
  std::vector<Individual> pop;
  pop.reserve(params.population_size);
  for (std::size_t i = 0; i < params.population_size; ++i) pop.push_back(random_individual(space, rng));
  return pop;
}

Individual crossover(const Individual& parent1, const Individual& parent2, Rng& rng) {
  if (parent1.genes.size() != parent2.genes.size())
    throw InvalidInput("crossover: parents carry different attribute sets");
  Individual child;
  child.genes.reserve(parent1.genes.size());
  for (std::size_t i = 0; i < parent1.genes.size(); ++i) {
    if (parent1.genes[i].attribute != parent2.genes[i].attribute)
      throw InvalidInput("crossover: attribute mismatch at \"" + parent1.genes[i].attribute + "\"");
    child.genes.push_back(rng.chance(0.5) ? parent1.genes[i] : parent2.genes[i]);
  }
  return child;
}

Individual mutate(const Individual& individual, const WordSpace& space, double pm, Rng& rng) {
  Individual out = individual;
  for (auto& gene : out.genes) {
    if (!rng.chance(pm)) continue;
    const Attribute* attr = space.find(gene.attribute);
    if (!attr || attr->words.size() <= 1) continue;
    std::vector<const std::string*> alternatives;
    alternatives.reserve(attr->words.size());
    for (const auto& w : attr->words)
      if (w != gene.word) alternatives.push_back(&w);
    gene.word = *alternatives[rng.index(alternatives.size())];
  }
  return out;
}

Reduction adaptive_reduce(const WordSpace& space, const Individual& lowest,
                          const std::set<std::string>& protected_attributes, Rng& rng) {
  std::vector<const Gene*> eligible;
  for (const auto& gene : lowest.genes) {
    if (protected_attributes.contains(gene.attribute)) continue;
    const Attribute* attr = space.find(gene.attribute);
    if (!attr || attr->words.size() <= 1) continue;
    if (!space.contains(gene.attribute, gene.word)) continue;
    eligible.push_back(&gene);
  }

  Reduction red{space, {}};
  const std::size_t picks = std::min<std::size_t>(2, eligible.size());
  for (std::size_t n = 0; n < picks; ++n) {
    const std::size_t j = rng.index(eligible.size());
    const Gene* g = eligible[j];
    eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(j));
    if (red.space.remove_word(g->attribute, g->word)) red.removed.push_back({g->attribute, g->word});
  }
  return red;
}

std::size_t lowest_fitness_index(std::span<const ScoredIndividual> population) {
  if (population.empty()) throw InvalidInput("lowest_fitness_index: empty population");
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (population[i].fitness.combined < population[best].fitness.combined) best = i;
  return best;
}

namespace {

std::size_t highest_fitness_index(std::span<const ScoredIndividual> population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (population[i].fitness.combined > population[best].fitness.combined) best = i;
  return best;
}

/// Oracle access with per-run caching keyed on the rendered prompt.
class Evaluator {
 public:
  Evaluator(const PromptTemplate& tmpl, const GaParams& params, Oracle& oracle)
      : tmpl_(tmpl), params_(params), oracle_(oracle) {}

  std::vector<ScoredIndividual> evaluate(const std::vector<Individual>& individuals) {
    std::vector<std::string> prompts;
    prompts.reserve(individuals.size());
    std::vector<OracleRequest> pending;
    for (const auto& ind : individuals) {
      prompts.push_back(render_prompt(tmpl_, ind));
      const auto& p = prompts.back();
      if (cache_.contains(p)) continue;
      bool queued = std::any_of(pending.begin(), pending.end(),
                                [&](const OracleRequest& r) { return r.prompt == p; });
      if (!queued) pending.push_back({p, &ind});
    }

    if (!pending.empty()) {
      auto outcomes = oracle_.evaluate_batch(pending, params_.images_per_prompt);
      for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& outcome = outcomes[i];
        if (outcome.per_image.size() != params_.images_per_prompt)
          throw ProtocolError("oracle returned " + std::to_string(outcome.per_image.size()) +
                              " images for k=" + std::to_string(params_.images_per_prompt));
        queries_ += outcome.query_cost;
        cache_.emplace(pending[i].prompt, score(outcome, params_.lambda));
      }
    }

    std::vector<ScoredIndividual> out;
    out.reserve(individuals.size());
    for (std::size_t i = 0; i < individuals.size(); ++i)
      out.push_back({individuals[i], cache_.at(prompts[i])});
    return out;
  }

  std::size_t queries() const { return queries_; }
  std::size_t distinct_prompts() const { return cache_.size(); }

 private:
  const PromptTemplate& tmpl_;
  const GaParams& params_;
  Oracle& oracle_;
  std::unordered_map<std::string, FitnessRecord> cache_;
  std::size_t queries_ = 0;
};

void fill_stats(GenerationLog& log) {
  double sum_asr = 0.0, sum_fit = 0.0;
  log.best_asr = log.individuals.front().fitness.asr;
  log.best_fitness = log.individuals.front().fitness.combined;
  for (const auto& s : log.individuals) {
    sum_asr += s.fitness.asr;
    sum_fit += s.fitness.combined;
    log.best_asr = std::max(log.best_asr, s.fitness.asr);
    log.best_fitness = std::max(log.best_fitness, s.fitness.combined);
  }
  const double n = static_cast<double>(log.individuals.size());
  log.mean_asr = sum_asr / n;
  log.mean_fitness = sum_fit / n;
}

std::vector<double> combined_of(std::span<const ScoredIndividual> pop) {
  std::vector<double> f;
  f.reserve(pop.size());
  for (const auto& s : pop) f.push_back(s.fitness.combined);
  return f;
}

void emit(RunResult& result, GenerationLog log, const GenerationSink& sink) {
  if (sink) sink(log);
  result.generations.push_back(std::move(log));
}

}  // namespace

RunResult run_attack(const WordSpace& space, const PromptTemplate& tmpl, const GaParams& params,
                     Oracle& oracle, const GenerationSink& sink) {
  params.validate(2);
  if (!params.seed) throw ConfigError("/ga/seed: run_attack needs a resolved seed");
  validate_template(tmpl, space);

  RunResult result;
  result.seed = *params.seed;
  result.final_space = space;

  Rng rng(*params.seed);
  Evaluator evaluator(tmpl, params, oracle);

  std::vector<ScoredIndividual> population;
  try {
    population = evaluator.evaluate(init_population(space, params, rng));

    for (std::size_t t = 0;; ++t) {
      GenerationLog log;
      log.generation = t;
      log.individuals = population;
      fill_stats(log);
      log.word_space_size_before = result.final_space.total_words();

      std::optional<TerminationReason> stop;
      if (params.asr_threshold && log.best_asr >= *params.asr_threshold)
        stop = TerminationReason::AsrThreshold;
      else if (t + 1 >= params.max_generations)
        stop = TerminationReason::MaxGenerations;
      if (stop) {
        log.word_space_size_after = log.word_space_size_before;
        log.cumulative_queries = evaluator.queries();
        log.distinct_prompts = evaluator.distinct_prompts();
        emit(result, std::move(log), sink);
        result.termination_reason = *stop;
        break;
      }

      if (params.awsr_enabled) {
        const auto& lowest = population[lowest_fitness_index(population)].individual;
        auto red = adaptive_reduce(result.final_space, lowest, params.awsr_protected, rng);
        result.final_space = std::move(red.space);
        log.removed_words = std::move(red.removed);
      }
      log.word_space_size_after = result.final_space.total_words();

      const auto parent_probs = selection_probabilities(combined_of(population));
      std::vector<Individual> children;
      children.reserve(params.population_size);
      for (std::size_t i = 0; i < params.population_size; ++i) {
        const auto& p1 = population[roulette_pick(parent_probs, rng)].individual;
        const auto& p2 = population[roulette_pick(parent_probs, rng)].individual;
        children.push_back(crossover(p1, p2, rng));
      }
      for (auto& child : children)
        child = mutate(child, result.final_space, params.mutation_prob, rng);

      auto scored_children = evaluator.evaluate(children);
      const auto survivor_probs = selection_probabilities(combined_of(scored_children));
      std::vector<ScoredIndividual> next;
      next.reserve(params.population_size);
      for (std::size_t i = 0; i < params.population_size; ++i)
        next.push_back(scored_children[roulette_pick(survivor_probs, rng)]);
      if (params.elitism)
        next[lowest_fitness_index(next)] = population[highest_fitness_index(population)];

      log.cumulative_queries = evaluator.queries();
      log.distinct_prompts = evaluator.distinct_prompts();
      emit(result, std::move(log), sink);
      population = std::move(next);
    }
  } catch (const OracleError& e) {
    result.termination_reason = TerminationReason::OracleFailure;
    result.error = e.what();
  }

  result.final_population = std::move(population);
  result.total_queries = evaluator.queries();
  result.distinct_prompts = evaluator.distinct_prompts();
  return result;
}

RunResult run_baseline(const WordSpace& space, const PromptTemplate& tmpl, const GaParams& params,
                       Oracle& oracle, const GenerationSink& sink) {
  params.validate(1);
  if (!params.seed) throw ConfigError("/ga/seed: run_baseline needs a resolved seed");
  validate_template(tmpl, space);

  RunResult result;
  result.seed = *params.seed;
  result.final_space = space;
  result.termination_reason = TerminationReason::MaxGenerations;

  Rng rng(*params.seed);
  Evaluator evaluator(tmpl, params, oracle);
  try {
    GenerationLog log;
    log.individuals = evaluator.evaluate(init_population(space, params, rng));
    fill_stats(log);
    log.word_space_size_before = log.word_space_size_after = space.total_words();
    log.cumulative_queries = evaluator.queries();
    log.distinct_prompts = evaluator.distinct_prompts();
    result.final_population = log.individuals;
    emit(result, std::move(log), sink);
  } catch (const OracleError& e) {
    result.termination_reason = TerminationReason::OracleFailure;
    result.error = e.what();
  }
  result.total_queries = evaluator.queries();
  result.distinct_prompts = evaluator.distinct_prompts();
  return result;
}

}  // namespace advprompt
