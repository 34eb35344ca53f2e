#include "advprompt/fitness.hpp"

#include "advprompt/errors.hpp"

namespace advprompt {

double compute_asr(const EvalOutcome& outcome) {
  if (outcome.per_image.empty()) throw InvalidInput("compute_asr: outcome has no images");
  std::size_t hits = 0;
  for (const auto& r : outcome.per_image) hits += r.misclassified ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outcome.per_image.size());
}

double compute_sem(const EvalOutcome& outcome) {
  if (outcome.per_image.empty()) throw InvalidInput("compute_sem: outcome has no images");
  double sum = 0.0;
  for (const auto& r : outcome.per_image) sum += r.sem_score;
  return sum / static_cast<double>(outcome.per_image.size());
}

FitnessRecord score(const EvalOutcome& outcome, double lambda) {
  FitnessRecord rec;
  rec.asr = compute_asr(outcome);
  rec.sem = compute_sem(outcome);
  rec.combined = combine(rec.asr, rec.sem, lambda);
  rec.evaluated_prompt = outcome.prompt;
  return rec;
}

}  // namespace advprompt
