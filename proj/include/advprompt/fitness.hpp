#pragma once

#include <string>

#include "advprompt/oracle.hpp"

namespace advprompt {

struct FitnessRecord {
  double asr = 0.0;       // fraction of images misclassified
  double sem = 0.0;       // mean semantic consistency
  double combined = 0.0;  // asr + lambda * sem
  std::string evaluated_prompt;

  bool operator==(const FitnessRecord&) const = default;
};

/// Misclassified images / images. Throws InvalidInput on an empty outcome.
double compute_asr(const EvalOutcome& outcome);

/// Arithmetic mean of the per-image semantic scores. Throws InvalidInput on
/// an empty outcome.
double compute_sem(const EvalOutcome& outcome);

/// asr + lambda * sem, unclamped.
inline double combine(double asr, double sem, double lambda) { return asr + lambda * sem; }

FitnessRecord score(const EvalOutcome& outcome, double lambda);

}  // namespace advprompt
