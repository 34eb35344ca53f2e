#include <gtest/gtest.h>

#include "advprompt/errors.hpp"
#include "advprompt/fitness.hpp"

using namespace advprompt;

namespace {

EvalOutcome outcome_with(int misclassified, int total, std::vector<double> sems = {}) {
  EvalOutcome out;
  out.prompt = "p";
  out.query_cost = static_cast<std::size_t>(total);
  for (int i = 0; i < total; ++i) {
    const double s = sems.empty() ? 0.5 : sems[static_cast<std::size_t>(i)];
    out.per_image.push_back({i < misclassified, s});
  }
  return out;
}

}  // namespace

TEST(ComputeAsr, Ratios) {
  EXPECT_EQ(compute_asr(outcome_with(0, 8)), 0.0);
  EXPECT_EQ(compute_asr(outcome_with(8, 8)), 1.0);
  EXPECT_NEAR(compute_asr(outcome_with(5, 8)), 0.625, 1e-12);
}

TEST(ComputeAsr, EmptyOutcomeIsInvalid) {
  EXPECT_THROW(compute_asr(EvalOutcome{}), InvalidInput);
  EXPECT_THROW(compute_sem(EvalOutcome{}), InvalidInput);
}

TEST(ComputeSem, Mean) {
  EXPECT_NEAR(compute_sem(outcome_with(0, 2, {0.8, 0.6})), 0.7, 1e-12);
  EXPECT_EQ(compute_sem(outcome_with(0, 1, {1.0})), 1.0);
}

TEST(Combine, Arithmetic) {
  EXPECT_NEAR(combine(0.5, 0.8, 0.1), 0.58, 1e-12);
  EXPECT_EQ(combine(0.37, 0.9, 0.0), 0.37);
  EXPECT_NEAR(combine(0.0, -0.4, 0.5), -0.2, 1e-12);  // never clamped
}

TEST(Combine, MonotoneInBothTermsForPositiveLambda) {
  for (double lambda : {0.1, 0.5, 2.0})
    for (double a = 0.0; a <= 1.0; a += 0.125)
      for (double s = -1.0; s <= 1.0; s += 0.25) {
        EXPECT_LT(combine(a, s, lambda), combine(a + 0.125, s, lambda));
        EXPECT_LT(combine(a, s, lambda), combine(a, s + 0.25, lambda));
      }
}

TEST(Score, RecordIsRecomputable) {
  const auto rec = score(outcome_with(3, 4, {0.2, 0.4, 0.6, 0.8}), 0.1);
  EXPECT_NEAR(rec.asr, 0.75, 1e-12);
  EXPECT_NEAR(rec.sem, 0.5, 1e-12);
  EXPECT_EQ(rec.combined, combine(rec.asr, rec.sem, 0.1));
  EXPECT_EQ(rec.evaluated_prompt, "p");
}
