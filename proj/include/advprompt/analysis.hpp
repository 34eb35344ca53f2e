#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advprompt/ga.hpp"
#include "advprompt/wordspace.hpp"

namespace advprompt {

struct WordFrequency {
  std::string word;
  double frequency = 0.0;  // count / sample_size
  std::size_t count = 0;

  bool operator==(const WordFrequency&) const = default;
};

struct AttributeFrequencies {
  std::string attribute;
  std::vector<WordFrequency> words;  // frequency descending, then word ascending

  bool operator==(const AttributeFrequencies&) const = default;
};

/// Word frequencies over the prompts whose ASR passed a threshold.
struct FreqTable {
  std::vector<AttributeFrequencies> attributes;  // first-seen attribute order
  std::size_t sample_size = 0;
  double asr_filter_threshold = 0.0;

  const AttributeFrequencies* find(const std::string& attribute) const;

  bool operator==(const FreqTable&) const = default;
};

inline constexpr double kDefaultFrequencyThreshold = 0.875;

/// Keeps records with asr >= threshold and counts, per attribute, how often
/// each word occurs among them. Denominators are retained prompts.
FreqTable word_frequencies(std::span<const ScoredIndividual> records, double asr_threshold);

std::string freq_table_to_json(const FreqTable& table);
FreqTable freq_table_from_json(std::string_view text);  // throws InvalidInput

/// Aligned plain-text rendering, one block per attribute.
std::string freq_table_to_text(const FreqTable& table);

struct ZeroShotOptions {
  std::size_t top_n = 1;
  std::size_t cap = 64;
  /// Used for a slot whose attribute has no entry in the table.
  std::map<std::string, std::string> defaults;
};

/// Renders the template over the Cartesian product of each slot's top words.
/// Prompts come out in lexicographic order of per-slot rank vectors (the last
/// slot varies fastest) and the list stops at `cap`. Throws InvalidInput
/// naming a slot attribute that is neither in the table nor defaulted.
std::vector<std::string> build_zero_shot_prompts(const FreqTable& table,
                                                 const PromptTemplate& tmpl,
                                                 const ZeroShotOptions& options);

struct LabeledItem {
  std::string id;
  std::string predicted;
};

struct LabeledImageReport {
  std::size_t total = 0;
  std::size_t misclassified = 0;
  double asr = 0.0;
  std::string target_label;
  std::vector<LabeledItem> items;
};

/// Scores externally classified images against the target label. Throws
/// InvalidInput on an empty item list.
LabeledImageReport evaluate_image_set(std::span<const LabeledItem> items,
                                      const std::string& target_label);

/// Parses JSONL lines of {"id": string, "predicted": string}. Throws InvalidInput.
std::vector<LabeledItem> parse_labeled_items(std::string_view jsonl);

std::string image_report_to_json(const LabeledImageReport& report);

}  // namespace advprompt
