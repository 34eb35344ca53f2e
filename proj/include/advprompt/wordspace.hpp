#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "advprompt/rng.hpp"

namespace advprompt {

/// One optimizable attribute and its candidate words.
struct Attribute {
  std::string name;
  std::vector<std::string> words;

  bool operator==(const Attribute&) const = default;
};

/// Attribute -> candidate word lists, kept in declaration order.
///
/// Every attribute holds at least one word and words are unique within an
/// attribute. The order of attributes is the order in which random draws are
/// consumed everywhere in the engine.
class WordSpace {
 public:
  WordSpace() = default;
  /// Validates the invariants; throws ConfigError naming the offending attribute.
  explicit WordSpace(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t attribute_count() const { return attributes_.size(); }

  /// Total number of candidate words across attributes (M).
  std::size_t total_words() const;

  const Attribute* find(std::string_view name) const;
  bool contains(std::string_view attribute, std::string_view word) const;

  /// Removes one word. Refuses (returns false) when the word is absent or
  /// when it is the attribute's last word.
  bool remove_word(std::string_view attribute, std::string_view word);

  bool operator==(const WordSpace&) const = default;

 private:
  std::vector<Attribute> attributes_;
};

struct Gene {
  std::string attribute;
  std::string word;

  bool operator==(const Gene&) const = default;
};

/// One word per attribute, in the word space's declaration order.
struct Individual {
  std::vector<Gene> genes;

  /// Word assigned to `attribute`, or nullptr.
  const std::string* word(std::string_view attribute) const;

  bool operator==(const Individual&) const = default;
};

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

struct Slot {
  std::string attribute;
  bool operator==(const Slot&) const = default;
};

using Segment = std::variant<Literal, Slot>;

/// Prompt skeleton: literal text interleaved with attribute slots, plus the
/// fixed ground-truth target the prompt is built around.
struct PromptTemplate {
  std::vector<Segment> segments;
  std::string target_token;          // e.g. "dog"
  std::string target_semantic_text;  // e.g. "a photo of a dog"
  std::string target_label;          // classifier label used for misclassification

  /// Distinct slot attributes in order of first appearance.
  std::vector<std::string> slot_attributes() const;

  bool operator==(const PromptTemplate&) const = default;
};

/// Checks that every slot refers to an attribute of `space`, that every
/// attribute of `space` is used by a slot, and that the target token is not a
/// slot. Throws ConfigError.
void validate_template(const PromptTemplate& tmpl, const WordSpace& space);

/// Renders the template. Segments are joined with single spaces (no space is
/// inserted before a segment starting with punctuation), whitespace runs are
/// collapsed and the ends trimmed. Throws InvalidInput naming the first slot
/// attribute missing from `individual`.
std::string render_prompt(const PromptTemplate& tmpl, const Individual& individual);

/// Uniform independent word per attribute, drawn in declaration order.
Individual random_individual(const WordSpace& space, Rng& rng);

/// True when every attribute of `space` has exactly one gene in `individual`,
/// in declaration order.
bool covers(const Individual& individual, const WordSpace& space);

}  // namespace advprompt
