#include "advprompt/wordspace.hpp"

#include <algorithm>
#include <set>

#include "advprompt/errors.hpp"

namespace advprompt {

WordSpace::WordSpace(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  std::set<std::string, std::less<>> names;
  for (const auto& attr : attributes_) {
    if (attr.name.empty()) throw ConfigError("word_space: attribute name must not be empty");
    if (!names.insert(attr.name).second)
      throw ConfigError("word_space/" + attr.name + ": duplicate attribute");
    if (attr.words.empty())
      throw ConfigError("word_space/" + attr.name + ": attribute must list at least one word");
    std::set<std::string_view> seen;
    for (const auto& w : attr.words) {
      if (!seen.insert(w).second)
        throw ConfigError("word_space/" + attr.name + ": duplicate word \"" + w + "\"");
    }
  }
}

std::size_t WordSpace::total_words() const {
  std::size_t n = 0;
  for (const auto& a : attributes_) n += a.words.size();
  return n;
}

const Attribute* WordSpace::find(std::string_view name) const {
  for (const auto& a : attributes_)
    if (a.name == name) return &a;
  return nullptr;
}

bool WordSpace::contains(std::string_view attribute, std::string_view word) const {
  const Attribute* a = find(attribute);
  return a && std::find(a->words.begin(), a->words.end(), word) != a->words.end();
}

bool WordSpace::remove_word(std::string_view attribute, std::string_view word) {
  for (auto& a : attributes_) {
    if (a.name != attribute) continue;
    if (a.words.size() <= 1) return false;
    auto it = std::find(a.words.begin(), a.words.end(), word);
    if (it == a.words.end()) return false;
    a.words.erase(it);
    return true;
  }
  return false;
}

const std::string* Individual::word(std::string_view attribute) const {
  for (const auto& g : genes)
    if (g.attribute == attribute) return &g.word;
  return nullptr;
}

std::vector<std::string> PromptTemplate::slot_attributes() const {
  std::vector<std::string> out;
  for (const auto& seg : segments) {
    if (const auto* slot = std::get_if<Slot>(&seg)) {
      if (std::find(out.begin(), out.end(), slot->attribute) == out.end())
        out.push_back(slot->attribute);
    }
  }
  return out;
}

void validate_template(const PromptTemplate& tmpl, const WordSpace& space) {
  if (tmpl.target_token.empty()) throw ConfigError("target/token: must not be empty");
  const auto slots = tmpl.slot_attributes();
  for (const auto& name : slots) {
    if (name == tmpl.target_token)
      throw ConfigError("template: target token \"" + name + "\" must be literal text, not a slot");
    if (!space.find(name))
      throw ConfigError("template: slot \"" + name + "\" has no entry in word_space");
  }
  for (const auto& attr : space.attributes()) {
    if (std::find(slots.begin(), slots.end(), attr.name) == slots.end())
      throw ConfigError("word_space/" + attr.name + ": attribute is not used by any template slot");
  }
}

namespace {

bool starts_with_punct(std::string_view s) {
  return !s.empty() && std::string_view(".,;:!?").find(s.front()) != std::string_view::npos;
}

std::string normalize_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string render_prompt(const PromptTemplate& tmpl, const Individual& individual) {
  std::string joined;
  for (const auto& seg : tmpl.segments) {
    const std::string* piece = nullptr;
    if (const auto* lit = std::get_if<Literal>(&seg)) {
      piece = &lit->text;
    } else {
      const auto& attr = std::get<Slot>(seg).attribute;
      piece = individual.word(attr);
      if (!piece) throw InvalidInput("render_prompt: no word assigned to slot \"" + attr + "\"");
    }
    if (starts_with_punct(normalize_spaces(*piece)))
      while (!joined.empty() && joined.back() == ' ') joined.pop_back();
    else if (!joined.empty())
      joined.push_back(' ');
    joined += *piece;
  }
  return normalize_spaces(joined);
}

Individual random_individual(const WordSpace& space, Rng& rng) {
  Individual ind;
  ind.genes.reserve(space.attribute_count());
  for (const auto& attr : space.attributes())
    ind.genes.push_back({attr.name, attr.words[rng.index(attr.words.size())]});
  return ind;
}

bool covers(const Individual& individual, const WordSpace& space) {
  const auto& attrs = space.attributes();
  if (individual.genes.size() != attrs.size()) return false;
  for (std::size_t i = 0; i < attrs.size(); ++i)
    if (individual.genes[i].attribute != attrs[i].name) return false;
  return true;
}

}  // namespace advprompt
