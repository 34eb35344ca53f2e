#include "advprompt/analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "advprompt/errors.hpp"

namespace advprompt {

using Json = nlohmann::ordered_json;

const AttributeFrequencies* FreqTable::find(const std::string& attribute) const {
  for (const auto& a : attributes)
    if (a.attribute == attribute) return &a;
  return nullptr;
}

FreqTable word_frequencies(std::span<const ScoredIndividual> records, double asr_threshold) {
  FreqTable table;
  table.asr_filter_threshold = asr_threshold;

  std::vector<std::pair<std::string, std::map<std::string, std::size_t>>> counts;
  for (const auto& rec : records) {
    if (!(rec.fitness.asr >= asr_threshold)) continue;
    ++table.sample_size;
    for (const auto& gene : rec.individual.genes) {
      auto it = std::find_if(counts.begin(), counts.end(),
                             [&](const auto& c) { return c.first == gene.attribute; });
      if (it == counts.end()) {
        counts.push_back({gene.attribute, {}});
        it = std::prev(counts.end());
      }
      ++it->second[gene.word];
    }
  }

  for (auto& [attr, by_word] : counts) {
    AttributeFrequencies af{attr, {}};
    for (const auto& [word, n] : by_word)
      af.words.push_back({word, static_cast<double>(n) / static_cast<double>(table.sample_size), n});
    std::sort(af.words.begin(), af.words.end(), [](const auto& a, const auto& b) {
      return a.count != b.count ? a.count > b.count : a.word < b.word;
    });
    table.attributes.push_back(std::move(af));
  }
  return table;
}

std::string freq_table_to_json(const FreqTable& table) {
  Json attrs = Json::array();
  for (const auto& a : table.attributes) {
    Json words = Json::array();
    for (const auto& w : a.words)
      words.push_back({{"word", w.word}, {"frequency", w.frequency}, {"count", w.count}});
    attrs.push_back({{"attribute", a.attribute}, {"words", words}});
  }
  Json j = {{"sample_size", table.sample_size},
            {"asr_filter_threshold", table.asr_filter_threshold},
            {"attributes", attrs}};
  return j.dump(2) + "\n";
}

FreqTable freq_table_from_json(std::string_view text) {
  try {
    Json j = Json::parse(text);
    FreqTable t;
    t.sample_size = j.at("sample_size").get<std::size_t>();
    t.asr_filter_threshold = j.at("asr_filter_threshold").get<double>();
    for (const auto& a : j.at("attributes")) {
      AttributeFrequencies af{a.at("attribute").get<std::string>(), {}};
      for (const auto& w : a.at("words"))
        af.words.push_back({w.at("word").get<std::string>(), w.at("frequency").get<double>(),
                            w.at("count").get<std::size_t>()});
      t.attributes.push_back(std::move(af));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("frequency table: ") + e.what());
  }
}

std::string freq_table_to_text(const FreqTable& table) {
  std::ostringstream os;
  os << "sample_size " << table.sample_size << "  asr >= " << table.asr_filter_threshold << "\n";
  for (const auto& a : table.attributes) {
    std::size_t width = 4;
    for (const auto& w : a.words) width = std::max(width, w.word.size());
    os << "\n[" << a.attribute << "]\n";
    for (const auto& w : a.words) {
      os << "  " << std::left << std::setw(static_cast<int>(width)) << w.word << "  " << std::right
         << std::fixed << std::setprecision(1) << std::setw(5) << w.frequency * 100.0 << "%  "
         << std::setw(6) << w.count << "\n";
    }
  }
  return os.str();
}

std::vector<std::string> build_zero_shot_prompts(const FreqTable& table,
                                                 const PromptTemplate& tmpl,
                                                 const ZeroShotOptions& options) {
  const auto slots = tmpl.slot_attributes();
  std::vector<std::vector<std::string>> choices;
  for (const auto& attr : slots) {
    std::vector<std::string> words;
    if (const auto* af = table.find(attr); af && !af->words.empty()) {
      const std::size_t n = std::min(options.top_n, af->words.size());
      for (std::size_t i = 0; i < n; ++i) words.push_back(af->words[i].word);
    } else if (auto d = options.defaults.find(attr); d != options.defaults.end()) {
      words.push_back(d->second);
    } else {
      throw InvalidInput("zero-shot: attribute \"" + attr +
                         "\" is not in the frequency table and has no default");
    }
    if (words.empty()) return {};  // top_n == 0
    choices.push_back(std::move(words));
  }

  std::vector<std::string> prompts;
  std::vector<std::size_t> rank(slots.size(), 0);
  while (prompts.size() < options.cap) {
    Individual ind;
    for (std::size_t s = 0; s < slots.size(); ++s) ind.genes.push_back({slots[s], choices[s][rank[s]]});
    prompts.push_back(render_prompt(tmpl, ind));

    // Odometer increment, last slot fastest.
    std::size_t s = slots.size();
    while (s > 0) {
      --s;
      if (++rank[s] < choices[s].size()) break;
      rank[s] = 0;
      if (s == 0) return prompts;
    }
    if (slots.empty()) break;
  }
  return prompts;
}

LabeledImageReport evaluate_image_set(std::span<const LabeledItem> items,
                                      const std::string& target_label) {
  if (items.empty()) throw InvalidInput("evaluate_image_set: no items");
  LabeledImageReport r;
  r.target_label = target_label;
  r.total = items.size();
  r.items.assign(items.begin(), items.end());
  for (const auto& it : items)
    if (it.predicted != target_label) ++r.misclassified;
  r.asr = static_cast<double>(r.misclassified) / static_cast<double>(r.total);
  return r;
}

std::vector<LabeledItem> parse_labeled_items(std::string_view jsonl) {
  std::vector<LabeledItem> out;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    auto line = jsonl.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j = Json::parse(line.begin(), line.end(), nullptr, false);
    const std::string where = "line " + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw InvalidInput(where + ": not a JSON object");
    auto id = j.find("id");
    auto pred = j.find("predicted");
    if (id == j.end() || !id->is_string()) throw InvalidInput(where + ": missing string field \"id\"");
    if (pred == j.end() || !pred->is_string())
      throw InvalidInput(where + ": missing string field \"predicted\"");
    out.push_back({id->get<std::string>(), pred->get<std::string>()});
  }
  return out;
}

std::string image_report_to_json(const LabeledImageReport& report) {
  Json items = Json::array();
  for (const auto& it : report.items)
    items.push_back({{"id", it.id}, {"predicted", it.predicted}, {"target", report.target_label}});
  Json j = {{"total", report.total},
            {"misclassified", report.misclassified},
            {"asr", report.asr},
            {"target_label", report.target_label},
            {"items", items}};
  return j.dump(2) + "\n";
}

}  // namespace advprompt
