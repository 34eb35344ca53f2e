#include <gtest/gtest.h>

#include <map>

#include "advprompt/analysis.hpp"
#include "advprompt/config.hpp"
#include "advprompt/errors.hpp"
#include "advprompt/rng.hpp"
#include "test_support.hpp"

using namespace advprompt;

namespace {

ScoredIndividual rec(double asr, std::initializer_list<std::pair<const char*, const char*>> genes) {
  ScoredIndividual s;
  for (auto [a, w] : genes) s.individual.genes.push_back({a, w});
  s.fitness.asr = asr;
  s.fitness.combined = asr;
  return s;
}

// Straightforward recount: attribute -> word -> count over records passing the filter.
std::map<std::string, std::map<std::string, std::size_t>> recount(
    const std::vector<ScoredIndividual>& records, double threshold, std::size_t& kept) {
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  kept = 0;
  for (const auto& r : records) {
    if (!(r.fitness.asr >= threshold)) continue;
    ++kept;
    for (const auto& g : r.individual.genes) ++counts[g.attribute][g.word];
  }
  return counts;
}

FreqTable table_of(std::initializer_list<std::pair<const char*, std::vector<const char*>>> attrs) {
  FreqTable t;
  t.sample_size = 4;
  for (const auto& [name, words] : attrs) {
    AttributeFrequencies af{name, {}};
    std::size_t c = words.size();
    for (const char* w : words) af.words.push_back({w, static_cast<double>(c) / 4.0, c}), --c;
    t.attributes.push_back(af);
  }
  return t;
}

}  // namespace

TEST(WordFrequencies, WeatherExample) {
  const std::vector<ScoredIndividual> records{
      rec(0.9, {{"weather", "foggy"}}), rec(1.0, {{"weather", "foggy"}}),
      rec(0.875, {{"weather", "foggy"}}), rec(0.95, {{"weather", "humid"}}),
      rec(0.5, {{"weather", "sunny"}})};
  const auto t = word_frequencies(records, 0.875);
  EXPECT_EQ(t.sample_size, 4u);
  const auto* w = t.find("weather");
  ASSERT_NE(w, nullptr);
  ASSERT_EQ(w->words.size(), 2u);
  EXPECT_EQ(w->words[0], (WordFrequency{"foggy", 0.75, 3}));
  EXPECT_EQ(w->words[1], (WordFrequency{"humid", 0.25, 1}));
}

TEST(WordFrequencies, NothingPassesGivesEmptyTable) {
  const std::vector<ScoredIndividual> records{rec(0.5, {{"weather", "foggy"}})};
  const auto t = word_frequencies(records, 1.01);
  EXPECT_EQ(t.sample_size, 0u);
  EXPECT_TRUE(t.attributes.empty());
  EXPECT_TRUE(word_frequencies({}, 0.5).attributes.empty());
}

TEST(WordFrequencies, TiesBreakAlphabetically) {
  const std::vector<ScoredIndividual> records{rec(1, {{"a", "zeta"}}), rec(1, {{"a", "alpha"}})};
  const auto t = word_frequencies(records, 0.5);
  EXPECT_EQ(t.attributes[0].words[0].word, "alpha");
  EXPECT_EQ(t.attributes[0].words[1].word, "zeta");
}

TEST(WordFrequencies, MatchesBruteForceRecount) {
  const auto cfg = load_attack_config_file(testing_support::config_path("animals.json"));
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredIndividual> records(rng.index(60));
    for (auto& r : records) {
      r.individual = random_individual(cfg.space, rng);
      r.fitness.asr = static_cast<double>(rng.index(9)) / 8.0;
    }
    const double threshold = static_cast<double>(rng.index(10)) / 8.0;
    std::size_t kept = 0;
    const auto expected = recount(records, threshold, kept);
    const auto t = word_frequencies(records, threshold);
    ASSERT_EQ(t.sample_size, kept);
    ASSERT_EQ(t.attributes.size(), expected.size());
    for (const auto& af : t.attributes) {
      const auto& exp = expected.at(af.attribute);
      ASSERT_EQ(af.words.size(), exp.size());
      for (std::size_t i = 0; i < af.words.size(); ++i) {
        ASSERT_EQ(af.words[i].count, exp.at(af.words[i].word));
        ASSERT_EQ(af.words[i].frequency, static_cast<double>(af.words[i].count) / kept);
        if (i > 0) ASSERT_GE(af.words[i - 1].count, af.words[i].count);
      }
    }
  }
}

TEST(FreqTable, JsonRoundTrip) {
  auto t = table_of({{"weather", {"foggy", "humid"}}, {"gesture", {"stretching"}}});
  t.asr_filter_threshold = 0.875;
  EXPECT_EQ(freq_table_from_json(freq_table_to_json(t)), t);
  EXPECT_THROW(freq_table_from_json("[]"), InvalidInput);
  const auto text = freq_table_to_text(t);
  EXPECT_NE(text.find("foggy"), std::string::npos);
}

TEST(ZeroShot, TopOneGivesOnePrompt) {
  const auto cfg = load_attack_config_file(testing_support::config_path("animals.json"));
  FreqTable t;
  for (const auto& a : cfg.space.attributes())
    t.attributes.push_back({a.name, {{a.words.back(), 0.5, 2}, {a.words.front(), 0.25, 1}}});
  const auto prompts = build_zero_shot_prompts(t, cfg.tmpl, {});
  ASSERT_EQ(prompts.size(), 1u);
  Individual ind;
  for (const auto& a : cfg.space.attributes()) ind.genes.push_back({a.name, a.words.back()});
  EXPECT_EQ(prompts[0], render_prompt(cfg.tmpl, ind));
}

TEST(ZeroShot, ProductOrderAndCap) {
  PromptTemplate tmpl;
  tmpl.segments = {Slot{"a"}, Slot{"b"}, Slot{"c"}};
  const auto t = table_of({{"a", {"a1", "a2", "a3"}}, {"b", {"b1", "b2", "b3"}}, {"c", {"c1", "c2", "c3"}}});
  ZeroShotOptions opt;
  opt.top_n = 2;
  opt.cap = 8;
  EXPECT_EQ(build_zero_shot_prompts(t, tmpl, opt),
            (std::vector<std::string>{"a1 b1 c1", "a1 b1 c2", "a1 b2 c1", "a1 b2 c2", "a2 b1 c1",
                                      "a2 b1 c2", "a2 b2 c1", "a2 b2 c2"}));
  for (std::size_t top_n = 1; top_n <= 3; ++top_n)
    for (std::size_t cap = 1; cap <= 30; cap += 3) {
      opt.top_n = top_n;
      opt.cap = cap;
      std::size_t full = top_n * top_n * top_n;
      EXPECT_EQ(build_zero_shot_prompts(t, tmpl, opt).size(), std::min(cap, full));
    }
}

TEST(ZeroShot, RaceTemplateShape) {
  const auto cfg = load_attack_config_file(testing_support::config_path("race.json"));
  FreqTable t;
  t.sample_size = 10;
  t.attributes = {{"appearance", {{"wearing clothes", 0.9, 9}}},
                  {"gesture", {{"stretching", 0.8, 8}}},
                  {"weather", {{"foggy", 0.7, 7}}}};
  ZeroShotOptions opt;
  opt.defaults = cfg.zero_shot_defaults;
  const auto prompts = build_zero_shot_prompts(t, cfg.tmpl, opt);
  ASSERT_EQ(prompts.size(), 1u);
  for (const char* w : {"wearing clothes", "stretching", "foggy", "white person"})
    EXPECT_NE(prompts[0].find(w), std::string::npos) << prompts[0];
}

TEST(ZeroShot, MissingAttributeIsNamed) {
  PromptTemplate tmpl;
  tmpl.segments = {Slot{"a"}, Literal{"dog"}, Slot{"mood"}};
  const auto t = table_of({{"a", {"a1"}}});
  try {
    build_zero_shot_prompts(t, tmpl, {});
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("mood"), std::string::npos);
  }
  ZeroShotOptions opt;
  opt.defaults["mood"] = "calm";
  EXPECT_EQ(build_zero_shot_prompts(t, tmpl, opt), (std::vector<std::string>{"a1 dog calm"}));
}

TEST(EvalImages, Ratios) {
  std::vector<LabeledItem> items;
  for (int i = 0; i < 50; ++i) items.push_back({std::to_string(i), i < 21 ? "cat" : "dog"});
  EXPECT_NEAR(evaluate_image_set(items, "dog").asr, 0.42, 1e-12);
  EXPECT_EQ(evaluate_image_set(items, "dog").misclassified, 21u);

  const std::vector<LabeledItem> all_dog{{"x", "dog"}, {"y", "dog"}};
  EXPECT_EQ(evaluate_image_set(all_dog, "dog").asr, 0.0);
  const std::vector<LabeledItem> one{{"x", "cat"}};
  EXPECT_EQ(evaluate_image_set(one, "dog").asr, 1.0);
  EXPECT_THROW(evaluate_image_set({}, "dog"), InvalidInput);
}

TEST(EvalImages, ParsesJsonl) {
  const auto items = parse_labeled_items("{\"id\":\"a\",\"predicted\":\"cat\"}\n\n{\"id\":\"b\",\"predicted\":\"dog\"}\n");
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[1].id, "b");
  EXPECT_EQ(items[1].predicted, "dog");
  EXPECT_THROW(parse_labeled_items("{\"id\":\"a\"}"), InvalidInput);
  EXPECT_THROW(parse_labeled_items("nope"), InvalidInput);
}
