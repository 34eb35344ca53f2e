#include <gtest/gtest.h>

#include <map>
#include <set>

#include "advprompt/config.hpp"
#include "advprompt/errors.hpp"
#include "advprompt/wordspace.hpp"
#include "test_support.hpp"

using namespace advprompt;

namespace {

AttackConfig animals() { return load_attack_config_file(testing_support::config_path("animals.json")); }

Individual make(std::initializer_list<std::pair<const char*, const char*>> genes) {
  Individual ind;
  for (auto [a, w] : genes) ind.genes.push_back({a, w});
  return ind;
}

}  // namespace

TEST(WordSpace, RejectsEmptyAttribute) {
  EXPECT_THROW(WordSpace(std::vector<Attribute>{{"weather", {}}}), ConfigError);
}

TEST(WordSpace, RejectsDuplicateWords) {
  EXPECT_THROW(WordSpace(std::vector<Attribute>{{"weather", {"foggy", "foggy"}}}), ConfigError);
}

TEST(WordSpace, RemoveWordNeverEmptiesAnAttribute) {
  WordSpace ws(std::vector<Attribute>{{"a", {"x", "y"}}, {"b", {"z"}}});
  EXPECT_TRUE(ws.remove_word("a", "x"));
  EXPECT_FALSE(ws.remove_word("a", "y"));
  EXPECT_FALSE(ws.remove_word("b", "z"));
  EXPECT_FALSE(ws.remove_word("a", "missing"));
  EXPECT_EQ(ws.total_words(), 2u);
}

TEST(RenderPrompt, AnimalTemplateExample) {
  const auto cfg = animals();
  const auto ind = make({{"number", "two"},
                         {"color", "green"},
                         {"appearance", "wearing clothes"},
                         {"gesture", "stretching"},
                         {"background", "on the busy street"},
                         {"weather", "foggy"},
                         {"viewangle", "from an eye-level perspective"}});
  EXPECT_EQ(render_prompt(cfg.tmpl, ind),
            "two green dog wearing clothes is stretching on the on the busy street on a foggy day, "
            "the dog faces forward, the dog occupies the main part in this scene, viewed from an "
            "eye-level perspective.");
}

TEST(RenderPrompt, ZeroSlotTemplateIsIdentity) {
  PromptTemplate t;
  t.segments = {Literal{"a photo of a cat"}};
  t.target_token = "cat";
  EXPECT_EQ(render_prompt(t, Individual{}), "a photo of a cat");
}

TEST(RenderPrompt, CollapsesWhitespace) {
  PromptTemplate t;
  t.segments = {Literal{"  a  "}, Slot{"x"}, Literal{" b "}, Literal{", c"}};
  t.target_token = "t";
  EXPECT_EQ(render_prompt(t, make({{"x", "big   red"}})), "a big red b, c");
}

TEST(RenderPrompt, MissingSlotNamesAttribute) {
  const auto cfg = animals();
  try {
    render_prompt(cfg.tmpl, make({{"number", "two"}}));
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("\"color\""), std::string::npos) << e.what();
  }
}

TEST(RenderPrompt, Deterministic) {
  const auto cfg = animals();
  Rng rng(7);
  const auto ind = random_individual(cfg.space, rng);
  EXPECT_EQ(render_prompt(cfg.tmpl, ind), render_prompt(cfg.tmpl, ind));
}

// Distinct individuals render to distinct prompts on every bundled config.
TEST(RenderPrompt, InjectiveOnBundledConfigs) {
  for (const char* name : {"animals.json", "race.json", "vehicle.json"}) {
    const auto cfg = load_attack_config_file(testing_support::config_path(name));
    Rng rng(11);
    std::map<std::string, Individual> seen;
    for (int i = 0; i < 3000; ++i) {
      auto ind = random_individual(cfg.space, rng);
      auto [it, inserted] = seen.emplace(render_prompt(cfg.tmpl, ind), ind);
      if (!inserted) EXPECT_EQ(it->second, ind) << name << ": " << it->first;
    }
  }
}

TEST(RandomIndividual, SingletonSpace) {
  WordSpace ws(std::vector<Attribute>{{"a", {"x"}}, {"b", {"y"}}});
  Rng rng(123);
  EXPECT_EQ(random_individual(ws, rng), make({{"a", "x"}, {"b", "y"}}));
}

TEST(RandomIndividual, SeedZeroGolden) {
  const auto cfg = animals();
  Rng rng(0);
  EXPECT_EQ(random_individual(cfg.space, rng),
            make({{"number", "one"},
                  {"color", "orange"},
                  {"appearance", "wearing a pair of glasses"},
                  {"gesture", "digging a burrow"},
                  {"background", "on the sky covered with clouds"},
                  {"weather", "stormy"},
                  {"viewangle", "from an eye-level perspective"}}));
}

TEST(RandomIndividual, UniformOverEightWords) {
  const auto cfg = animals();
  const auto* weather = cfg.space.find("weather");
  ASSERT_NE(weather, nullptr);
  ASSERT_EQ(weather->words.size(), 8u);
  Rng rng(2024);
  std::map<std::string, int> counts;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) ++counts[*random_individual(cfg.space, rng).word("weather")];
  ASSERT_EQ(counts.size(), 8u);
  for (const auto& [word, n] : counts) {
    const double freq = static_cast<double>(n) / kDraws;
    EXPECT_NEAR(freq, 0.125, 0.02) << word;
  }
}

TEST(RandomIndividual, AlwaysSatisfiesInvariants) {
  for (const char* name : {"animals.json", "race.json", "vehicle.json"}) {
    const auto cfg = load_attack_config_file(testing_support::config_path(name));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      const auto ind = random_individual(cfg.space, rng);
      ASSERT_TRUE(covers(ind, cfg.space));
      for (const auto& g : ind.genes) ASSERT_TRUE(cfg.space.contains(g.attribute, g.word));
    }
  }
}

TEST(Template, ValidationCatchesUnknownSlot) {
  WordSpace ws(std::vector<Attribute>{{"a", {"x"}}});
  PromptTemplate t;
  t.target_token = "cat";
  t.segments = {Slot{"a"}, Slot{"b"}};
  EXPECT_THROW(validate_template(t, ws), ConfigError);
}

TEST(Template, ValidationRejectsTargetAsSlot) {
  WordSpace ws(std::vector<Attribute>{{"cat", {"x"}}});
  PromptTemplate t;
  t.target_token = "cat";
  t.segments = {Slot{"cat"}};
  EXPECT_THROW(validate_template(t, ws), ConfigError);
}
