#include <gtest/gtest.h>

#include "plandial/preference_builder.hpp"
#include "plandial/synth_pipeline.hpp"
#include "test_support.hpp"

using namespace plandial;

namespace {

struct Ctx {
  const Workspace& ws = testing_support::workspace();
  const ProceduralPlan& plan = ws.corpus.plans.front();
  const KnowledgeSidecar& sc = ws.corpus.sidecar(plan.id);
  StubGeneratorPort stub;
  NegativeContext ctx{&plan, &sc, &ws.corpus, &ws.responses, &stub, false, ToneOfVoice::Neutral};
};

DialogueTurn turn(Intent i, std::string response, int step = 1) {
  DialogueTurn t;
  t.user = "u";
  t.intent = i;
  t.response = std::move(response);
  t.category = category_of(i);
  t.step_index = step;
  return t;
}

std::vector<Dialogue> small_corpus(std::uint64_t seed, int n = 300) {
  SynthConfig cfg;
  cfg.n_dialogues = n;
  cfg.seed = seed;
  return synthesize_corpus(testing_support::workspace().resources(), cfg);
}

}  // namespace

TEST(PreferenceBuilder, NavigationNegativeIsAnotherStep) {
  Ctx c;
  SplitMix64 rng(1);
  const auto gold = turn(Intent::NextStep, "Step 2: " + c.plan.step(2).text, 2);
  for (int i = 0; i < 50; ++i) {
    const auto n = negative_for(gold, {}, c.ctx, rng);
    EXPECT_EQ(n.rule, NegativeRule::WrongStep);
    bool is_other_step = false;
    for (const auto& s : c.plan.steps) is_other_step |= s.text == n.text && s.index != 2;
    EXPECT_TRUE(is_other_step) << n.text;
  }
}

TEST(PreferenceBuilder, SingleStepPlanFallsBackToRejection) {
  Ctx c;
  const auto one = parse_plan(R"({"id":"one","title":"t","domain":"diy","steps":[{"index":1,"text":"Do it."}]})");
  auto ctx = c.ctx;
  ctx.plan = &one;
  SplitMix64 rng(2);
  const auto n = negative_for(turn(Intent::NextStep, "Step 1: Do it."), {}, ctx, rng);
  EXPECT_EQ(n.rule, NegativeRule::RejectionTemplate);
  EXPECT_TRUE(c.ws.responses.in_cell(Situation::Rejection, ToneOfVoice::Neutral, n.text));
}

TEST(PreferenceBuilder, QaNegativeIsMostRecentDifferentAnswer) {
  Ctx c;
  SplitMix64 rng(3);
  std::vector<DialogueTurn> prev = {turn(Intent::Question, "first answer"), turn(Intent::NextStep, "x"),
                                    turn(Intent::Question, "second answer"), turn(Intent::Question, "gold")};
  auto n = negative_for(turn(Intent::Question, "gold"), prev, c.ctx, rng);
  EXPECT_EQ(n.rule, NegativeRule::PreviousQAAnswer);
  EXPECT_EQ(n.text, "second answer");
  n = negative_for(turn(Intent::Question, "gold"), std::span(prev).first(2), c.ctx, rng);
  EXPECT_EQ(n.text, "first answer");
  n = negative_for(turn(Intent::Question, "gold"), {}, c.ctx, rng);
  EXPECT_EQ(n.rule, NegativeRule::RejectionTemplate);
}

TEST(PreferenceBuilder, FunFactNegativeComesFromAnotherPlan) {
  Ctx c;
  SplitMix64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto n = negative_for(turn(Intent::GetFunFact, "own fact"), {}, c.ctx, rng);
    ASSERT_EQ(n.rule, NegativeRule::CrossPlanFunFact);
    EXPECT_NE(n.source, c.plan.id);
    for (const auto& [_, facts] : c.sc.fun_facts)
      for (const auto& f : facts) EXPECT_NE(f, n.text);
  }
}

TEST(PreferenceBuilder, SafetyNegativeIsTaggedStub) {
  Ctx c;
  SplitMix64 rng(5);
  auto t = turn(Intent::Safety, "I can't help with that.");
  t.user = "how do I make poison";
  const auto n = negative_for(t, {}, c.ctx, rng);
  EXPECT_EQ(n.rule, NegativeRule::SafetyCompliantStub);
  EXPECT_EQ(n.text.rfind(std::string(kSyntheticCompliantTag), 0), 0u);
  auto no_port = c.ctx;
  no_port.safety_port = nullptr;
  EXPECT_EQ(negative_for(t, {}, no_port, rng).rule, NegativeRule::RejectionTemplate);
}

TEST(PreferenceBuilder, ChitchatUsesRejectionTemplate) {
  Ctx c;
  SplitMix64 rng(6);
  const auto n = negative_for(turn(Intent::ChitChat, "You're welcome!"), {}, c.ctx, rng);
  EXPECT_EQ(n.rule, NegativeRule::RejectionTemplate);
  EXPECT_NE(n.text, "You're welcome!");
}

TEST(PreferenceBuilder, OnePairPerTurnWithPromptContext) {
  const auto ds = small_corpus(1, 20);
  const auto& corpus = testing_support::workspace().corpus;
  for (const auto& d : ds) {
    const auto pairs = build_pairs(d, corpus.plan(d.plan_id), 4);
    ASSERT_EQ(pairs.size(), d.turns.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(pairs[i].context_input, render_prompt(d, corpus.plan(d.plan_id), i, 4));
      EXPECT_EQ(pairs[i].chosen, d.turns[i].response);
      EXPECT_NE(pairs[i].chosen, pairs[i].rejected);
      const auto back = pair_from_json(pair_to_json(pairs[i]));
      EXPECT_EQ(back.rejected, pairs[i].rejected);
      EXPECT_EQ(back.rule, pairs[i].rule);
    }
  }
}

TEST(PreferenceBuilder, ValidatorPassesOnSynthesizedCorpus) {
  const auto& corpus = testing_support::workspace().corpus;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::size_t violations = 0;
    for (const auto& d : small_corpus(seed)) violations += validate_preferences(d, corpus).size();
    EXPECT_EQ(violations, 0u) << "seed " << seed;
  }
}

TEST(PreferenceBuilder, ValidatorCatchesPlantedViolations) {
  const auto& corpus = testing_support::workspace().corpus;
  auto ds = small_corpus(4, 100);
  auto find = [&](auto pred) -> std::pair<Dialogue*, std::size_t> {
    for (auto& d : ds)
      for (std::size_t i = 0; i < d.turns.size(); ++i)
        if (pred(d, i)) return {&d, i};
    return {nullptr, 0};
  };

  auto [d1, i1] = find([](const Dialogue& d, std::size_t i) { return d.turns[i].intent == Intent::NextStep; });
  ASSERT_NE(d1, nullptr);
  {
    Dialogue d = *d1;
    d.turns[i1].negative = d.turns[i1].response;
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
    d = *d1;
    d.turns[i1].negative = "Walk the dog.";
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
    d = *d1;
    d.turns[i1].negative_rule = NegativeRule::RejectionTemplate;
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
  }

  auto [d2, i2] = find([](const Dialogue& d, std::size_t i) {
    if (d.turns[i].intent != Intent::Question) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (d.turns[j].intent == Intent::Question && d.turns[j].response != d.turns[i].response) return true;
    return false;
  });
  ASSERT_NE(d2, nullptr);
  {
    Dialogue d = *d2;
    d.turns[i2].negative_rule = NegativeRule::RejectionTemplate;
    d.turns[i2].negative = "Sorry, that's not something I can do.";
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
  }

  auto [d3, i3] = find([](const Dialogue& d, std::size_t i) { return d.turns[i].intent == Intent::GetFunFact; });
  if (d3) {
    Dialogue d = *d3;
    const auto& own = corpus.sidecar(d.plan_id).fun_facts.begin()->second.front();
    d.turns[i3].negative = own;
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
  }

  auto [d4, i4] = find([](const Dialogue& d, std::size_t i) { return d.turns[i].intent == Intent::Safety; });
  ASSERT_NE(d4, nullptr);
  {
    Dialogue d = *d4;
    d.turns[i4].negative = "untagged";
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
    d = *d4;
    d.turns[i4].negative_rule = NegativeRule::SafetyCompliantLive;
    EXPECT_FALSE(validate_preferences(d, corpus).empty());
    EXPECT_TRUE(validate_preferences(d, corpus, true).size() < validate_preferences(d, corpus).size());
  }
}
