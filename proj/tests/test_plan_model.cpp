#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>

#include "plandial/plan_model.hpp"
#include "test_support.hpp"

using namespace plandial;
using testing_support::error_code;

namespace {

const char* kPlan = R"({
  "id": "p1", "title": "Toast", "domain": "cooking",
  "steps": [
    {"index": 1, "text": "Slice the Bread.", "entities": ["Bread"], "resources": ["bread"]},
    {"index": 2, "text": "Toast it with butter.", "resources": ["butter", "toaster"]},
    {"index": 3, "text": "Serve warm."}
  ]
})";

ProceduralPlan plan_with(std::string id, std::set<std::string> resources) {
  ProceduralPlan p;
  p.id = std::move(id);
  p.title = "t";
  p.steps.push_back({1, "step", {}, resources});
  p.all_resources = resources;
  return p;
}

}  // namespace

TEST(PlanModel, ParsesAndLowercases) {
  const auto p = parse_plan(kPlan);
  EXPECT_EQ(p.size(), 3);
  EXPECT_EQ(p.step(1).entities, std::set<std::string>{"bread"});
  EXPECT_EQ(p.all_resources, (std::set<std::string>{"bread", "butter", "toaster"}));
  EXPECT_EQ(error_code([&] { p.step(4); }), ErrorCode::StepOutOfRange);
  EXPECT_EQ(error_code([&] { p.step(0); }), ErrorCode::StepOutOfRange);
}

TEST(PlanModel, RoundTripsThroughJson) {
  const auto p = parse_plan(kPlan);
  const auto q = parse_plan(serialize_plan(p));
  EXPECT_EQ(serialize_plan(p), serialize_plan(q));
}

TEST(PlanModel, RejectsBrokenPlans) {
  EXPECT_EQ(error_code([] { parse_plan("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_code([] { parse_plan(R"({"id":"x","title":"t","domain":"cooking"})"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_code([] {
              parse_plan(R"({"id":"x","title":"t","domain":"cooking","steps":[{"index":2,"text":"a"}]})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] { parse_plan(R"({"id":"x","title":"t","domain":"cooking","steps":[]})"); }),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] {
              parse_plan(R"({"id":"x","title":"t","domain":"cooking","steps":[{"index":1,"text":"  "}]})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] {
              parse_plan(R"({"id":"x","title":"t","domain":"cooking","all_resources":[],
                             "steps":[{"index":1,"text":"a","resources":["egg"]}]})");
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] { parse_plan(R"({"id":"x","title":"t","domain":"space","steps":[{"index":1,"text":"a"}]})"); }),
            ErrorCode::ParseError);
}

TEST(PlanModel, WarnsOnShortPlans) {
  std::vector<std::string> warnings;
  parse_plan(R"({"id":"x","title":"t","domain":"diy","steps":[{"index":1,"text":"a"},{"index":2,"text":"b"}]})",
             &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  warnings.clear();
  parse_plan(kPlan, &warnings);
  EXPECT_TRUE(warnings.empty());
}

TEST(PlanModel, SidecarBoundsAreChecked) {
  const auto p = parse_plan(kPlan);
  auto sc = sidecar_from_json(Json::parse(R"({"qa_pairs":{"3":[{"question":"q","answer":"a"}]}})"));
  EXPECT_NO_THROW(validate_sidecar(sc, p));
  sc = sidecar_from_json(Json::parse(R"({"fun_facts":{"4":["f"]}})"));
  EXPECT_EQ(error_code([&] { validate_sidecar(sc, p); }), ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] { sidecar_from_json(Json::parse(R"({"qa_pairs":{"two":[]}})")); }), ErrorCode::ParseError);
  sc = sidecar_from_json(Json::parse(R"({"substitutions":{"egg":[]}})"));
  EXPECT_EQ(error_code([&] { validate_sidecar(sc, p); }), ErrorCode::ValidationError);
}

TEST(PlanModel, SubstitutionTsv) {
  const auto db = parse_substitutions_tsv("# comment\nButter\tghee\n\nbutter\tolive oil\negg\tflax\n");
  ASSERT_EQ(db.size(), 2u);
  EXPECT_EQ(db.at("butter"), (std::vector<std::string>{"ghee", "olive oil"}));
  EXPECT_EQ(error_code([] { parse_substitutions_tsv("onlyone\n"); }), ErrorCode::ParseError);
}

TEST(PlanModel, RareResourcesCountOncePerPlan) {
  std::vector<ProceduralPlan> plans;
  // "salt" in 5 plans, "saffron" in 1, "egg" in exactly 4 (the threshold).
  for (int i = 0; i < 5; ++i) {
    std::set<std::string> r = {"salt"};
    if (i == 0) r.insert("saffron");
    if (i < 4) r.insert("egg");
    plans.push_back(plan_with("p" + std::to_string(i), r));
  }
  // A resource repeated across steps of one plan still counts once.
  plans[0].steps.push_back({2, "again", {}, {"saffron"}});
  const auto rare = compute_rare_resources(plans, 4);
  EXPECT_EQ(rare, (std::set<std::string>{"egg", "saffron"}));

  // Independent count over the shipped corpus.
  const auto& corpus = testing_support::workspace().corpus;
  std::map<std::string, std::set<std::string>> plans_using;
  for (const auto& p : corpus.plans)
    for (const auto& s : p.steps)
      for (const auto& r : s.resources) plans_using[r].insert(p.id);
  std::set<std::string> expected;
  for (const auto& [r, ids] : plans_using)
    if (ids.size() <= static_cast<std::size_t>(kRareResourceThreshold)) expected.insert(r);
  EXPECT_EQ(corpus.sidecars.begin()->second.rare_resources, expected);
}

TEST(PlanModel, EntitiesRespectWordBoundaries) {
  const std::map<std::string, std::string> defs = {
      {"basil", "a herb"}, {"basil pesto", "a sauce"}, {"oil", "fat"}, {"pan", "vessel"}};
  EXPECT_EQ(extract_entities("Stir the Basil Pesto into the pan.", defs),
            (std::set<std::string>{"basil", "basil pesto", "pan"}));
  // "oil" inside "boil" and "pan" inside "pancakes" are not matches.
  EXPECT_TRUE(extract_entities("Boil the pancakes.", defs).empty());
  EXPECT_EQ(extract_entities("oil", defs), std::set<std::string>{"oil"});
}

TEST(PlanModel, ReplaceableNeedsRareAndKnown) {
  auto p = parse_plan(kPlan);
  KnowledgeSidecar sc;
  sc.substitutions = {{"butter", {"ghee"}}, {"toaster", {"grill"}}};
  sc.rare_resources = {"butter", "bread"};
  EXPECT_EQ(replaceable_candidates(p, sc, 2), std::set<std::string>{"butter"});
  EXPECT_TRUE(replaceable_candidates(p, sc, 1).empty());
}

TEST(PlanModel, ShippedCorpusLoads) {
  const auto& corpus = testing_support::workspace().corpus;
  EXPECT_GE(corpus.plans.size(), 50u);
  EXPECT_EQ(corpus.sidecars.size(), corpus.plans.size());
  for (std::size_t i = 1; i < corpus.plans.size(); ++i) EXPECT_LT(corpus.plans[i - 1].id, corpus.plans[i].id);
  bool cooking = false, diy = false;
  for (const auto& p : corpus.plans) (p.domain == PlanDomain::Cooking ? cooking : diy) = true;
  EXPECT_TRUE(cooking && diy);
  EXPECT_EQ(error_code([&] { corpus.plan("missing"); }), ErrorCode::ValidationError);
  EXPECT_EQ(error_code([] { load_corpus("/nonexistent/plans"); }), ErrorCode::IoError);
}
