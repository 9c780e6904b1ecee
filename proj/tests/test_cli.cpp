#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "plandial/dialogue.hpp"
#include "plandial/preference_builder.hpp"
#include "test_support.hpp"

using namespace plandial;
using testing_support::run_cli;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void expect_same_graph(const Json& got, const Json& want) {
  // Node order carries no meaning; compare as sets.
  ASSERT_EQ(got.at("nodes").get<std::set<std::string>>(), want.at("nodes").get<std::set<std::string>>());
  for (const auto& [src, row] : want.at("transitions").items()) {
    ASSERT_TRUE(got.at("transitions").contains(src)) << src;
    const auto& grow = got.at("transitions").at(src);
    ASSERT_EQ(grow.size(), row.size()) << src;
    for (const auto& [dst, p] : row.items()) EXPECT_NEAR(grow.at(dst).get<double>(), p.get<double>(), 1e-12) << src << "->" << dst;
  }
}

}  // namespace

TEST(Cli, GraphMatchesGoldens) {
  const auto dir = testing_support::temp_dir("graph");
  const auto log = testing_support::fixture("graph/log.jsonl");
  ASSERT_EQ(run_cli("graph --logs " + q(log) + " --boost 1.0 --out " + q(dir / "b1")).status, 0);
  ASSERT_EQ(run_cli("graph --logs " + q(log) + " --boost 2.0 --out " + q(dir / "b2")).status, 0);
  expect_same_graph(Json::parse(text::read_file(dir / "b1/graph.json")),
                    Json::parse(text::read_file(testing_support::golden("graph_unboosted.json"))));
  expect_same_graph(Json::parse(text::read_file(dir / "b2/graph.json")),
                    Json::parse(text::read_file(testing_support::golden("graph_boosted.json"))));
  const auto m = Json::parse(text::read_file(dir / "b2/manifest.json"));
  EXPECT_EQ(m.at("command"), "graph");
  EXPECT_EQ(m.at("inputs").at("logs").at("sha256").get<std::string>().size(), 64u);
}

TEST(Cli, InputErrorsExitTwo) {
  const auto dir = testing_support::temp_dir("errors");
  EXPECT_EQ(run_cli("graph --logs " + q(testing_support::fixture("graph/empty.jsonl")) + " --out " + q(dir)).status, 2);
  EXPECT_EQ(run_cli("synth --n 5 --bank /nonexistent.tsv --out " + q(dir)).status, 2);
  EXPECT_EQ(run_cli("synth --ratios 1,2 --out " + q(dir)).status, 2);
  EXPECT_EQ(run_cli("synth --bogus-flag").status, 2);
  EXPECT_EQ(run_cli("").status, 2);
  EXPECT_EQ(run_cli("prefs --live-uncensored --out " + q(dir)).status, 2);
}

TEST(Cli, SynthIsReproducible) {
  const auto dir = testing_support::temp_dir("synth");
  ASSERT_EQ(run_cli("synth --n 60 --seed 3 --jobs 1 --out " + q(dir / "a")).status, 0);
  ASSERT_EQ(run_cli("synth --n 60 --seed 3 --jobs 2 --out " + q(dir / "b")).status, 0);
  EXPECT_EQ(text::read_file(dir / "a/corpus.jsonl"), text::read_file(dir / "b/corpus.jsonl"));
  EXPECT_EQ(text::read_file(dir / "a/stats.json"), text::read_file(dir / "b/stats.json"));
  const auto ma = Json::parse(text::read_file(dir / "a/manifest.json"));
  const auto mb = Json::parse(text::read_file(dir / "b/manifest.json"));
  EXPECT_EQ(ma.at("outputs"), mb.at("outputs"));
  EXPECT_EQ(ma.at("config").at("seed"), 3);
  EXPECT_FALSE(ma.at("network").get<bool>());
  const auto stats = Json::parse(text::read_file(dir / "a/stats.json"));
  EXPECT_EQ(stats.at("dialogues"), 60);
}

TEST(Cli, PrefsPairsEveryTurnAndValidates) {
  const auto dir = testing_support::temp_dir("prefs");
  ASSERT_EQ(run_cli("synth --n 80 --seed 5 --out " + q(dir)).status, 0);
  const auto r = run_cli("prefs --corpus " + q(dir / "corpus.jsonl") + " --validate --out " + q(dir));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("0 violation"), std::string::npos);
  const auto ds = dialogues_from_jsonl(text::read_file(dir / "corpus.jsonl"));
  std::size_t turns = 0;
  for (const auto& d : ds) turns += d.turns.size();
  const auto lines = text::read_lines(dir / "pairs.jsonl");
  std::size_t pairs = 0, safety = 0;
  for (const auto& l : lines) {
    if (text::trim(l).empty()) continue;
    ++pairs;
    const auto p = pair_from_json(Json::parse(l));
    if (p.rule == NegativeRule::SafetyCompliantStub) {
      ++safety;
      EXPECT_EQ(p.rejected.rfind(std::string(kSyntheticCompliantTag), 0), 0u);
    }
    EXPECT_NE(p.chosen, p.rejected);
  }
  EXPECT_EQ(pairs, turns);
  EXPECT_GT(safety, 0u);
}

TEST(Cli, PrefsValidatorFailsOnCorruptCorpus) {
  const auto dir = testing_support::temp_dir("prefs-bad");
  ASSERT_EQ(run_cli("synth --n 10 --seed 5 --out " + q(dir)).status, 0);
  auto ds = dialogues_from_jsonl(text::read_file(dir / "corpus.jsonl"));
  ds[0].turns[0].negative = ds[0].turns[0].response;
  text::write_file(dir / "bad.jsonl", dialogues_to_jsonl(ds));
  EXPECT_EQ(run_cli("prefs --corpus " + q(dir / "bad.jsonl") + " --validate --out " + q(dir)).status, 3);
}

TEST(Cli, PromptPrintsModelInput) {
  const auto dir = testing_support::temp_dir("prompt");
  ASSERT_EQ(run_cli("synth --n 5 --seed 1 --out " + q(dir)).status, 0);
  const auto r = run_cli("prompt --corpus " + q(dir / "corpus.jsonl") + " --dialogue dlg-000002 --turn 0");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("<|prompter|>", 0), 0u);
  EXPECT_EQ(run_cli("prompt --corpus " + q(dir / "corpus.jsonl") + " --dialogue nope").status, 2);
}

TEST(Cli, LossesReport) {
  auto r = run_cli("losses");
  EXPECT_EQ(r.status, 0) << r.out;
  r = run_cli("losses --grad-check 100 --json --beta 0.1 --lambda 0.2");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("beta").get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(j.at("lambda_sft").get<double>(), 0.2);
  for (const auto& [k, v] : j.at("grad_check").items()) EXPECT_TRUE(v.at("pass").get<bool>()) << k;
  EXPECT_EQ(run_cli("losses --beta 0").status, 2);
}

TEST(Cli, EvalCommands) {
  const auto dir = testing_support::temp_dir("eval");
  text::write_file(dir / "c.txt", "police kill the gunman\nhello there\n");
  text::write_file(dir / "r.txt", "police kill the gunman\nhello there\n");
  auto r = run_cli("eval rouge --json --cand " + q(dir / "c.txt") + " --ref " + q(dir / "r.txt"));
  ASSERT_EQ(r.status, 0);
  EXPECT_DOUBLE_EQ(Json::parse(r.out).at("rouge_l").at("f1").get<double>(), 1.0);

  r = run_cli("eval kappa --json --matrix " + q(testing_support::fixture("kappa_perfect.json")));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(Json::parse(r.out).at("fleiss_kappa").get<double>(), 1.0);

  for (const char* kind : {"win_rate", "navigation", "qa", "replacement", "fun_fact", "politeness", "safety"}) {
    r = run_cli(std::string("eval judge-prompt --kind ") + kind + " --fixture " +
                q(testing_support::fixture("judge/fixture.json")));
    ASSERT_EQ(r.status, 0) << kind;
    EXPECT_EQ(r.out, text::read_file(testing_support::golden(std::string("judge_") + kind + ".txt"))) << kind;
  }

  std::string verdicts;
  for (int i = 0; i < 4; ++i)
    verdicts += Json({{"kind", "win_rate"}, {"item_id", "i" + std::to_string(i)}, {"raw", i == 3 ? "no idea" : "Answer: Response 1"},
                      {"candidate_position", i == 2 ? 2 : 1}})
                    .dump() +
                "\n";
  text::write_file(dir / "v.jsonl", verdicts);
  r = run_cli("eval winrate --json --verdicts " + q(dir / "v.jsonl"));
  ASSERT_EQ(r.status, 0);
  const auto w = Json::parse(r.out);
  EXPECT_EQ(w.at("counted"), 3);
  EXPECT_EQ(w.at("wins"), 2);
  EXPECT_EQ(w.at("excluded_items"), Json::array({"i3"}));
}

TEST(Cli, ConfigFileAndEnvironment) {
  const auto dir = testing_support::temp_dir("config");
  text::write_file(dir / "run.ini", "[synth]\nn=7\nseed=11\n");
  ASSERT_EQ(run_cli("--config " + q(dir / "run.ini") + " synth --out " + q(dir / "a")).status, 0);
  auto m = Json::parse(text::read_file(dir / "a/manifest.json"));
  EXPECT_EQ(m.at("config").at("n"), 7);
  EXPECT_EQ(m.at("config").at("seed"), 11);
  // An explicit flag wins over the file.
  ASSERT_EQ(run_cli("--config " + q(dir / "run.ini") + " synth --n 9 --out " + q(dir / "b")).status, 0);
  m = Json::parse(text::read_file(dir / "b/manifest.json"));
  EXPECT_EQ(m.at("config").at("n"), 9);
  EXPECT_EQ(m.at("config").at("seed"), 11);
  // Environment overrides the default.
  ASSERT_EQ(std::system(("cd " + q(testing_support::source_dir()) + " && PLANDIAL_N=4 '" + std::string(PLANDIAL_CLI) +
                         "' synth --out " + q(dir / "e") + " >/dev/null 2>&1")
                            .c_str()),
            0);
  m = Json::parse(text::read_file(dir / "e/manifest.json"));
  EXPECT_EQ(m.at("config").at("n"), 4);
}
