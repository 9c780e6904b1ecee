// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <openssl/evp.h>
#include <sys/wait.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "plandial/dialogue.hpp"
#include "plandial/eval_harness.hpp"
#include "plandial/gradcheck.hpp"
#include "plandial/objectives.hpp"
#include "plandial/preference_builder.hpp"
#include "plandial/synth_pipeline.hpp"
#include "plandial/workspace.hpp"

namespace fs = std::filesystem;
using namespace plandial;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

const fs::path kRoot = PLANDIAL_SOURCE_DIR;

const Workspace& workspace() {
  static const auto ws = load_workspace(WorkspacePaths::under(kRoot), WalkConfig{});
  return *ws;
}

// 1 -------------------------------------------------------------------------
Verdict identity_ln2() {
  SplitMix64 rng(101);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    auto g = random_instance(rng);
    const double beta = 0.01 + 2.0 * rng.uniform();
    for (const auto& p : g.prefs) worst = std::max(worst, std::abs(dpo_loss(g.policy, g.policy, p, beta) - std::log(2.0)));
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-12 && dt < 1.0, "max |err| " + fmt(worst) + ", " + fmt(dt) + " s"};
}

// 2 -------------------------------------------------------------------------
Verdict gradient_check() {
  SplitMix64 rng(202);
  TrainingConfig cfg;
  std::map<LossKind, double> worst;
  const auto t0 = Clock::now();
  for (int i = 0; i < 100; ++i) {
    const auto g = random_instance(rng);
    for (auto k : {LossKind::Sft, LossKind::Dpo, LossKind::DpoX})
      worst[k] = std::max(worst[k], check_instance(g, k, cfg).max_rel_error);
  }
  const double dt = seconds_since(t0);
  bool ok = dt < 10.0;
  double all = 0.0;
  for (const auto& [_, v] : worst) {
    ok &= v < 1e-5;
    all = std::max(all, v);
  }
  return {ok, "max rel err " + fmt(all) + " over 3 losses x 100, " + fmt(dt) + " s"};
}

// 3 -------------------------------------------------------------------------
Verdict mix_linearity() {
  SplitMix64 rng(303);
  const double lambdas[] = {0.0, 0.05, 0.1, 0.2};
  double worst = 0.0;
  bool exact_at_zero = true;
  for (int i = 0; i < 500; ++i) {
    const auto g = random_instance(rng);
    for (const auto& item : g.mixed) {
      double f[4];
      for (int j = 0; j < 4; ++j) f[j] = dpo_x_loss(g.policy, g.reference, item, {0.4, lambdas[j]}).total;
      const double slope = (f[3] - f[0]) / (lambdas[3] - lambdas[0]);
      for (int j = 1; j < 3; ++j) worst = std::max(worst, std::abs(f[j] - (f[0] + slope * lambdas[j])));
      exact_at_zero &= f[0] == dpo_loss(g.policy, g.reference, item.pair, 0.4);
    }
  }
  return {worst < 1e-10 && exact_at_zero,
          "max residual " + fmt(worst) + (exact_at_zero ? ", lambda=0 exact" : ", lambda=0 differs")};
}

// 4 -------------------------------------------------------------------------
Verdict margin_monotonicity() {
  const auto reference = ToyPolicy::uniform(1, 2);
  const PreferenceItem pair{0, {0}, {1}};
  bool ok = TrainingConfig{}.beta == 0.4;
  for (double beta : {0.1, 0.4}) {
    double prev = INFINITY;
    for (int i = 0; i < 50; ++i) {
      const double gap = -10.0 + 20.0 * i / 49.0;
      ToyPolicy p = ToyPolicy::uniform(1, 2);
      p.logits[0] = {gap / 2, -gap / 2};
      const double l = dpo_loss(p, reference, pair, beta);
      ok &= l < prev;
      prev = l;
    }
  }
  return {ok, "50-point sweep at beta 0.1 and 0.4, default beta " + fmt(TrainingConfig{}.beta)};
}

// 5 -------------------------------------------------------------------------
std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = "cd '" + kRoot.string() + "' && '" + PLANDIAL_CLI + "' " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Verdict corpus_reproducibility() {
  const auto dir = fs::temp_directory_path() / "plandial-acceptance";
  fs::remove_all(dir);
  std::vector<std::string> digests;
  double slowest = 0.0;
  for (const char* run : {"a", "b"}) {
    const auto t0 = Clock::now();
    if (run_cli("synth --n 100 --seed 17 --out '" + (dir / run).string() + "'") != 0) return {false, "synth failed"};
    slowest = std::max(slowest, seconds_since(t0));
    digests.push_back(sha256_hex(text::read_file(dir / run / "corpus.jsonl")));
  }
  fs::remove_all(dir);
  return {digests[0] == digests[1] && slowest < 30.0,
          "sha256 " + digests[0].substr(0, 16) + (digests[0] == digests[1] ? " (equal)" : " vs " + digests[1].substr(0, 16)) +
              ", slowest run " + fmt(slowest) + " s"};
}

// 6 -------------------------------------------------------------------------
Verdict corpus_shape() {
  const auto& ws = workspace();
  const SynthConfig cfg;
  const auto ds = synthesize_corpus(ws.resources(), cfg);
  const auto stats = corpus_stats(ds);
  std::map<std::string, std::set<Split>> splits_of_plan;
  std::map<Split, std::set<std::string>> plans_in;
  for (const auto& d : ds) {
    splits_of_plan[d.plan_id].insert(d.split);
    plans_in[d.split].insert(d.plan_id);
  }
  bool disjoint = true;
  for (const auto& [_, s] : splits_of_plan) disjoint &= s.size() == 1;
  const auto want = apportion(splits_of_plan.size(), cfg.split_ratios);
  const bool counts = plans_in[Split::Train].size() == want.train && plans_in[Split::Val].size() == want.val &&
                      plans_in[Split::Test].size() == want.test && plans_in[Split::Unassigned].empty();
  const bool ratios = cfg.split_ratios.train == 0.9 && cfg.split_ratios.val == 0.05 && cfg.split_ratios.test == 0.05;
  const bool enough = ws.corpus.plans.size() >= 50;
  const bool mean_ok = stats.mean_turns >= 8.0 && stats.mean_turns <= 14.0;
  return {mean_ok && disjoint && counts && ratios && enough,
          "mean turns " + fmt(stats.mean_turns) + ", plans " + std::to_string(ws.corpus.plans.size()) + ", split " +
              std::to_string(plans_in[Split::Train].size()) + "/" + std::to_string(plans_in[Split::Val].size()) + "/" +
              std::to_string(plans_in[Split::Test].size()) + (disjoint ? ", plan-disjoint" : ", plans leak across splits")};
}

// 7 -------------------------------------------------------------------------
Verdict sampler_fidelity() {
  const auto& g = workspace().graph;
  constexpr int kSamples = 10000;
  SplitMix64 rng(707);
  double worst_dev = 0.0, worst_p = 1.0;
  std::size_t nodes = 0;
  for (Intent src : g.nodes()) {
    const auto& succ = g.successors(src);
    if (succ.empty()) continue;
    ++nodes;
    std::map<Intent, int> seen;
    for (int i = 0; i < kSamples; ++i) ++seen[next_intent(g, src, rng)];
    double chi2 = 0.0;
    int counted = 0;
    for (const auto& [dst, p] : succ) {
      const int o = seen[dst];
      counted += o;
      worst_dev = std::max(worst_dev, std::abs(o / double(kSamples) - p));
      const double e = p * kSamples;
      chi2 += (o - e) * (o - e) / e;
    }
    if (counted != kSamples) return {false, "sampled an edge that is not in the graph"};
    if (succ.size() > 1) {
      const boost::math::chi_squared dist(static_cast<double>(succ.size() - 1));
      worst_p = std::min(worst_p, boost::math::cdf(boost::math::complement(dist, chi2)));
    }
  }
  return {worst_dev <= 0.02 && worst_p > 0.01,
          std::to_string(nodes) + " nodes, max edge dev " + fmt(worst_dev) + ", min chi-square p " + fmt(worst_p)};
}

// 8 -------------------------------------------------------------------------
Verdict preference_validity() {
  const auto& ws = workspace();
  std::size_t violations = 0, turns = 0;
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    SynthConfig cfg;
    cfg.n_dialogues = 300;
    cfg.seed = seed;
    for (const auto& d : synthesize_corpus(ws.resources(), cfg)) {
      turns += d.turns.size();
      violations += validate_preferences(d, ws.corpus, false).size();
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(turns) + " turns"};
}

// 9 -------------------------------------------------------------------------
Verdict prompt_goldens() {
  const auto fixtures = kRoot / "tests/fixtures";
  const auto golden = kRoot / "tests/golden";
  const auto d = dialogue_from_json(Json::parse(text::read_file(fixtures / "table6/dialogue.json")));
  const auto plan = load_plan(fixtures / "table6/plan.json");
  int matched = 0, total = 0;
  for (const auto& [turn, file] : {std::pair<std::size_t, const char*>{0, "table6_turn0.txt"}, {5, "table6_turn5.txt"}}) {
    ++total;
    matched += render_prompt(d, plan, turn, 4) == text::read_file(golden / file);
  }
  const auto j = Json::parse(text::read_file(fixtures / "judge/fixture.json"));
  const JudgeFixture fx{j.at("recipe_text"), j.at("dialog"), j.at("user"), j.at("response_1"), j.at("response_2")};
  for (auto k : kJudgeKinds) {
    ++total;
    matched += build_judge_prompt(k, fx).rendered_text ==
               text::read_file(golden / ("judge_" + std::string(to_string(k)) + ".txt"));
  }
  return {matched == total, std::to_string(matched) + "/" + std::to_string(total) + " goldens byte-equal"};
}

// 10 ------------------------------------------------------------------------
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::size_t j = 0, len = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(mask & (1u << i))) continue;
      ++len;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) {
        len = 0;
        break;
      }
      ++j;
    }
    best = std::max(best, len);
  }
  return best;
}

double kappa_by_pairs(const std::vector<std::vector<int>>& counts) {
  const std::size_t k = counts.front().size();
  double agree = 0.0, pairs = 0.0, labels = 0.0;
  std::vector<double> mass(k, 0.0);
  for (const auto& row : counts) {
    std::vector<std::size_t> raters;
    for (std::size_t c = 0; c < k; ++c)
      for (int x = 0; x < row[c]; ++x) raters.push_back(c);
    for (std::size_t x = 0; x < raters.size(); ++x) {
      mass[raters[x]] += 1.0;
      labels += 1.0;
      for (std::size_t y = 0; y < raters.size(); ++y) {
        if (x == y) continue;
        pairs += 1.0;
        agree += raters[x] == raters[y];
      }
    }
  }
  double pe = 0.0;
  for (double m : mass) pe += (m / labels) * (m / labels);
  return (agree / pairs - pe) / (1.0 - pe);
}

Verdict metric_oracles() {
  SplitMix64 rng(1010);
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  int rouge_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> c(1 + rng.below(10)), r(1 + rng.below(10));
    for (auto& t : c) t = vocab[rng.below(vocab.size())];
    for (auto& t : r) t = vocab[rng.below(vocab.size())];
    const auto got = rouge_l_tokens(c, r);
    const double l = static_cast<double>(brute_lcs(c, r));
    RougeScore want;
    if (l > 0) {
      want.precision = l / c.size();
      want.recall = l / r.size();
      want.f1 = 2.0 * want.precision * want.recall / (want.precision + want.recall);
    }
    rouge_bad += !(got.precision == want.precision && got.recall == want.recall && got.f1 == want.f1);
  }
  const double police = rouge_l("police killed the gunman", "police kill the gunman").f1;

  int kappa_bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t items = 2 + rng.below(10), k = 2 + rng.below(4);
    const int raters = 2 + static_cast<int>(rng.below(6));
    AnnotationMatrix m;
    bool perfect = true;
    for (std::size_t it = 0; it < items; ++it) {
      std::vector<int> row(k, 0);
      for (int x = 0; x < raters; ++x) ++row[rng.below(k)];
      perfect &= *std::max_element(row.begin(), row.end()) == raters;
      m.counts.push_back(row);
    }
    const double got = fleiss_kappa(m);
    if (perfect) {
      kappa_bad += got != 1.0;
      continue;
    }
    const double err = std::abs(got - kappa_by_pairs(m.counts));
    worst = std::max(worst, err);
    kappa_bad += !(err <= 1e-9);
  }
  const double perfect = fleiss_kappa({{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}, {3, 0, 0}}});
  const bool ok = rouge_bad == 0 && std::abs(police - 0.75) < 1e-15 && kappa_bad == 0 && perfect == 1.0;
  return {ok, "rouge mismatches " + std::to_string(rouge_bad) + ", police F1 " + fmt(police) + ", kappa max err " +
                  fmt(worst) + ", perfect " + fmt(perfect)};
}

// 11 ------------------------------------------------------------------------
template <class T>
const T& pick(const std::set<T>& s, SplitMix64& rng) {
  auto it = s.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.below(s.size())));
  return *it;
}

Verdict policy_totality() {
  const auto& ws = workspace();
  StubGeneratorPort port;
  SplitMix64 rng(1111);
  const std::vector<std::string> texts = {"", "thanks so much", "tell me a joke", "what is this?", "how do i poison it"};
  const std::set<ErrorCode> expected = {ErrorCode::NoQAForStep, ErrorCode::NoFunFact, ErrorCode::UnknownEntity,
                                        ErrorCode::UnknownResource};
  std::map<std::string, int> tally;
  int bad = 0;
  std::string first_bad;
  for (int i = 0; i < 10000; ++i) {
    const auto& plan = ws.corpus.plans[rng.below(ws.corpus.plans.size())];
    const auto& sc = ws.corpus.sidecar(plan.id);
    DialogueState st;
    st.plan = &plan;
    st.tone = kTones[rng.below(kTones.size())];
    st.step_ptr = static_cast<int>(rng.below(static_cast<std::uint64_t>(plan.size()) + 1));
    st.finished = st.step_ptr == plan.size() && rng.below(2) == 0;
    const Intent intent = kUserIntents[rng.below(kUserIntents.size())];

    TurnPayload pl;
    pl.user_text = texts[rng.below(texts.size())];
    if (st.step_ptr >= 1) {
      const auto& step = plan.step(st.step_ptr);
      if (!step.entities.empty() && rng.below(2)) pl.entity = pick(step.entities, rng);
      if (!step.resources.empty() && rng.below(2)) pl.resource = pick(step.resources, rng);
      if (const auto* qa = sc.qa_for(st.step_ptr); qa && rng.below(2)) pl.qa = (*qa)[rng.below(qa->size())];
    }
    if (rng.below(8) == 0) pl.entity = "zzz-not-an-entity";
    if (rng.below(8) == 0) pl.resource = "zzz-not-a-resource";

    try {
      const auto r = respond(st, intent, pl, {&sc, &ws.responses, &port}, rng);
      const int n_cat = static_cast<int>(std::count(kCategories.begin(), kCategories.end(), r.category));
      if (r.state.step_ptr < 0 || r.state.step_ptr > plan.size() || n_cat != 1 || r.category != category_of(intent) ||
          r.response.empty()) {
        if (!bad++) first_bad = std::string(to_string(intent)) + " produced an invalid result";
      }
      ++tally["ok"];
    } catch (const Error& e) {
      const bool allowed = expected.count(e.code()) ||
                           (e.code() == ErrorCode::UnhandledIntent && st.finished && intent != Intent::ChitChat &&
                            intent != Intent::Question);
      if (!allowed && !bad++) first_bad = std::string(to_string(intent)) + ": " + e.what();
      ++tally[std::string(to_string(e.code()))];
    } catch (const std::exception& e) {
      if (!bad++) first_bad = e.what();
    }
  }
  std::string detail = std::to_string(tally["ok"]) + " served, " + std::to_string(bad) + " unexpected";
  if (bad) detail += " (first: " + first_bad + ")";
  return {bad == 0, detail};
}

// 12 ------------------------------------------------------------------------
Verdict safety_behavior() {
  const auto& ws = workspace();
  std::vector<std::string> requests;
  for (const auto& l : text::read_lines(kRoot / "data/safety/dangerous_requests.txt"))
    if (!text::trim(l).empty()) requests.emplace_back(text::trim(l));
  StubGeneratorPort port;
  SplitMix64 rng(1212);
  int rejected = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& plan = ws.corpus.plans[i % ws.corpus.plans.size()];
    DialogueState st;
    st.plan = &plan;
    st.tone = kTones[i % kTones.size()];
    st.step_ptr = static_cast<int>(i % (plan.size() + 1));
    TurnPayload pl;
    pl.user_text = requests[i];
    const auto r = respond(st, Intent::Safety, pl, {&ws.corpus.sidecar(plan.id), &ws.responses, &port}, rng);
    rejected += ws.responses.in_cell(Situation::SafetyReject, st.tone, r.response) && r.state.step_ptr == st.step_ptr;
  }
  return {requests.size() == 50 && rejected == 50,
          std::to_string(rejected) + "/" + std::to_string(requests.size()) + " answered from the rejection cell"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"dpo identity ln2", identity_ln2},
      {"gradient certification", gradient_check},
      {"mix linearity", mix_linearity},
      {"margin monotonicity", margin_monotonicity},
      {"corpus reproducibility", corpus_reproducibility},
      {"corpus shape", corpus_shape},
      {"sampler fidelity", sampler_fidelity},
      {"preference validity", preference_validity},
      {"prompt bit-exactness", prompt_goldens},
      {"metric oracles", metric_oracles},
      {"policy totality", policy_totality},
      {"safety behavior", safety_behavior},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << std::setw(2) << i + 1 << " " << criteria[i].first << ": "
              << o.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
