// plandial: command-line front end for graph building, corpus synthesis,
// preference pairs, prompt rendering, objective checks and evaluation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "plandial/eval_harness.hpp"
#include "plandial/gradcheck.hpp"
#include "plandial/http_port.hpp"
#include "plandial/objectives.hpp"
#include "plandial/preference_builder.hpp"
#include "plandial/synth_pipeline.hpp"
#include "plandial/workspace.hpp"

namespace fs = std::filesystem;
using namespace plandial;

namespace {

constexpr const char* kVersion = "0.3.0";

enum Exit { kOk = 0, kInputError = 2, kInvariantError = 3 };

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// Digest of a file, or of every regular file under a directory (sorted by
/// relative path, each as "path\0contents").
std::string digest_path(const fs::path& p) {
  if (fs::is_regular_file(p)) return sha256_hex(text::read_file(p));
  if (!fs::is_directory(p)) return "missing";
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& f : files) {
    acc += fs::relative(f, p).generic_string();
    acc.push_back('\0');
    acc += sha256_hex(text::read_file(f));
    acc.push_back('\n');
  }
  return sha256_hex(acc);
}

/// Run manifest: config snapshot, seeds and digests. No timestamps, so two
/// identical runs write identical manifests.
struct Manifest {
  std::string command;
  Json config = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();
  bool network = false;

  void input(const std::string& name, const fs::path& p) {
    if (!p.empty()) inputs[name] = {{"path", p.generic_string()}, {"sha256", digest_path(p)}};
  }
  void output(const fs::path& p) { outputs[p.filename().string()] = sha256_hex(text::read_file(p)); }

  void write(const fs::path& dir) const {
    Json j = {{"tool", "plandial"}, {"version", kVersion}, {"command", command}, {"config", config},
              {"inputs", inputs},   {"outputs", outputs}, {"network", network}};
    text::write_file(dir / "manifest.json", j.dump(2) + "\n");
  }
};

void ensure_dir(const fs::path& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + d.string() + ": " + ec.message());
}

std::unique_ptr<GeneratorPort> make_port(const std::string& url, int timeout_ms) {
  if (url.empty()) return std::make_unique<StubGeneratorPort>();
  HttpPortConfig cfg;
  const auto scheme = url.find("://");
  const auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  cfg.base_url = url.substr(0, path_at);
  if (path_at != std::string::npos) cfg.path = url.substr(path_at);
  cfg.timeout_ms = timeout_ms;
  return std::make_unique<HttpGeneratorPort>(cfg);
}

// ---------------------------------------------------------------------------

struct CommonPaths {
  WorkspacePaths ws;
  std::string graph;
  std::string out = "out";

  void add(CLI::App* c, bool with_bank) {
    c->add_option("--plans", ws.plans, "plan directory")->envname("PLANDIAL_PLANS")->capture_default_str();
    c->add_option("--sidecars", ws.sidecars, "sidecar directory")->envname("PLANDIAL_SIDECARS")->capture_default_str();
    c->add_option("--subs", ws.substitutions, "substitution TSV")->envname("PLANDIAL_SUBS")->capture_default_str();
    if (with_bank) {
      c->add_option("--bank", ws.bank, "utterance bank TSV")->envname("PLANDIAL_BANK")->capture_default_str();
      c->add_option("--templates", ws.templates, "response templates JSON")
          ->envname("PLANDIAL_TEMPLATES")
          ->capture_default_str();
      c->add_option("--requests", ws.requests, "user request templates JSON")
          ->envname("PLANDIAL_REQUESTS")
          ->capture_default_str();
      c->add_option("--logs", ws.logs, "interaction log JSONL")->envname("PLANDIAL_LOGS")->capture_default_str();
      c->add_option("--graph", graph, "prebuilt graph JSON (overrides --logs)")->envname("PLANDIAL_GRAPH");
    }
    c->add_option("--out", out, "output directory")->envname("PLANDIAL_OUT")->capture_default_str();
  }
};

// graph ---------------------------------------------------------------------

struct GraphArgs {
  std::string logs = "data/logs/interactions.jsonl";
  double boost = 2.0;
  std::string out = "out";
};

int cmd_graph(const GraphArgs& a, const std::string& snapshot) {
  WalkConfig walk;
  walk.boost_factor = a.boost;
  const auto raw = build_from_logs(load_log(a.logs));
  const auto g = reweight(raw, walk);
  validate_graph(g);
  ensure_dir(a.out);
  const fs::path out = fs::path(a.out) / "graph.json";
  text::write_file(out, graph_to_json(g).dump(2) + "\n");

  std::cout << "nodes " << g.nodes().size() << ", boost " << a.boost << "\n";
  for (const auto& [src, succ] : g.trans) {
    if (succ.empty()) continue;
    std::cout << "  " << std::left << std::setw(20) << to_string(src);
    for (const auto& [dst, p] : succ) std::cout << " " << to_string(dst) << "=" << std::fixed << std::setprecision(3) << p;
    std::cout << "\n";
  }
  Manifest m;
  m.command = "graph";
  m.config = {{"cli", snapshot}, {"boost", a.boost}};
  m.input("logs", a.logs);
  m.output(out);
  m.write(a.out);
  return kOk;
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  CommonPaths paths;
  int n = 100;
  std::uint64_t seed = 0;
  std::string ratios = "90,5,5";
  int t = 4;
  double boost = 2.0;
  int max_turns = 20;
  int jobs = 0;
  std::string port_url;
  int port_timeout_ms = 10000;
};

int cmd_synth(SynthArgs a, const std::string& snapshot) {
  SynthConfig cfg;
  cfg.n_dialogues = a.n;
  cfg.seed = a.seed;
  cfg.split_ratios = parse_ratios(a.ratios);
  cfg.context_window = a.t;
  cfg.walk.boost_factor = a.boost;
  cfg.walk.max_turns = a.max_turns;
  cfg.jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  cfg.validate();

  a.paths.ws.graph = a.paths.graph;
  auto ws = load_workspace(a.paths.ws, cfg.walk);
  if (!a.port_url.empty()) ws->chat_port = make_port(a.port_url, a.port_timeout_ms);
  for (const auto& w : ws->corpus.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& r : ws->scrub.rewritten) std::cerr << "scrubbed: " << r << "\n";
  for (const auto& r : ws->scrub.dropped) std::cerr << "dropped: " << r << "\n";

  const auto t0 = std::chrono::steady_clock::now();
  const auto dialogues = synthesize_corpus(ws->resources(), cfg);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ensure_dir(a.paths.out);
  const fs::path out = a.paths.out;
  text::write_file(out / "corpus.jsonl", dialogues_to_jsonl(dialogues));
  const auto stats = corpus_stats(dialogues);
  text::write_file(out / "stats.json", stats_to_json(stats).dump(2) + "\n");
  text::write_file(out / "stats.txt", stats_to_text(stats));
  std::cout << stats_to_text(stats);
  std::cerr << "synthesized " << dialogues.size() << " dialogues in " << std::setprecision(3) << secs << " s with "
            << cfg.jobs << " job(s)\n";

  Manifest m;
  m.command = "synth";
  // jobs is excluded from the snapshot on purpose: output does not depend on it.
  m.config = {{"n", a.n},        {"seed", a.seed},   {"ratios", a.ratios}, {"t", a.t},
              {"boost", a.boost}, {"max_turns", a.max_turns}, {"port", a.port_url.empty() ? "stub" : a.port_url}};
  m.config["cli"] = snapshot;
  m.network = !a.port_url.empty();
  m.input("plans", a.paths.ws.plans);
  m.input("sidecars", a.paths.ws.sidecars);
  m.input("substitutions", a.paths.ws.substitutions);
  m.input("bank", a.paths.ws.bank);
  m.input("templates", a.paths.ws.templates);
  m.input("requests", a.paths.ws.requests);
  if (a.paths.graph.empty())
    m.input("logs", a.paths.ws.logs);
  else
    m.input("graph", a.paths.graph);
  for (const char* f : {"corpus.jsonl", "stats.json", "stats.txt"}) m.output(out / f);
  m.write(out);
  return kOk;
}

// prefs ---------------------------------------------------------------------

struct PrefsArgs {
  CommonPaths paths;
  std::string corpus = "out/corpus.jsonl";
  int t = 4;
  bool validate = false;
  bool live_uncensored = false;
  std::string port_url;
  int port_timeout_ms = 10000;
};

int cmd_prefs(const PrefsArgs& a, const std::string&) {
  if (a.live_uncensored && a.port_url.empty())
    fail(ErrorCode::ValidationError, "--live-uncensored needs --port-url");
  const auto corpus = load_corpus(a.paths.ws.plans, a.paths.ws.sidecars, a.paths.ws.substitutions);
  auto dialogues = dialogues_from_jsonl(text::read_file(a.corpus));

  if (a.live_uncensored) {
    // Replace stub safety negatives with live generations.
    auto port = make_port(a.port_url, a.port_timeout_ms);
    const auto templates = load_response_templates(a.paths.ws.templates);
    for (auto& d : dialogues) {
      const auto& plan = corpus.plan(d.plan_id);
      SplitMix64 rng(derive_seed(d.seed, 0x5afe));
      NegativeContext ctx{&plan, &corpus.sidecar(d.plan_id), &corpus, &templates, port.get(), true, d.tone};
      for (std::size_t i = 0; i < d.turns.size(); ++i) {
        auto& t = d.turns[i];
        if (t.intent != Intent::Safety) continue;
        auto neg = negative_for(t, std::span(d.turns).first(i), ctx, rng);
        t.negative = neg.text;
        t.negative_rule = neg.rule;
        t.negative_source = neg.source;
      }
    }
  }

  ensure_dir(a.paths.out);
  const fs::path out = fs::path(a.paths.out) / "pairs.jsonl";
  std::string jsonl;
  std::size_t pairs = 0, turns = 0;
  std::vector<std::string> violations;
  for (const auto& d : dialogues) {
    turns += d.turns.size();
    for (const auto& p : build_pairs(d, corpus.plan(d.plan_id), a.t)) {
      jsonl += pair_to_json(p).dump() + "\n";
      ++pairs;
    }
    if (a.validate) {
      auto v = validate_preferences(d, corpus, a.live_uncensored);
      violations.insert(violations.end(), v.begin(), v.end());
    }
  }
  text::write_file(out, jsonl);
  std::cout << pairs << " pairs from " << dialogues.size() << " dialogues (" << turns << " turns)\n";

  Manifest m;
  m.command = "prefs";
  m.config = {{"t", a.t}, {"live_uncensored", a.live_uncensored}};
  m.network = a.live_uncensored;
  m.input("corpus", a.corpus);
  m.input("plans", a.paths.ws.plans);
  m.input("sidecars", a.paths.ws.sidecars);
  m.output(out);
  m.write(a.paths.out);

  if (a.validate) {
    std::cout << "validator: " << violations.size() << " violation(s)\n";
    for (const auto& v : violations) std::cout << "  " << v << "\n";
    if (!violations.empty()) return kInvariantError;
  }
  return kOk;
}

// prompt --------------------------------------------------------------------

struct PromptArgs {
  CommonPaths paths;
  std::string corpus = "out/corpus.jsonl";
  std::string dialogue;
  std::size_t turn = 0;
  int t = 4;
};

int cmd_prompt(const PromptArgs& a) {
  const auto dialogues = dialogues_from_jsonl(text::read_file(a.corpus));
  const auto corpus = load_corpus(a.paths.ws.plans, a.paths.ws.sidecars, a.paths.ws.substitutions);
  for (const auto& d : dialogues) {
    if (!a.dialogue.empty() && d.id != a.dialogue) continue;
    std::cout << render_prompt(d, corpus.plan(d.plan_id), a.turn, a.t);
    return kOk;
  }
  fail(ErrorCode::ValidationError, "dialogue '" + a.dialogue + "' not in corpus");
}

// losses --------------------------------------------------------------------

struct LossArgs {
  std::uint64_t seed = 0;
  double beta = 0.4;
  double lambda = 0.1;
  int grad_check = 0;
  bool json = false;
};

int cmd_losses(const LossArgs& a) {
  TrainingConfig cfg{a.beta, a.lambda};
  cfg.validate();
  SplitMix64 rng(a.seed);

  // ln 2 identity: policy equal to the reference.
  double identity_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto g = random_instance(rng);
    for (const auto& p : g.prefs)
      identity_err = std::max(identity_err, std::abs(dpo_loss(g.policy, g.policy, p, cfg.beta) - std::log(2.0)));
  }

  auto demo = random_instance(rng);
  const auto sft = sft_loss(demo.policy, demo.sft);
  double dpo = 0.0;
  for (const auto& p : demo.prefs) dpo += dpo_loss(demo.policy, demo.reference, p, cfg.beta);
  const auto mixed = dpo_x_loss(demo.policy, demo.reference, demo.mixed, cfg);

  Json report = {{"beta", cfg.beta},
                 {"lambda_sft", cfg.lambda_sft},
                 {"seed", a.seed},
                 {"ln2_identity_max_abs_error", identity_err},
                 {"ln2_identity_pass", identity_err < 1e-12},
                 {"demo", {{"sft", sft.total}, {"dpo", dpo}, {"dpo_x", mixed.total}}}};
  for (const auto& [c, v] : sft.per_category) report["demo"]["sft_per_category"][std::string(to_string(c))] = v;

  bool grad_ok = true;
  if (a.grad_check > 0) {
    for (LossKind k : {LossKind::Sft, LossKind::Dpo, LossKind::DpoX}) {
      double worst = 0.0;
      for (int i = 0; i < a.grad_check; ++i) worst = std::max(worst, check_instance(random_instance(rng), k, cfg).max_rel_error);
      report["grad_check"][std::string(to_string(k))] = {{"instances", a.grad_check}, {"max_rel_error", worst},
                                                         {"pass", worst < 1e-5}};
      grad_ok = grad_ok && worst < 1e-5;
    }
  }

  if (a.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << std::setprecision(6);
    std::cout << "beta " << cfg.beta << "  lambda " << cfg.lambda_sft << "\n";
    std::cout << "ln2 identity (1000 instances)  max |err| " << std::scientific << identity_err << std::defaultfloat
              << (identity_err < 1e-12 ? "  pass" : "  FAIL") << "\n";
    std::cout << "demo  sft " << sft.total << "  dpo " << dpo << "  dpo_x " << mixed.total << "\n";
    if (a.grad_check > 0)
      for (const auto& [k, v] : report["grad_check"].items())
        std::cout << "grad " << std::left << std::setw(6) << k << " max rel err " << std::scientific
                  << v["max_rel_error"].get<double>() << std::defaultfloat << (v["pass"].get<bool>() ? "  pass" : "  FAIL")
                  << "\n";
  }
  return identity_err < 1e-12 && grad_ok ? kOk : kInvariantError;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string cand, ref;                 // rouge: line-aligned files
  std::string matrix;                    // kappa: JSON array of rows
  std::string kind = "win_rate";         // judge-prompt
  std::string fixture;                   // judge-prompt: JSON fixture
  std::string verdicts;                  // winrate
  bool json = false;
};

int cmd_eval_rouge(const EvalArgs& a) {
  const auto c = text::read_lines(a.cand);
  const auto r = text::read_lines(a.ref);
  if (c.size() != r.size()) fail(ErrorCode::ValidationError, "candidate and reference files differ in line count");
  if (c.empty()) fail(ErrorCode::ValidationError, "no lines to score");
  double p = 0, rc = 0, f = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto s = rouge_l(c[i], r[i]);
    p += s.precision;
    rc += s.recall;
    f += s.f1;
  }
  const double n = static_cast<double>(c.size());
  Json j = {{"pairs", c.size()}, {"rouge_l", {{"precision", p / n}, {"recall", rc / n}, {"f1", f / n}}},
            {"tokenizer", "lowercase, strip ASCII punctuation, split on whitespace"},
            {"bertscore", "not computed: no metric port configured"}};
  if (a.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << std::fixed << std::setprecision(4) << "pairs " << c.size() << "\nROUGE-L  P " << p / n << "  R "
              << rc / n << "  F1 " << f / n << "\nBERTScore  not computed (no metric port configured)\n";
  }
  return kOk;
}

int cmd_eval_kappa(const EvalArgs& a) {
  AnnotationMatrix m;
  try {
    m.counts = Json::parse(text::read_file(a.matrix)).get<std::vector<std::vector<int>>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, a.matrix + ": " + e.what());
  }
  const double k = fleiss_kappa(m);
  if (a.json)
    std::cout << Json({{"items", m.counts.size()}, {"raters", m.raters()}, {"fleiss_kappa", k}}).dump(2) << "\n";
  else
    std::cout << "items " << m.counts.size() << "  raters " << m.raters() << "  kappa " << std::setprecision(6) << k
              << "\n";
  return kOk;
}

int cmd_eval_judge_prompt(const EvalArgs& a) {
  Json f;
  try {
    f = Json::parse(text::read_file(a.fixture));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, a.fixture + ": " + e.what());
  }
  JudgeFixture fx{f.value("recipe_text", ""), f.value("dialog", ""), f.value("user", ""), f.value("response_1", ""),
                  f.value("response_2", "")};
  std::cout << build_judge_prompt(parse_judge_kind(a.kind), fx).rendered_text;
  return kOk;
}

int cmd_eval_winrate(const EvalArgs& a) {
  const auto records = verdicts_from_jsonl(text::read_file(a.verdicts));
  std::vector<Outcome> outcomes;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    if (r.kind != JudgeKind::WinRate) continue;
    outcomes.push_back(win_outcome(r.parsed, r.candidate_position));
    ids.push_back(r.item_id);
  }
  const auto rep = aggregate_win_rate(outcomes);
  Json j = win_report_to_json(rep);
  Json ex = Json::array();
  for (auto i : rep.excluded) ex.push_back(ids[i]);
  j["excluded_items"] = ex;
  if (a.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "win rate " << std::setprecision(4) << rep.rate << "  (" << rep.wins << "/" << rep.counted << ")\n";
    std::cout << "excluded (unparseable): " << rep.excluded.size() << "\n";
    for (auto i : rep.excluded) std::cout << "  " << ids[i] << "\n";
  }
  return kOk;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvariantViolation:
    case ErrorCode::UnhandledIntent:
    case ErrorCode::SynthesisStalled: return kInvariantError;
    default: return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plan-grounded dialogue corpus synthesis and objective checks", "plandial"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value config file; explicit flags win");
  app.require_subcommand(1);

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "build the reweighted intent transition graph from a log");
  graph->add_option("--logs", ga.logs, "interaction log JSONL")->envname("PLANDIAL_LOGS")->capture_default_str();
  graph->add_option("--boost", ga.boost, "boost factor for open-ended intents")
      ->envname("PLANDIAL_BOOST")
      ->capture_default_str();
  graph->add_option("--out", ga.out, "output directory")->envname("PLANDIAL_OUT")->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "synthesize a dialogue corpus");
  sa.paths.add(synth, true);
  synth->add_option("--n", sa.n, "number of dialogues")->envname("PLANDIAL_N")->capture_default_str();
  synth->add_option("--seed", sa.seed, "corpus seed")->envname("PLANDIAL_SEED")->capture_default_str();
  synth->add_option("--ratios", sa.ratios, "train,val,test split ratios")->envname("PLANDIAL_RATIOS")->capture_default_str();
  synth->add_option("--t", sa.t, "context window (turns)")->capture_default_str();
  synth->add_option("--boost", sa.boost, "boost factor")->envname("PLANDIAL_BOOST")->capture_default_str();
  synth->add_option("--max-turns", sa.max_turns, "turn cap per dialogue")->capture_default_str();
  synth->add_option("--jobs", sa.jobs, "worker threads (0 = all cores)")->envname("PLANDIAL_JOBS")->capture_default_str();
  synth->add_option("--port-url", sa.port_url, "HTTP generator for chitchat (default: offline stub)")
      ->envname("PLANDIAL_PORT_URL");
  synth->add_option("--port-timeout-ms", sa.port_timeout_ms, "generator timeout")->capture_default_str();

  PrefsArgs pa;
  auto* prefs = app.add_subcommand("prefs", "build preference pairs from a corpus");
  pa.paths.add(prefs, false);
  prefs->add_option("--corpus", pa.corpus, "corpus JSONL")->envname("PLANDIAL_CORPUS")->capture_default_str();
  prefs->add_option("--t", pa.t, "context window (turns)")->capture_default_str();
  prefs->add_flag("--validate", pa.validate, "re-check every pair invariant");
  prefs->add_flag("--live-uncensored", pa.live_uncensored, "regenerate safety negatives through --port-url");
  prefs->add_option("--port-url", pa.port_url, "HTTP generator for live safety negatives")->envname("PLANDIAL_PORT_URL");
  prefs->add_option("--port-timeout-ms", pa.port_timeout_ms, "generator timeout")->capture_default_str();

  PromptArgs pr;
  auto* prompt = app.add_subcommand("prompt", "print the model input for one turn");
  pr.paths.add(prompt, false);
  prompt->add_option("--corpus", pr.corpus, "corpus JSONL")->capture_default_str();
  prompt->add_option("--dialogue", pr.dialogue, "dialogue id (default: first)");
  prompt->add_option("--turn", pr.turn, "0-based turn index")->capture_default_str();
  prompt->add_option("--t", pr.t, "context window (turns)")->capture_default_str();

  LossArgs la;
  auto* losses = app.add_subcommand("losses", "objective identities and gradient checks on a toy policy");
  losses->add_option("--seed", la.seed, "instance seed")->envname("PLANDIAL_SEED")->capture_default_str();
  losses->add_option("--beta", la.beta, "DPO beta")->capture_default_str();
  losses->add_option("--lambda", la.lambda, "SFT mixing coefficient")->capture_default_str();
  losses->add_option("--grad-check", la.grad_check, "random instances per loss for finite differences")
      ->capture_default_str();
  losses->add_flag("--json", la.json, "machine-readable report");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "metrics, agreement, judge prompts and win rates");
  eval->require_subcommand(1);
  auto* rouge = eval->add_subcommand("rouge", "ROUGE-L over line-aligned files");
  rouge->add_option("--cand", ea.cand, "candidate lines")->required();
  rouge->add_option("--ref", ea.ref, "reference lines")->required();
  rouge->add_flag("--json", ea.json);
  auto* kappa = eval->add_subcommand("kappa", "Fleiss kappa of a JSON count matrix");
  kappa->add_option("--matrix", ea.matrix, "JSON array of per-item category counts")->required();
  kappa->add_flag("--json", ea.json);
  auto* judge = eval->add_subcommand("judge-prompt", "render a judge prompt from a JSON fixture");
  judge->add_option("--kind", ea.kind, "win_rate|navigation|qa|replacement|fun_fact|politeness|safety")
      ->capture_default_str();
  judge->add_option("--fixture", ea.fixture, "fixture JSON")->required();
  auto* winrate = eval->add_subcommand("winrate", "aggregate pairwise verdicts");
  winrate->add_option("--verdicts", ea.verdicts, "verdict JSONL")->required();
  winrate->add_flag("--json", ea.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    const std::string snapshot = app.config_to_str(true, false);
    if (graph->parsed()) return cmd_graph(ga, snapshot);
    if (synth->parsed()) return cmd_synth(sa, snapshot);
    if (prefs->parsed()) return cmd_prefs(pa, snapshot);
    if (prompt->parsed()) return cmd_prompt(pr);
    if (losses->parsed()) return cmd_losses(la);
    if (rouge->parsed()) return cmd_eval_rouge(ea);
    if (kappa->parsed()) return cmd_eval_kappa(ea);
    if (judge->parsed()) return cmd_eval_judge_prompt(ea);
    if (winrate->parsed()) return cmd_eval_winrate(ea);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantError;
  }
  return kInputError;
}
