#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "plandial/assistant_policy.hpp"
#include "plandial/dialogue.hpp"
#include "plandial/intent_graph.hpp"
#include "plandial/plan_model.hpp"
#include "plandial/preference_builder.hpp"
#include "plandial/rng.hpp"
#include "plandial/user_simulator.hpp"

namespace plandial {

/// Read-only inputs shared by every synthesis worker.
struct SynthResources {
  const PlanCorpus* corpus = nullptr;
  const IntentGraph* graph = nullptr;  // already reweighted
  const UtteranceBank* bank = nullptr;
  const RequestTemplateSet* requests = nullptr;
  const ResponseTemplateSet* responses = nullptr;
  GeneratorPort* port = nullptr;         // chitchat / fallback
  GeneratorPort* safety_port = nullptr;  // compliant safety negatives
  bool live_safety = false;
};

struct SplitRatios {
  double train = 0.90;
  double val = 0.05;
  double test = 0.05;

  void validate() const {
    if (train < 0 || val < 0 || test < 0) fail(ErrorCode::ValidationError, "split ratios must be non-negative");
    if (std::abs(train + val + test - 1.0) > 1e-9) fail(ErrorCode::ValidationError, "split ratios must sum to 1");
  }
};

/// Parses "90,5,5" (any positive scale) into normalized ratios.
inline SplitRatios parse_ratios(std::string_view s) {
  auto parts = text::split(s, ',');
  if (parts.size() != 3) fail(ErrorCode::ValidationError, "ratios need three comma-separated values");
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      v[i] = std::stod(std::string(text::trim(parts[i])));
    } catch (const std::exception&) {
      fail(ErrorCode::ValidationError, "bad ratio value '" + parts[i] + "'");
    }
    if (v[i] < 0) fail(ErrorCode::ValidationError, "negative ratio");
  }
  const double total = v[0] + v[1] + v[2];
  if (!(total > 0)) fail(ErrorCode::ValidationError, "ratios sum to zero");
  return {v[0] / total, v[1] / total, v[2] / total};
}

struct SynthConfig {
  int n_dialogues = 100;
  SplitRatios split_ratios;
  int context_window = 4;
  WalkConfig walk;
  std::uint64_t seed = 0;
  int max_retries = 10;
  int jobs = 1;

  void validate() const {
    if (n_dialogues < 0) fail(ErrorCode::ValidationError, "n_dialogues must be >= 0");
    if (context_window < 1) fail(ErrorCode::ValidationError, "context window must be >= 1");
    if (max_retries < 1) fail(ErrorCode::ValidationError, "max_retries must be >= 1");
    split_ratios.validate();
    walk.validate();
  }
};

namespace detail {

/// User side of a candidate turn, or nullopt when the intent cannot be served
/// in the current state (nothing to replace, no QA for this step, ...).
inline std::optional<TurnPayload> prepare_turn(Intent intent, const DialogueState& st, const SynthResources& res,
                                               const KnowledgeSidecar& sc, const std::vector<DialogueTurn>& turns,
                                               SplitMix64& rng) {
  const auto& plan = *st.plan;
  const bool started = st.step_ptr >= 1;
  if (st.finished && intent != Intent::ChitChat && intent != Intent::Question) return std::nullopt;

  const auto from_bank = [&](Intent i) -> std::optional<TurnPayload> {
    if (res.bank->size(i) == 0) return std::nullopt;
    TurnPayload p;
    p.user_text = sample_utterance(*res.bank, i, rng);
    return p;
  };

  switch (intent) {
    case Intent::NextStep:
    case Intent::NewTask:
    case Intent::ChitChat:
    case Intent::Safety:
    case Intent::Fallback: return from_bank(intent);
    case Intent::PreviousStep:
    case Intent::CompleteTask:
      if (!started) return std::nullopt;
      return from_bank(intent);
    case Intent::Repeat:
      if (turns.empty()) return std::nullopt;
      return from_bank(intent);
    case Intent::Question: {
      if (!started || !sc.qa_for(st.step_ptr)) return std::nullopt;
      TurnPayload p;
      p.qa = sample_qa(st, sc, rng);
      p.user_text = p.qa->question;
      return p;
    }
    case Intent::DefinitionQuestion: {
      if (!started || res.requests->definition_templates.empty()) return std::nullopt;
      const auto found = extract_entities(plan.step(st.step_ptr).text, sc.definitions);
      if (found.empty()) return std::nullopt;
      const std::vector<std::string> ents(found.begin(), found.end());
      TurnPayload p;
      p.entity = ents[rng.below(ents.size())];
      p.user_text = render_definition_question(*res.requests, p.entity, rng);
      return p;
    }
    case Intent::Replacement: {
      if (!started || res.requests->replacement_templates.empty()) return std::nullopt;
      std::vector<std::string> cands;
      for (const auto& r : replaceable_candidates(plan, sc, st.step_ptr))
        if (!usable_alternatives(r, sc).empty()) cands.push_back(r);
      if (cands.empty()) return std::nullopt;
      TurnPayload p;
      p.resource = cands[rng.below(cands.size())];
      p.user_text = render_replacement_request(*res.requests, p.resource, rng);
      return p;
    }
    case Intent::GetFunFact:
      if (!started || !sc.facts_for(st.step_ptr)) return std::nullopt;
      return from_bank(intent);
    case Intent::Start:
    case Intent::End: break;
  }
  return std::nullopt;
}

}  // namespace detail

/// Appends one policy turn (with its negative) for `intent`.
inline DialogueTurn make_turn(Intent intent, const TurnPayload& payload, DialogueState& st,
                              const std::vector<DialogueTurn>& previous, const SynthResources& res,
                              const KnowledgeSidecar& sc, SplitMix64& rng) {
  const PolicyDeps deps{&sc, res.responses, res.port};
  auto r = respond(st, intent, payload, deps, rng);
  DialogueTurn t;
  t.user = payload.user_text;
  t.intent = intent;
  t.response = r.response;
  t.category = r.category;
  t.step_index = r.state.step_ptr;
  t.slot = !payload.entity.empty() ? payload.entity : payload.resource;
  st = std::move(r.state);

  NegativeContext nctx{st.plan, &sc, res.corpus, res.responses, res.safety_port, res.live_safety, st.tone};
  auto neg = negative_for(t, previous, nctx, rng);
  t.negative = std::move(neg.text);
  t.negative_rule = neg.rule;
  t.negative_source = std::move(neg.source);
  return t;
}

namespace detail {

inline std::string dialogue_id(std::size_t index) {
  std::string n = std::to_string(index);
  return "dlg-" + std::string(n.size() < 6 ? 6 - n.size() : 0, '0') + n;
}

}  // namespace detail

/// Builds a dialogue for a fixed intent walk. Intents that cannot be served
/// in the current state are dropped.
inline Dialogue synthesize_from_walk(const ProceduralPlan& plan, const SynthResources& res,
                                     const std::vector<Intent>& walk, std::uint64_t dialogue_seed,
                                     ToneOfVoice tone, std::size_t index = 0) {
  SplitMix64 rng(dialogue_seed);
  const auto& sc = res.corpus->sidecar(plan.id);
  Dialogue d{detail::dialogue_id(index), plan.id, tone, {}, dialogue_seed, Split::Unassigned};
  DialogueState st{&plan, 0, tone, false, {}};
  for (Intent i : walk) {
    auto payload = detail::prepare_turn(i, st, res, sc, d.turns, rng);
    if (!payload) continue;
    d.turns.push_back(make_turn(i, *payload, st, d.turns, res, sc, rng));
  }
  if (d.turns.empty()) fail(ErrorCode::SynthesisStalled, "walk produced no servable turn");
  return d;
}

/// Walks the intent graph against the dialogue state. An unservable candidate
/// is resampled up to `max_retries` times; after that it is skipped (the walk
/// moves on from it without emitting a turn).
inline Dialogue synthesize_dialogue(const ProceduralPlan& plan, const SynthResources& res, const SynthConfig& cfg,
                                    std::uint64_t dialogue_seed, std::size_t index = 0) {
  SplitMix64 rng(dialogue_seed);
  const auto& sc = res.corpus->sidecar(plan.id);
  const auto tone = kTones[rng.below(kTones.size())];
  Dialogue d{detail::dialogue_id(index), plan.id, tone, {}, dialogue_seed, Split::Unassigned};
  DialogueState st{&plan, 0, tone, false, {}};
  const auto& g = *res.graph;

  Intent cur = Intent::Start;
  const int max_steps = 4 * cfg.walk.max_turns;
  for (int steps = 0; steps < max_steps && static_cast<int>(d.turns.size()) < cfg.walk.max_turns; ++steps) {
    Intent cand = Intent::End;
    std::optional<TurnPayload> payload;
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      cand = next_intent(g, cur, rng);
      if (cand == Intent::End) break;
      payload = detail::prepare_turn(cand, st, res, sc, d.turns, rng);
      if (payload) break;
    }
    if (cand == Intent::End) break;
    cur = cand;
    if (!payload) continue;
    d.turns.push_back(make_turn(cand, *payload, st, d.turns, res, sc, rng));
    if (ends_walk(cand)) break;
  }
  if (d.turns.empty())
    fail(ErrorCode::SynthesisStalled, "no servable intent for plan " + plan.id + " (dialogue " + d.id + ")");
  validate_dialogue(d, plan);
  return d;
}

// ---------------------------------------------------------------------------
// Splits

struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
};

/// Largest-remainder apportionment of `n` items to the three ratios.
inline SplitCounts apportion(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> exact = {r.train * static_cast<double>(n), r.val * static_cast<double>(n),
                                       r.test * static_cast<double>(n)};
  std::array<std::size_t, 3> c{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    c[i] = static_cast<std::size_t>(std::floor(exact[i] + 1e-9));
    assigned += c[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] - static_cast<double>(c[a]) > exact[b] - static_cast<double>(c[b]);
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++c[order[k % 3]];
  return {c[0], c[1], c[2]};
}

/// Assigns splits at plan granularity: all dialogues of a plan share a split.
inline void split_corpus(std::vector<Dialogue>& dialogues, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  std::vector<std::string> plans;
  for (const auto& d : dialogues) plans.push_back(d.plan_id);
  std::sort(plans.begin(), plans.end());
  plans.erase(std::unique(plans.begin(), plans.end()), plans.end());

  SplitMix64 rng(seed ^ 0x5bd1e995ULL);
  for (std::size_t i = plans.size(); i > 1; --i) std::swap(plans[i - 1], plans[rng.below(i)]);

  const auto counts = apportion(plans.size(), ratios);
  std::map<std::string, Split> assignment;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    Split s = i < counts.train ? Split::Train : i < counts.train + counts.val ? Split::Val : Split::Test;
    assignment[plans[i]] = s;
  }
  for (auto& d : dialogues) d.split = assignment.at(d.plan_id);
}

// ---------------------------------------------------------------------------
// Corpus driver

/// Dialogue i uses plan i mod |plans| and the stream derive_seed(seed, i).
/// Workers write into pre-sized slots, so output order (and bytes) do not
/// depend on the job count.
inline std::vector<Dialogue> synthesize_corpus(const SynthResources& res, const SynthConfig& cfg) {
  cfg.validate();
  const auto& plans = res.corpus->plans;
  const auto n = static_cast<std::size_t>(cfg.n_dialogues);
  std::vector<Dialogue> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = synthesize_dialogue(plans[i % plans.size()], res, cfg, derive_seed(cfg.seed, i), i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  split_corpus(out, cfg.split_ratios, cfg.seed);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t turns = 0;
  double mean_turns = 0.0;
  double sd_turns = 0.0;
  std::map<Intent, std::size_t> per_intent;
  std::map<ResponseCategory, std::size_t> per_category;
  std::map<ToneOfVoice, std::size_t> per_tone;
  std::map<Split, std::size_t> dialogues_per_split;
  std::map<Split, std::size_t> plans_per_split;
  std::map<NegativeRule, std::size_t> per_rule;

  double category_fraction(ResponseCategory c) const {
    auto it = per_category.find(c);
    return turns == 0 || it == per_category.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(turns);
  }
};

inline CorpusStats corpus_stats(const std::vector<Dialogue>& ds) {
  CorpusStats s;
  s.dialogues = ds.size();
  for (Intent i : kUserIntents) s.per_intent[i] = 0;
  for (ResponseCategory c : kCategories) s.per_category[c] = 0;
  for (ToneOfVoice t : kTones) s.per_tone[t] = 0;
  std::map<Split, std::set<std::string>> plans;
  for (const auto& d : ds) {
    s.turns += d.turns.size();
    ++s.per_tone[d.tone];
    ++s.dialogues_per_split[d.split];
    plans[d.split].insert(d.plan_id);
    for (const auto& t : d.turns) {
      ++s.per_intent[t.intent];
      ++s.per_category[t.category];
      ++s.per_rule[t.negative_rule];
    }
  }
  for (const auto& [split, ids] : plans) s.plans_per_split[split] = ids.size();
  if (!ds.empty()) {
    s.mean_turns = static_cast<double>(s.turns) / static_cast<double>(ds.size());
    double ss = 0.0;
    for (const auto& d : ds) {
      const double dev = static_cast<double>(d.turns.size()) - s.mean_turns;
      ss += dev * dev;
    }
    s.sd_turns = std::sqrt(ss / static_cast<double>(ds.size()));
  }
  return s;
}

inline Json stats_to_json(const CorpusStats& s) {
  Json j;
  j["dialogues"] = s.dialogues;
  j["turns"] = s.turns;
  j["mean_turns"] = s.mean_turns;
  j["sd_turns"] = s.sd_turns;
  for (const auto& [k, v] : s.per_intent) j["per_intent"][std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.per_category) j["per_category"][std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.per_tone) j["per_tone"][std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.dialogues_per_split) j["dialogues_per_split"][std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.plans_per_split) j["plans_per_split"][std::string(to_string(k))] = v;
  for (const auto& [k, v] : s.per_rule) j["per_negative_rule"][std::string(to_string(k))] = v;
  return j;
}

inline std::string stats_to_text(const CorpusStats& s) {
  std::ostringstream os;
  os << "dialogues      " << s.dialogues << "\n";
  os << "turns          " << s.turns << "\n";
  os << "mean turns     " << s.mean_turns << "  (sd " << s.sd_turns << ")\n";
  os << "categories    ";
  for (const auto& [k, v] : s.per_category) os << " " << to_string(k) << "=" << v;
  os << "\ntones         ";
  for (const auto& [k, v] : s.per_tone) os << " " << to_string(k) << "=" << v;
  os << "\nsplits (plans)";
  for (const auto& [k, v] : s.plans_per_split) os << " " << to_string(k) << "=" << v;
  os << "\nintents\n";
  for (const auto& [k, v] : s.per_intent) os << "  " << to_string(k) << " " << v << "\n";
  return os.str();
}

}  // namespace plandial
