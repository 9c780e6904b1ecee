#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "plandial/assistant_policy.hpp"
#include "plandial/dialogue.hpp"
#include "plandial/plan_model.hpp"

namespace plandial {

struct PreferencePair {
  std::string context_input;
  std::string chosen;
  std::string rejected;
  ResponseCategory category = ResponseCategory::Nav;
  NegativeRule rule = NegativeRule::RejectionTemplate;
};

inline Json pair_to_json(const PreferencePair& p) {
  return {{"context_input", p.context_input},
          {"chosen", p.chosen},
          {"rejected", p.rejected},
          {"category", std::string(to_string(p.category))},
          {"rule", std::string(to_string(p.rule))}};
}

inline PreferencePair pair_from_json(const Json& j) {
  try {
    return {j.at("context_input").get<std::string>(), j.at("chosen").get<std::string>(),
            j.at("rejected").get<std::string>(), parse_category(j.at("category").get<std::string>()),
            parse_negative_rule(j.at("rule").get<std::string>())};
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("preference pair: ") + e.what());
  }
}

/// Everything negative construction may look at besides the dialogue itself.
struct NegativeContext {
  const ProceduralPlan* plan = nullptr;
  const KnowledgeSidecar* sidecar = nullptr;
  const PlanCorpus* corpus = nullptr;  // other plans, for cross-plan fun facts
  const ResponseTemplateSet* templates = nullptr;
  GeneratorPort* safety_port = nullptr;  // answers with the uncensored profile
  bool live_safety = false;
  ToneOfVoice tone = ToneOfVoice::Neutral;
};

struct NegativeResult {
  std::string text;
  NegativeRule rule = NegativeRule::RejectionTemplate;
  std::string source;
};

namespace detail {

inline NegativeResult rejection(const NegativeContext& ctx, std::string_view gold, SplitMix64& rng) {
  const auto& cell = ctx.templates->cell(Situation::Rejection, ctx.tone);
  std::size_t i = rng.below(cell.size());
  for (std::size_t tries = 0; tries < cell.size() && cell[i] == gold; ++tries) i = (i + 1) % cell.size();
  return {cell[i], NegativeRule::RejectionTemplate, {}};
}

template <typename T>
const T& pick(const std::vector<T>& v, SplitMix64& rng) {
  return v[rng.below(v.size())];
}

}  // namespace detail

/// Rejected response for `turn` given the turns before it.
inline NegativeResult negative_for(const DialogueTurn& turn, std::span<const DialogueTurn> previous,
                                   const NegativeContext& ctx, SplitMix64& rng) {
  const auto& plan = *ctx.plan;
  const auto& sc = *ctx.sidecar;
  const std::string& gold = turn.response;
  NegativeResult out;

  switch (turn.intent) {
    case Intent::NextStep:
    case Intent::PreviousStep:
    case Intent::CompleteTask:
    case Intent::Repeat:
    case Intent::NewTask: {
      if (plan.size() <= 1) break;
      std::vector<int> wrong;
      for (const auto& s : plan.steps)
        if (s.index != turn.step_index && s.text != gold) wrong.push_back(s.index);
      if (wrong.empty()) break;
      const int idx = detail::pick(wrong, rng);
      out = {plan.step(idx).text, NegativeRule::WrongStep, std::to_string(idx)};
      break;
    }
    case Intent::Question: {
      for (auto it = previous.rbegin(); it != previous.rend(); ++it) {
        if (it->intent == Intent::Question && it->response != gold) {
          out = {it->response, NegativeRule::PreviousQAAnswer, it->user};
          break;
        }
      }
      break;
    }
    case Intent::DefinitionQuestion: {
      std::set<std::string> entities;
      for (const auto& p : previous) {
        for (const auto& e : extract_entities(p.user, sc.definitions)) entities.insert(e);
        for (const auto& e : extract_entities(p.response, sc.definitions)) entities.insert(e);
      }
      std::vector<std::string> usable;
      for (const auto& e : entities)
        if (e != turn.slot && sc.definitions.at(e) != gold) usable.push_back(e);
      if (usable.empty()) break;
      const auto& e = detail::pick(usable, rng);
      out = {sc.definitions.at(e), NegativeRule::PreviousEntityDefinition, e};
      break;
    }
    case Intent::Replacement: {
      std::vector<std::string> targets;
      for (const auto& [r, _] : sc.substitutions)
        if (r != turn.slot && !usable_alternatives(r, sc).empty()) targets.push_back(r);
      for (int tries = 0; tries < 8 && !targets.empty(); ++tries) {
        const auto& r = detail::pick(targets, rng);
        DialogueState st{&plan, 0, ctx.tone, false, {}};
        auto text = suggest_replacement(st, r, sc, *ctx.templates, rng);
        if (text != gold) {
          out = {std::move(text), NegativeRule::OtherResourceSuggestion, r};
          break;
        }
      }
      break;
    }
    case Intent::GetFunFact: {
      if (!ctx.corpus) break;
      std::set<std::string> own;
      for (const auto& [_, facts] : sc.fun_facts) own.insert(facts.begin(), facts.end());
      std::vector<const ProceduralPlan*> others;
      for (const auto& p : ctx.corpus->plans)
        if (p.id != plan.id && ctx.corpus->sidecars.contains(p.id) && !ctx.corpus->sidecar(p.id).fun_facts.empty())
          others.push_back(&p);
      for (int tries = 0; tries < 8 && !others.empty(); ++tries) {
        const ProceduralPlan* other = detail::pick(others, rng);
        std::vector<std::string> facts;
        for (const auto& [_, list] : ctx.corpus->sidecar(other->id).fun_facts)
          for (const auto& f : list)
            if (!own.contains(f)) facts.push_back(f);
        if (facts.empty()) continue;
        out = {detail::pick(facts, rng), NegativeRule::CrossPlanFunFact, other->id};
        break;
      }
      break;
    }
    case Intent::Safety: {
      if (!ctx.safety_port) break;
      GenerationRequest req;
      req.prompt = turn.user;
      req.profile = GenerationProfile::Uncensored;
      req.tone_hint = std::string(tone_phrase(ctx.tone));
      try {
        auto text = ctx.safety_port->generate(req);
        if (!text::trim(text).empty() && text != gold) {
          const bool live = ctx.live_safety && !ctx.safety_port->is_stub();
          out = {std::move(text), live ? NegativeRule::SafetyCompliantLive : NegativeRule::SafetyCompliantStub,
                 live ? "live" : "stub"};
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PortTimeout) throw;
      }
      break;
    }
    case Intent::ChitChat:
    case Intent::Fallback:
    case Intent::Start:
    case Intent::End: break;
  }
  if (out.text.empty() || out.text == gold) out = detail::rejection(ctx, gold, rng);
  return out;
}

/// One pair per turn; the context is exactly the SFT input for that turn.
inline std::vector<PreferencePair> build_pairs(const Dialogue& d, const ProceduralPlan& plan, int context_window) {
  std::vector<PreferencePair> pairs;
  pairs.reserve(d.turns.size());
  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    const auto& t = d.turns[i];
    pairs.push_back({render_prompt(d, plan, i, context_window), t.response, t.negative, t.category, t.negative_rule});
  }
  return pairs;
}

/// Corpus-wide check of the preference invariants. Returns one message per violation.
inline std::vector<std::string> validate_preferences(const Dialogue& d, const PlanCorpus& corpus,
                                                     bool allow_live_safety = false) {
  std::vector<std::string> v;
  const auto& plan = corpus.plan(d.plan_id);
  const auto& sc = corpus.sidecar(d.plan_id);
  std::set<std::string> own_facts;
  for (const auto& [_, facts] : sc.fun_facts) own_facts.insert(facts.begin(), facts.end());

  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    const auto& t = d.turns[i];
    const std::string where = d.id + "#" + std::to_string(i) + " ";
    if (t.response == t.negative) v.push_back(where + "chosen == rejected");
    if (!rule_fits_category(t.negative_rule, t.category))
      v.push_back(where + "rule " + std::string(to_string(t.negative_rule)) + " inconsistent with category");
    if (t.category == ResponseCategory::Nav) {
      if (t.negative_rule == NegativeRule::WrongStep) {
        bool is_step = false;
        for (const auto& s : plan.steps)
          if (s.text == t.negative && s.index != t.step_index) is_step = true;
        if (!is_step) v.push_back(where + "nav negative is not an existing non-gold step");
      } else if (plan.size() > 1) {
        v.push_back(where + "nav negative fell back although wrong steps exist");
      }
    }
    if (t.negative_rule == NegativeRule::CrossPlanFunFact) {
      if (own_facts.contains(t.negative)) v.push_back(where + "fun-fact negative belongs to the same plan");
      if (t.negative_source == d.plan_id) v.push_back(where + "fun-fact negative sourced from the same plan");
    }
    if (t.intent == Intent::Question) {
      bool prior_other = false;
      for (std::size_t j = 0; j < i; ++j)
        if (d.turns[j].intent == Intent::Question && d.turns[j].response != t.response) prior_other = true;
      if (t.negative_rule == NegativeRule::RejectionTemplate && prior_other)
        v.push_back(where + "QA fallback fired although a prior QA turn exists");
      if (t.negative_rule == NegativeRule::PreviousQAAnswer) {
        bool found = false;
        for (std::size_t j = 0; j < i; ++j)
          if (d.turns[j].intent == Intent::Question && d.turns[j].response == t.negative) found = true;
        if (!found) v.push_back(where + "QA negative is not a previous QA answer");
      }
    }
    if (t.negative_rule == NegativeRule::SafetyCompliantStub &&
        t.negative.rfind(std::string(kSyntheticCompliantTag), 0) != 0)
      v.push_back(where + "stub safety negative is not tagged");
    if (t.negative_rule == NegativeRule::SafetyCompliantLive && !allow_live_safety)
      v.push_back(where + "live safety negative without the live flag");
  }
  return v;
}

}  // namespace plandial
