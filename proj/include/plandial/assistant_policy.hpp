#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plandial/errors.hpp"
#include "plandial/intent.hpp"
#include "plandial/plan_model.hpp"
#include "plandial/prompts.hpp"
#include "plandial/rng.hpp"
#include "plandial/text.hpp"

namespace plandial {

// ---------------------------------------------------------------------------
// Tone of voice

enum class ToneOfVoice { Neutral, SomewhatPolite, Polite, VeryPolite };

inline constexpr std::array<ToneOfVoice, 4> kTones = {ToneOfVoice::Neutral, ToneOfVoice::SomewhatPolite,
                                                      ToneOfVoice::Polite, ToneOfVoice::VeryPolite};

/// Machine label used in files ("somewhat_polite").
constexpr std::string_view to_string(ToneOfVoice t) noexcept {
  switch (t) {
    case ToneOfVoice::Neutral: return "neutral";
    case ToneOfVoice::SomewhatPolite: return "somewhat_polite";
    case ToneOfVoice::Polite: return "polite";
    case ToneOfVoice::VeryPolite: return "very_polite";
  }
  return "?";
}

/// Phrase used inside the model input ("somewhat polite").
constexpr std::string_view tone_phrase(ToneOfVoice t) noexcept {
  switch (t) {
    case ToneOfVoice::Neutral: return "neutral";
    case ToneOfVoice::SomewhatPolite: return "somewhat polite";
    case ToneOfVoice::Polite: return "polite";
    case ToneOfVoice::VeryPolite: return "very polite";
  }
  return "?";
}

inline ToneOfVoice parse_tone(std::string_view s) {
  for (ToneOfVoice t : kTones)
    if (to_string(t) == s || tone_phrase(t) == s) return t;
  fail(ErrorCode::ParseError, "unknown tone of voice '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Response templates, one cell per (situation, tone).

enum class Situation {
  FirstStep,
  StepDelivery,
  PreviousStep,
  PrevBoundary,
  Completion,
  RepeatPrefix,
  NotStarted,
  NewTaskConfirm,
  SafetyReject,
  ThanksAck,
  Clarification,
  ReplacementSuggest,
  Rejection,
};

inline constexpr std::array<Situation, 13> kSituations = {
    Situation::FirstStep,      Situation::StepDelivery, Situation::PreviousStep,  Situation::PrevBoundary,
    Situation::Completion,     Situation::RepeatPrefix, Situation::NotStarted,    Situation::NewTaskConfirm,
    Situation::SafetyReject,   Situation::ThanksAck,    Situation::Clarification, Situation::ReplacementSuggest,
    Situation::Rejection,
};

constexpr std::string_view to_string(Situation s) noexcept {
  switch (s) {
    case Situation::FirstStep: return "first_step";
    case Situation::StepDelivery: return "step_delivery";
    case Situation::PreviousStep: return "previous_step";
    case Situation::PrevBoundary: return "prev_boundary";
    case Situation::Completion: return "completion";
    case Situation::RepeatPrefix: return "repeat_prefix";
    case Situation::NotStarted: return "not_started";
    case Situation::NewTaskConfirm: return "new_task_confirm";
    case Situation::SafetyReject: return "safety_reject";
    case Situation::ThanksAck: return "thanks_ack";
    case Situation::Clarification: return "clarification";
    case Situation::ReplacementSuggest: return "replacement_suggest";
    case Situation::Rejection: return "rejection";
  }
  return "?";
}

constexpr bool delivers_step(Situation s) noexcept {
  return s == Situation::FirstStep || s == Situation::StepDelivery || s == Situation::PreviousStep ||
         s == Situation::PrevBoundary || s == Situation::RepeatPrefix;
}

inline constexpr std::size_t kMaxTemplatesPerCell = 10;

struct ResponseTemplateSet {
  std::map<std::pair<Situation, ToneOfVoice>, std::vector<std::string>> cells;

  const std::vector<std::string>& cell(Situation s, ToneOfVoice t) const {
    auto it = cells.find({s, t});
    if (it == cells.end() || it->second.empty())
      fail(ErrorCode::EmptyTemplateSet,
           "no templates for (" + std::string(to_string(s)) + ", " + std::string(to_string(t)) + ")");
    return it->second;
  }

  bool in_cell(Situation s, ToneOfVoice t, std::string_view text) const {
    auto it = cells.find({s, t});
    if (it == cells.end()) return false;
    for (const auto& x : it->second)
      if (x == text) return true;
    return false;
  }

  const std::string& pick(Situation s, ToneOfVoice t, SplitMix64& rng) const {
    const auto& c = cell(s, t);
    return c[rng.below(c.size())];
  }
};

inline void validate_response_templates(const ResponseTemplateSet& set) {
  for (Situation s : kSituations) {
    std::set<std::string> seen_other_tone;
    for (ToneOfVoice t : kTones) {
      const auto& c = set.cell(s, t);
      if (c.size() > kMaxTemplatesPerCell)
        fail(ErrorCode::ValidationError, "more than 10 templates in (" + std::string(to_string(s)) + ", " +
                                             std::string(to_string(t)) + ")");
      for (const auto& tpl : c) {
        if (delivers_step(s) && (text::count_occurrences(tpl, "{step}") != 1 || text::count_occurrences(tpl, "{n}") != 1))
          fail(ErrorCode::ValidationError, "step template needs one {n} and one {step}: " + tpl);
        if (s == Situation::ReplacementSuggest && text::count_occurrences(tpl, "{alternatives}") != 1)
          fail(ErrorCode::ValidationError, "replacement template needs one {alternatives}: " + tpl);
        if (!delivers_step(s) && s != Situation::ReplacementSuggest && tpl.find('{') != std::string::npos)
          fail(ErrorCode::ValidationError, "unexpected slot in " + std::string(to_string(s)) + " template: " + tpl);
      }
    }
  }
}

/// True when no template text is shared between two different tones of the
/// same situation, and no rejection template is reused in any other cell.
inline bool cells_disjoint(const ResponseTemplateSet& set) {
  std::map<std::string, std::set<std::pair<Situation, ToneOfVoice>>> where;
  for (const auto& [key, list] : set.cells)
    for (const auto& tpl : list) where[tpl].insert(key);
  for (const auto& [tpl, keys] : where) {
    if (keys.size() <= 1) continue;
    std::set<ToneOfVoice> tones;
    std::set<Situation> sits;
    for (const auto& [s, t] : keys) {
      tones.insert(t);
      sits.insert(s);
    }
    if (tones.size() > 1) return false;
    if (sits.contains(Situation::Rejection) || sits.contains(Situation::SafetyReject)) return false;
  }
  return true;
}

inline ResponseTemplateSet response_templates_from_json(const Json& j) {
  ResponseTemplateSet set;
  try {
    for (Situation s : kSituations) {
      const auto key = std::string(to_string(s));
      if (!j.contains(key)) fail(ErrorCode::ValidationError, "templates missing situation '" + key + "'");
      for (ToneOfVoice t : kTones) {
        const auto tk = std::string(to_string(t));
        if (!j.at(key).contains(tk))
          fail(ErrorCode::ValidationError, "templates missing cell (" + key + ", " + tk + ")");
        set.cells[{s, t}] = j.at(key).at(tk).get<std::vector<std::string>>();
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("response templates: ") + e.what());
  }
  validate_response_templates(set);
  return set;
}

inline ResponseTemplateSet load_response_templates(const std::filesystem::path& path) {
  try {
    return response_templates_from_json(Json::parse(text::read_file(path)));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Generator port: external text generation for chitchat/fallback and
// compliant safety negatives.

enum class GenerationProfile { Default, Uncensored };

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 128;
  double temperature = 0.7;
  std::string tone_hint;
  GenerationProfile profile = GenerationProfile::Default;
};

class GeneratorPort {
 public:
  virtual ~GeneratorPort() = default;
  /// Throws Error(PortTimeout) when the backend cannot be reached in time.
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual bool is_stub() const { return false; }
};

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::string_view kSyntheticCompliantTag = "[synthetic-compliant]";

/// Offline generator. Output depends only on the request, so corpora built
/// with it are reproducible.
class StubGeneratorPort final : public GeneratorPort {
 public:
  enum class Mode { Canned, Echo };

  explicit StubGeneratorPort(Mode mode = Mode::Canned) : mode_(mode) {}

  std::string generate(const GenerationRequest& request) override {
    const std::string user = last_user_line(request.prompt);
    if (request.profile == GenerationProfile::Uncensored)
      return std::string(kSyntheticCompliantTag) + " Sure, here is exactly how to do that: " + user;
    if (mode_ == Mode::Echo) return "echo: " + user;
    static constexpr std::array<std::string_view, 6> canned = {
        "I'm not quite sure what you mean. Could you rephrase that so I can help you with the task?",
        "That's an interesting thought! I'm best at helping with the task, so shall we continue with the steps?",
        "I didn't quite catch that. Do you want to go to the next step, or do you have a question about this one?",
        "Ha, good one! Whenever you're ready, we can keep going with the task.",
        "I can't really help with that, but I'd be glad to keep guiding you through the steps.",
        "Sorry, could you clarify what you would like me to do? I can repeat the step, move on, or answer questions.",
    };
    return std::string(canned[fnv1a(request.prompt) % canned.size()]);
  }

  bool is_stub() const override { return true; }

 private:
  static std::string last_user_line(std::string_view prompt) {
    const auto pos = prompt.rfind("User: ");
    if (pos == std::string_view::npos) return std::string(text::trim(prompt));
    auto rest = prompt.substr(pos + 6);
    const auto nl = rest.find('\n');
    return std::string(text::trim(rest.substr(0, nl)));
  }

  Mode mode_;
};

inline std::string render_chitchat_prompt(std::string_view user_request) {
  return text::fill(std::string(prompts::kChitchatGenerator), {{"user_request", user_request}});
}

// ---------------------------------------------------------------------------
// Dialogue state and the reference policy

struct DialogueState {
  const ProceduralPlan* plan = nullptr;
  int step_ptr = 0;  // 0 = not started
  ToneOfVoice tone = ToneOfVoice::Neutral;
  bool finished = false;
  std::string last_response;

  int k() const { return plan ? plan->size() : 0; }
};

inline void check_state(const DialogueState& s) {
  if (!s.plan) fail(ErrorCode::InvariantViolation, "dialogue state has no plan");
  if (s.step_ptr < 0 || s.step_ptr > s.k()) fail(ErrorCode::InvariantViolation, "step pointer out of range");
  if (s.finished && s.step_ptr != s.k()) fail(ErrorCode::InvariantViolation, "finished state not at last step");
}

struct PolicyDeps {
  const KnowledgeSidecar* sidecar = nullptr;
  const ResponseTemplateSet* templates = nullptr;
  GeneratorPort* port = nullptr;
};

/// Intent-specific inputs. Synthesis fills these in; a live caller may leave
/// them empty and the policy picks from the current step.
struct TurnPayload {
  std::string user_text;
  std::string entity;
  std::string resource;
  std::optional<QAPair> qa;
};

struct RespondResult {
  std::string response;
  ResponseCategory category = ResponseCategory::Nav;
  DialogueState state;
  bool templated = false;
  bool degraded = false;  // generator port failed, clarification template used
};

enum class NavDirection { Next, Prev, Repeat, Complete };

struct NavResult {
  std::string text;
  DialogueState state;
};

inline std::string render_step(const ResponseTemplateSet& tpl, Situation s, ToneOfVoice tone, const PlanStep& step,
                               SplitMix64& rng) {
  const auto n = std::to_string(step.index);
  return text::fill(tpl.pick(s, tone, rng), {{"n", n}, {"step", step.text}});
}

inline NavResult navigate(const DialogueState& state, NavDirection dir, const ResponseTemplateSet& tpl,
                          SplitMix64& rng) {
  check_state(state);
  NavResult r{{}, state};
  const int k = state.k();
  switch (dir) {
    case NavDirection::Next:
      if (state.step_ptr >= k) {
        r.state.step_ptr = k;
        r.state.finished = true;
        r.text = tpl.pick(Situation::Completion, state.tone, rng);
      } else {
        r.state.step_ptr = state.step_ptr + 1;
        const auto s = r.state.step_ptr == 1 ? Situation::FirstStep : Situation::StepDelivery;
        r.text = render_step(tpl, s, state.tone, state.plan->step(r.state.step_ptr), rng);
      }
      break;
    case NavDirection::Prev:
      if (state.step_ptr <= 1) {
        r.state.step_ptr = 1;
        r.text = render_step(tpl, Situation::PrevBoundary, state.tone, state.plan->step(1), rng);
      } else {
        r.state.step_ptr = state.step_ptr - 1;
        r.text = render_step(tpl, Situation::PreviousStep, state.tone, state.plan->step(r.state.step_ptr), rng);
      }
      r.state.finished = false;
      break;
    case NavDirection::Repeat:
      if (!state.last_response.empty()) {
        r.text = state.last_response;
      } else if (state.step_ptr >= 1) {
        r.text = render_step(tpl, Situation::RepeatPrefix, state.tone, state.plan->step(state.step_ptr), rng);
      } else {
        r.text = tpl.pick(Situation::NotStarted, state.tone, rng);
      }
      break;
    case NavDirection::Complete:
      r.state.step_ptr = k;
      r.state.finished = true;
      r.text = tpl.pick(Situation::Completion, state.tone, rng);
      break;
  }
  r.state.last_response = r.text;
  return r;
}

inline const QAPair& sample_qa(const DialogueState& state, const KnowledgeSidecar& sidecar, SplitMix64& rng) {
  const auto* list = state.step_ptr >= 1 ? sidecar.qa_for(state.step_ptr) : nullptr;
  if (!list) fail(ErrorCode::NoQAForStep, "no QA pairs for step " + std::to_string(state.step_ptr));
  return (*list)[rng.below(list->size())];
}

/// Gold answer for `question` at the current step. An exact (case-insensitive)
/// question match wins; otherwise a stored pair is sampled.
inline std::string answer_grounded_qa(const DialogueState& state, std::string_view question,
                                      const KnowledgeSidecar& sidecar, SplitMix64& rng) {
  const auto* list = state.step_ptr >= 1 ? sidecar.qa_for(state.step_ptr) : nullptr;
  if (!list) fail(ErrorCode::NoQAForStep, "no QA pairs for step " + std::to_string(state.step_ptr));
  const auto q = text::to_lower(text::trim(question));
  for (const auto& p : *list)
    if (text::to_lower(text::trim(p.question)) == q) return p.answer;
  return (*list)[rng.below(list->size())].answer;
}

inline std::string answer_definition(const DialogueState& state, std::string_view entity,
                                     const KnowledgeSidecar& sidecar, SplitMix64& rng) {
  std::string e = text::to_lower(text::trim(entity));
  if (e.empty()) {
    if (state.step_ptr < 1) fail(ErrorCode::UnknownEntity, "no step to take an entity from");
    const auto found = extract_entities(state.plan->step(state.step_ptr).text, sidecar.definitions);
    if (found.empty()) fail(ErrorCode::UnknownEntity, "no defined entity in the current step");
    auto it = found.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng.below(found.size())));
    e = *it;
  }
  auto it = sidecar.definitions.find(e);
  if (it == sidecar.definitions.end()) fail(ErrorCode::UnknownEntity, "no definition for '" + e + "'");
  return it->second;
}

/// Alternatives for `resource`, never including the resource itself.
inline std::vector<std::string> usable_alternatives(std::string_view resource, const KnowledgeSidecar& sidecar) {
  const auto key = text::to_lower(text::trim(resource));
  auto it = sidecar.substitutions.find(key);
  if (it == sidecar.substitutions.end()) return {};
  std::vector<std::string> alts;
  for (const auto& a : it->second)
    if (text::to_lower(text::trim(a)) != key) alts.push_back(a);
  return alts;
}

inline std::string suggest_replacement(const DialogueState& state, std::string_view resource,
                                       const KnowledgeSidecar& sidecar, const ResponseTemplateSet& tpl,
                                       SplitMix64& rng) {
  auto alts = usable_alternatives(resource, sidecar);
  if (alts.empty()) fail(ErrorCode::UnknownResource, "no substitutions for '" + std::string(resource) + "'");
  std::string named;
  if (alts.size() == 1) {
    named = alts[0];
  } else {
    const std::size_t a = rng.below(alts.size());
    std::size_t b = rng.below(alts.size() - 1);
    if (b >= a) ++b;
    named = alts[std::min(a, b)] + " or " + alts[std::max(a, b)];
  }
  return text::fill(tpl.pick(Situation::ReplacementSuggest, state.tone, rng), {{"alternatives", named}});
}

inline const std::string& fun_fact(const DialogueState& state, const KnowledgeSidecar& sidecar, SplitMix64& rng) {
  const auto* list = state.step_ptr >= 1 ? sidecar.facts_for(state.step_ptr) : nullptr;
  if (!list) fail(ErrorCode::NoFunFact, "no fun facts for step " + std::to_string(state.step_ptr));
  return (*list)[rng.below(list->size())];
}

inline const std::string& safety_reject(ToneOfVoice tone, const ResponseTemplateSet& tpl, SplitMix64& rng) {
  return tpl.pick(Situation::SafetyReject, tone, rng);
}

inline bool is_gratitude(std::string_view user_text) {
  const auto lower = text::to_lower(user_text);
  for (std::string_view w : {"thank", "thanks", "thx", "appreciate", "cheers"})
    if (lower.find(w) != std::string::npos) return true;
  return false;
}

struct ChitchatResult {
  std::string text;
  bool templated = false;
  bool degraded = false;
};

inline ChitchatResult chitchat_or_fallback(GeneratorPort* port, std::string_view user_text, ToneOfVoice tone,
                                           const ResponseTemplateSet& tpl, SplitMix64& rng) {
  if (is_gratitude(user_text)) return {tpl.pick(Situation::ThanksAck, tone, rng), true, false};
  if (port) {
    try {
      GenerationRequest req;
      req.prompt = render_chitchat_prompt(user_text);
      req.tone_hint = std::string(tone_phrase(tone));
      auto out = port->generate(req);
      if (!text::trim(out).empty()) return {std::move(out), false, false};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PortTimeout) throw;
    }
  }
  return {tpl.pick(Situation::Clarification, tone, rng), true, true};
}

/// One policy turn. Exactly one category is assigned; only navigation intents
/// move the step pointer.
inline RespondResult respond(const DialogueState& state, Intent intent, const TurnPayload& payload,
                             const PolicyDeps& deps, SplitMix64& rng) {
  check_state(state);
  if (!deps.templates || !deps.sidecar) fail(ErrorCode::InvariantViolation, "policy dependencies not set");
  if (!is_user_intent(intent)) fail(ErrorCode::UnhandledIntent, "synthetic intent " + std::string(to_string(intent)));
  if (state.finished && intent != Intent::ChitChat && intent != Intent::Question)
    fail(ErrorCode::UnhandledIntent, std::string(to_string(intent)) + " after the task was completed");

  const auto& tpl = *deps.templates;
  const auto& sc = *deps.sidecar;
  RespondResult r;
  r.category = category_of(intent);
  r.state = state;

  const auto nav = [&](NavDirection d) {
    auto n = navigate(state, d, tpl, rng);
    r.response = std::move(n.text);
    r.state = std::move(n.state);
    r.templated = true;
  };

  switch (intent) {
    case Intent::NextStep: nav(NavDirection::Next); break;
    case Intent::PreviousStep: nav(NavDirection::Prev); break;
    case Intent::Repeat: nav(NavDirection::Repeat); break;
    case Intent::CompleteTask: nav(NavDirection::Complete); break;
    case Intent::NewTask:
      r.response = tpl.pick(Situation::NewTaskConfirm, state.tone, rng);
      r.templated = true;
      break;
    case Intent::Question:
      r.response = payload.qa ? payload.qa->answer : answer_grounded_qa(state, payload.user_text, sc, rng);
      break;
    case Intent::DefinitionQuestion: r.response = answer_definition(state, payload.entity, sc, rng); break;
    case Intent::Replacement: {
      std::string resource = payload.resource;
      if (resource.empty()) {
        if (state.step_ptr < 1) fail(ErrorCode::UnknownResource, "no step to replace a resource in");
        const auto cands = replaceable_candidates(*state.plan, sc, state.step_ptr);
        if (cands.empty()) fail(ErrorCode::UnknownResource, "no replaceable resource in the current step");
        auto it = cands.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng.below(cands.size())));
        resource = *it;
      }
      r.response = suggest_replacement(state, resource, sc, tpl, rng);
      r.templated = true;
      break;
    }
    case Intent::GetFunFact: r.response = fun_fact(state, sc, rng); break;
    case Intent::Safety:
      r.response = safety_reject(state.tone, tpl, rng);
      r.templated = true;
      break;
    case Intent::ChitChat:
    case Intent::Fallback: {
      auto c = chitchat_or_fallback(deps.port, payload.user_text, state.tone, tpl, rng);
      r.response = std::move(c.text);
      r.templated = c.templated;
      r.degraded = c.degraded;
      break;
    }
    case Intent::Start:
    case Intent::End: fail(ErrorCode::UnhandledIntent, "synthetic intent");
  }
  r.state.last_response = r.response;
  check_state(r.state);
  return r;
}

}  // namespace plandial
