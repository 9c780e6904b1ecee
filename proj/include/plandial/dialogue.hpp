#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plandial/assistant_policy.hpp"
#include "plandial/errors.hpp"
#include "plandial/intent.hpp"
#include "plandial/plan_model.hpp"
#include "plandial/prompts.hpp"
#include "plandial/text.hpp"

namespace plandial {

/// Which construction produced a turn's rejected response.
enum class NegativeRule {
  WrongStep,
  PreviousQAAnswer,
  PreviousEntityDefinition,
  OtherResourceSuggestion,
  CrossPlanFunFact,
  SafetyCompliantStub,
  SafetyCompliantLive,
  RejectionTemplate,
};

inline constexpr std::array<NegativeRule, 8> kNegativeRules = {
    NegativeRule::WrongStep,          NegativeRule::PreviousQAAnswer,       NegativeRule::PreviousEntityDefinition,
    NegativeRule::OtherResourceSuggestion, NegativeRule::CrossPlanFunFact, NegativeRule::SafetyCompliantStub,
    NegativeRule::SafetyCompliantLive, NegativeRule::RejectionTemplate,
};

constexpr std::string_view to_string(NegativeRule r) noexcept {
  switch (r) {
    case NegativeRule::WrongStep: return "wrong_step";
    case NegativeRule::PreviousQAAnswer: return "previous_qa_answer";
    case NegativeRule::PreviousEntityDefinition: return "previous_entity_definition";
    case NegativeRule::OtherResourceSuggestion: return "other_resource_suggestion";
    case NegativeRule::CrossPlanFunFact: return "cross_plan_fun_fact";
    case NegativeRule::SafetyCompliantStub: return "safety_compliant_stub";
    case NegativeRule::SafetyCompliantLive: return "safety_compliant_live";
    case NegativeRule::RejectionTemplate: return "rejection_template";
  }
  return "?";
}

inline NegativeRule parse_negative_rule(std::string_view s) {
  for (NegativeRule r : kNegativeRules)
    if (to_string(r) == s) return r;
  fail(ErrorCode::ParseError, "unknown negative rule '" + std::string(s) + "'");
}

/// Rules a category may legitimately use; the rejection template is the
/// universal fallback.
inline bool rule_fits_category(NegativeRule r, ResponseCategory c) {
  if (r == NegativeRule::RejectionTemplate) return true;
  switch (c) {
    case ResponseCategory::Nav: return r == NegativeRule::WrongStep;
    case ResponseCategory::QA:
      return r == NegativeRule::PreviousQAAnswer || r == NegativeRule::PreviousEntityDefinition;
    case ResponseCategory::Open:
      return r == NegativeRule::OtherResourceSuggestion || r == NegativeRule::CrossPlanFunFact;
    case ResponseCategory::Norms:
      return r == NegativeRule::SafetyCompliantStub || r == NegativeRule::SafetyCompliantLive;
  }
  return false;
}

struct DialogueTurn {
  std::string user;
  Intent intent = Intent::NextStep;
  std::string response;
  std::string negative;
  NegativeRule negative_rule = NegativeRule::RejectionTemplate;
  std::string negative_source;  // provenance of the negative (plan id, entity, resource)
  std::string slot;             // entity / resource the user turn was built around
  int step_index = 0;           // pointer after the turn; 0 = not started
  ResponseCategory category = ResponseCategory::Nav;

  bool operator==(const DialogueTurn&) const = default;
};

enum class Split { Train, Val, Test, Unassigned };

constexpr std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unassigned: return "unassigned";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  for (Split x : {Split::Train, Split::Val, Split::Test, Split::Unassigned})
    if (to_string(x) == s) return x;
  fail(ErrorCode::ParseError, "unknown split '" + std::string(s) + "'");
}

struct Dialogue {
  std::string id;
  std::string plan_id;
  ToneOfVoice tone = ToneOfVoice::Neutral;
  std::vector<DialogueTurn> turns;
  std::uint64_t seed = 0;
  Split split = Split::Unassigned;

  bool operator==(const Dialogue&) const = default;
};

inline void validate_dialogue(const Dialogue& d, const ProceduralPlan& plan) {
  if (d.turns.empty()) fail(ErrorCode::InvariantViolation, "dialogue " + d.id + " has no turns");
  if (d.plan_id != plan.id) fail(ErrorCode::InvariantViolation, "dialogue " + d.id + " plan mismatch");
  for (const auto& t : d.turns) {
    if (!is_user_intent(t.intent)) fail(ErrorCode::InvariantViolation, "synthetic intent in dialogue " + d.id);
    if (t.category != category_of(t.intent))
      fail(ErrorCode::InvariantViolation, "dialogue " + d.id + ": category does not match intent");
    if (t.step_index < 0 || t.step_index > plan.size())
      fail(ErrorCode::InvariantViolation, "dialogue " + d.id + ": step index out of range");
    if (t.user.empty() || t.response.empty())
      fail(ErrorCode::InvariantViolation, "dialogue " + d.id + ": empty user or response text");
  }
}

// ---------------------------------------------------------------------------
// Serialization. nlohmann's default object type is an ordered std::map, so
// keys are always emitted sorted and output bytes are well defined.

inline Json turn_to_json(const DialogueTurn& t) {
  return {{"user", t.user},
          {"intent", std::string(to_string(t.intent))},
          {"response", t.response},
          {"negative", t.negative},
          {"negative_rule", std::string(to_string(t.negative_rule))},
          {"negative_source", t.negative_source},
          {"slot", t.slot},
          {"step_index", t.step_index},
          {"category", std::string(to_string(t.category))}};
}

inline Json dialogue_to_json(const Dialogue& d) {
  Json turns = Json::array();
  for (const auto& t : d.turns) turns.push_back(turn_to_json(t));
  return {{"id", d.id},
          {"plan_id", d.plan_id},
          {"tone", std::string(to_string(d.tone))},
          {"turns", turns},
          {"seed", d.seed},
          {"split", std::string(to_string(d.split))}};
}

inline Dialogue dialogue_from_json(const Json& j) {
  try {
    Dialogue d;
    d.id = j.at("id").get<std::string>();
    d.plan_id = j.at("plan_id").get<std::string>();
    d.tone = parse_tone(j.at("tone").get<std::string>());
    d.seed = j.at("seed").get<std::uint64_t>();
    d.split = parse_split(j.value("split", std::string("unassigned")));
    for (const auto& jt : j.at("turns")) {
      DialogueTurn t;
      t.user = jt.at("user").get<std::string>();
      t.intent = parse_intent(jt.at("intent").get<std::string>());
      t.response = jt.at("response").get<std::string>();
      t.negative = jt.at("negative").get<std::string>();
      t.negative_rule = parse_negative_rule(jt.at("negative_rule").get<std::string>());
      t.negative_source = jt.value("negative_source", std::string{});
      t.slot = jt.value("slot", std::string{});
      t.step_index = jt.at("step_index").get<int>();
      t.category = parse_category(jt.at("category").get<std::string>());
      d.turns.push_back(std::move(t));
    }
    return d;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("dialogue: ") + e.what());
  }
}

inline std::string dialogues_to_jsonl(const std::vector<Dialogue>& ds) {
  std::string out;
  for (const auto& d : ds) {
    out += dialogue_to_json(d).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Dialogue> dialogues_from_jsonl(std::string_view jsonl) {
  std::vector<Dialogue> out;
  std::size_t line_no = 0;
  for (const auto& line : text::split(jsonl, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(dialogue_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model input rendering

inline std::string render_plan_steps(const ProceduralPlan& plan) {
  std::vector<std::string> parts;
  for (const auto& s : plan.steps) parts.push_back("Step " + std::to_string(s.index) + ": " + s.text);
  return text::join(parts, " ");
}

inline std::string render_history_turn(const DialogueTurn& t) {
  std::string out;
  out += prompts::kPrompterToken;
  out += " " + t.user + " ";
  out += prompts::kEndOfTurnToken;
  out += " ";
  out += prompts::kAssistantToken;
  out += " " + t.response + " ";
  out += prompts::kEndOfTurnToken;
  out += " ";
  return out;
}

/// Model input for turn `turn_index` (0-based): grounding preamble, current
/// step, the fixed acknowledgment, the previous `t` turns and the user request.
inline std::string render_prompt(const Dialogue& d, const ProceduralPlan& plan, std::size_t turn_index, int t) {
  if (turn_index >= d.turns.size())
    fail(ErrorCode::ValidationError, "turn index " + std::to_string(turn_index) + " out of range");
  if (t < 1) fail(ErrorCode::ValidationError, "context window must be >= 1");
  const int current = turn_index == 0 ? 0 : d.turns[turn_index - 1].step_index;

  std::string declaration;
  if (current == 0) {
    declaration = prompts::kNotStartedDeclaration;
  } else {
    declaration = text::fill(std::string(prompts::kCurrentStepDeclaration), {{"current step", plan.step(current).text}});
    declaration = text::replace_all(std::move(declaration), "Step X:", "Step " + std::to_string(current) + ":");
  }

  const std::size_t first = turn_index > static_cast<std::size_t>(t) ? turn_index - static_cast<std::size_t>(t) : 0;
  std::string history;
  for (std::size_t i = first; i < turn_index; ++i) history += render_history_turn(d.turns[i]);

  // Fill the declaration first: the step text itself may contain braces.
  std::string out(prompts::kInputFormat);
  out = text::replace_all(std::move(out), prompts::kCurrentStepDeclaration, "\x01");
  out = text::replace_all(std::move(out), "{previous t turns}", "\x02");
  out = text::replace_all(std::move(out), "{current user request}", "\x03");
  out = text::replace_all(std::move(out), "{recipe steps}", "\x04");
  out = text::replace_all(std::move(out), "{tone of voice}", tone_phrase(d.tone));
  out = text::replace_all(std::move(out), "{title}", plan.title);
  out = text::replace_all(std::move(out), "\x04", render_plan_steps(plan));
  out = text::replace_all(std::move(out), "\x01", declaration);
  out = text::replace_all(std::move(out), "\x02", history);
  out = text::replace_all(std::move(out), "\x03", d.turns[turn_index].user);
  return out;
}

}  // namespace plandial
