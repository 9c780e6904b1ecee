#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "plandial/errors.hpp"

namespace plandial {

enum class Intent {
  NextStep,
  PreviousStep,
  CompleteTask,
  Repeat,
  NewTask,
  Question,
  DefinitionQuestion,
  Replacement,
  GetFunFact,
  ChitChat,
  Safety,
  Fallback,
  // Synthetic graph endpoints, never emitted as a user turn.
  Start,
  End,
};

inline constexpr std::size_t kIntentCount = 14;

inline constexpr std::array<Intent, 12> kUserIntents = {
    Intent::NextStep,   Intent::PreviousStep,       Intent::CompleteTask, Intent::Repeat,
    Intent::NewTask,    Intent::Question,           Intent::DefinitionQuestion,
    Intent::Replacement, Intent::GetFunFact,        Intent::ChitChat,     Intent::Safety,
    Intent::Fallback,
};

inline constexpr std::array<Intent, kIntentCount> kAllIntents = {
    Intent::NextStep,   Intent::PreviousStep,       Intent::CompleteTask, Intent::Repeat,
    Intent::NewTask,    Intent::Question,           Intent::DefinitionQuestion,
    Intent::Replacement, Intent::GetFunFact,        Intent::ChitChat,     Intent::Safety,
    Intent::Fallback,   Intent::Start,              Intent::End,
};

/// The four dialogue-behaviour objectives; every user turn belongs to exactly one.
enum class ResponseCategory { Nav, QA, Open, Norms };

inline constexpr std::array<ResponseCategory, 4> kCategories = {
    ResponseCategory::Nav, ResponseCategory::QA, ResponseCategory::Open, ResponseCategory::Norms};

constexpr std::size_t index_of(Intent i) noexcept { return static_cast<std::size_t>(i); }
constexpr std::size_t index_of(ResponseCategory c) noexcept { return static_cast<std::size_t>(c); }

constexpr bool is_user_intent(Intent i) noexcept { return i != Intent::Start && i != Intent::End; }

constexpr std::string_view to_string(Intent i) noexcept {
  switch (i) {
    case Intent::NextStep: return "NextStep";
    case Intent::PreviousStep: return "PreviousStep";
    case Intent::CompleteTask: return "CompleteTask";
    case Intent::Repeat: return "Repeat";
    case Intent::NewTask: return "NewTask";
    case Intent::Question: return "Question";
    case Intent::DefinitionQuestion: return "DefinitionQuestion";
    case Intent::Replacement: return "Replacement";
    case Intent::GetFunFact: return "GetFunFact";
    case Intent::ChitChat: return "ChitChat";
    case Intent::Safety: return "Safety";
    case Intent::Fallback: return "Fallback";
    case Intent::Start: return "Start";
    case Intent::End: return "End";
  }
  return "?";
}

constexpr std::string_view to_string(ResponseCategory c) noexcept {
  switch (c) {
    case ResponseCategory::Nav: return "Nav";
    case ResponseCategory::QA: return "QA";
    case ResponseCategory::Open: return "Open";
    case ResponseCategory::Norms: return "Norms";
  }
  return "?";
}

inline std::optional<Intent> try_parse_intent(std::string_view label) {
  for (Intent i : kAllIntents)
    if (to_string(i) == label) return i;
  return std::nullopt;
}

inline Intent parse_intent(std::string_view label) {
  if (auto i = try_parse_intent(label)) return *i;
  fail(ErrorCode::UnknownIntentLabel, "unknown intent label '" + std::string(label) + "'");
}

inline ResponseCategory parse_category(std::string_view label) {
  for (ResponseCategory c : kCategories)
    if (to_string(c) == label) return c;
  fail(ErrorCode::ParseError, "unknown response category '" + std::string(label) + "'");
}

inline ResponseCategory category_of(Intent i) {
  switch (i) {
    case Intent::NextStep:
    case Intent::PreviousStep:
    case Intent::CompleteTask:
    case Intent::Repeat:
    case Intent::NewTask: return ResponseCategory::Nav;
    case Intent::Question:
    case Intent::DefinitionQuestion: return ResponseCategory::QA;
    case Intent::Replacement:
    case Intent::GetFunFact: return ResponseCategory::Open;
    case Intent::ChitChat:
    case Intent::Safety:
    case Intent::Fallback: return ResponseCategory::Norms;
    case Intent::Start:
    case Intent::End: break;
  }
  fail(ErrorCode::UnhandledIntent, "synthetic intent " + std::string(to_string(i)) + " has no category");
}

}  // namespace plandial
