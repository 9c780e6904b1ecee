#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "plandial/assistant_policy.hpp"
#include "plandial/dialogue.hpp"
#include "plandial/errors.hpp"
#include "plandial/plan_model.hpp"
#include "plandial/prompts.hpp"
#include "plandial/text.hpp"

namespace plandial {

// ---------------------------------------------------------------------------
// ROUGE-L

struct RougeTokenizer {
  bool lowercase = true;
  bool strip_punctuation = true;

  std::vector<std::string> operator()(std::string_view s) const {
    std::string buf;
    buf.reserve(s.size());
    for (unsigned char c : s) {
      if (strip_punctuation && std::ispunct(c)) continue;
      buf.push_back(lowercase ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return text::split_whitespace(buf);
  }
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Longest common subsequence length, O(|a||b|) time, O(|b|) memory.
inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline RougeScore rouge_l_tokens(std::span<const std::string> cand, std::span<const std::string> ref) {
  if (cand.empty() || ref.empty()) return {};
  const auto lcs = static_cast<double>(lcs_length(cand, ref));
  if (lcs == 0) return {};
  RougeScore s;
  s.precision = lcs / static_cast<double>(cand.size());
  s.recall = lcs / static_cast<double>(ref.size());
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

inline RougeScore rouge_l(std::string_view candidate, std::string_view reference, const RougeTokenizer& tok = {}) {
  const auto c = tok(candidate);
  const auto r = tok(reference);
  return rouge_l_tokens(c, r);
}

/// Embedding-based metrics are pluggable; none ships with the harness.
class MetricPort {
 public:
  virtual ~MetricPort() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> score(std::span<const std::string> candidates, std::span<const std::string> references) = 0;
};

// ---------------------------------------------------------------------------
// Fleiss kappa

struct AnnotationMatrix {
  std::vector<std::vector<int>> counts;  // items x categories

  int raters() const {
    if (counts.empty()) return 0;
    int r = 0;
    for (int c : counts.front()) r += c;
    return r;
  }
};

inline void validate_matrix(const AnnotationMatrix& m) {
  if (m.counts.empty()) fail(ErrorCode::ValidationError, "annotation matrix has no items");
  const auto k = m.counts.front().size();
  if (k == 0) fail(ErrorCode::ValidationError, "annotation matrix has no categories");
  const int r = m.raters();
  if (r < 2) fail(ErrorCode::ValidationError, "need at least two raters per item");
  for (const auto& row : m.counts) {
    if (row.size() != k) fail(ErrorCode::ValidationError, "ragged annotation matrix");
    int s = 0;
    for (int c : row) {
      if (c < 0) fail(ErrorCode::ValidationError, "negative annotation count");
      s += c;
    }
    if (s != r) fail(ErrorCode::ValidationError, "rows must all sum to the same rater count");
  }
}

inline double fleiss_kappa(const AnnotationMatrix& m) {
  validate_matrix(m);
  const auto n = static_cast<double>(m.counts.size());
  const int r = m.raters();
  const auto k = m.counts.front().size();

  const bool perfect = std::all_of(m.counts.begin(), m.counts.end(), [&](const auto& row) {
    return std::any_of(row.begin(), row.end(), [&](int c) { return c == r; });
  });
  if (perfect) return 1.0;

  const double rr = static_cast<double>(r);
  double p_bar = 0.0;
  std::vector<double> col(k, 0.0);
  for (const auto& row : m.counts) {
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<double>(row[j]) * row[j];
      col[j] += row[j];
    }
    p_bar += (sq - rr) / (rr * (rr - 1.0));
  }
  p_bar /= n;
  double p_e = 0.0;
  for (double c : col) {
    const double pj = c / (n * rr);
    p_e += pj * pj;
  }
  if (p_e >= 1.0) fail(ErrorCode::DegenerateExpectedAgreement, "expected agreement is 1");
  return (p_bar - p_e) / (1.0 - p_e);
}

// ---------------------------------------------------------------------------
// Judge prompts

enum class JudgeKind { WinRate, Navigation, QA, Replacement, FunFact, Politeness, Safety };

inline constexpr std::array<JudgeKind, 7> kJudgeKinds = {JudgeKind::WinRate,     JudgeKind::Navigation,
                                                         JudgeKind::QA,          JudgeKind::Replacement,
                                                         JudgeKind::FunFact,     JudgeKind::Politeness,
                                                         JudgeKind::Safety};

constexpr std::string_view to_string(JudgeKind k) noexcept {
  switch (k) {
    case JudgeKind::WinRate: return "win_rate";
    case JudgeKind::Navigation: return "navigation";
    case JudgeKind::QA: return "qa";
    case JudgeKind::Replacement: return "replacement";
    case JudgeKind::FunFact: return "fun_fact";
    case JudgeKind::Politeness: return "politeness";
    case JudgeKind::Safety: return "safety";
  }
  return "?";
}

inline JudgeKind parse_judge_kind(std::string_view s) {
  for (JudgeKind k : kJudgeKinds)
    if (to_string(k) == s) return k;
  fail(ErrorCode::ParseError, "unknown judge kind '" + std::string(s) + "'");
}

/// Values a judge may answer with, already normalized (lowercase, trimmed).
inline std::vector<std::string> answer_schema(JudgeKind k) {
  switch (k) {
    case JudgeKind::WinRate: return {"response 1", "response 2"};
    case JudgeKind::Navigation: return {"accurate", "inaccurate"};
    case JudgeKind::QA:
    case JudgeKind::Safety: return {"yes", "no"};
    case JudgeKind::Replacement:
    case JudgeKind::FunFact:
    case JudgeKind::Politeness: return {"0", "1", "2"};
  }
  return {};
}

inline std::string_view annotation_question(JudgeKind k) {
  switch (k) {
    case JudgeKind::Navigation: return prompts::kQuestionNavigation;
    case JudgeKind::QA: return prompts::kQuestionQA;
    case JudgeKind::Replacement: return prompts::kQuestionReplacement;
    case JudgeKind::FunFact: return prompts::kQuestionFunFact;
    case JudgeKind::Politeness: return prompts::kQuestionPoliteness;
    case JudgeKind::Safety: return prompts::kQuestionSafety;
    case JudgeKind::WinRate: break;
  }
  return {};
}

struct JudgeFixture {
  std::string recipe_text;
  std::string dialog;  // prior turns, already formatted
  std::string user;
  std::string response_1;
  std::string response_2;  // win_rate only
};

struct JudgePrompt {
  JudgeKind kind = JudgeKind::WinRate;
  std::string rendered_text;
  std::vector<std::string> answer_schema;
};

/// "Title\nStep 1: ...\nStep 2: ..." for the recipe slot.
inline std::string format_recipe_text(const ProceduralPlan& plan) {
  std::string out = plan.title;
  for (const auto& s : plan.steps) out += "\nStep " + std::to_string(s.index) + ": " + s.text;
  return out;
}

/// "User: ...\nAssistant: ..." lines for turns [0, upto).
inline std::string format_dialog(const Dialogue& d, std::size_t upto) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < upto && i < d.turns.size(); ++i) {
    lines.push_back("User: " + d.turns[i].user);
    lines.push_back("Assistant: " + d.turns[i].response);
  }
  return text::join(lines, "\n");
}

/// Fixture for judging turn `turn_index` of `d`; `response_1` defaults to the
/// gold response.
inline JudgeFixture fixture_for_turn(const Dialogue& d, const ProceduralPlan& plan, std::size_t turn_index) {
  if (turn_index >= d.turns.size()) fail(ErrorCode::MissingFixture, "turn index out of range");
  const auto& t = d.turns[turn_index];
  return {format_recipe_text(plan), format_dialog(d, turn_index), t.user, t.response, {}};
}

namespace detail {

/// Replaces each slot exactly once, in order, so slot-like text inside a
/// substituted value is never re-expanded.
inline std::string fill_once(std::string_view tpl, std::span<const std::pair<std::string_view, std::string_view>> slots) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& [name, value] : slots) {
    const std::string key = "{" + std::string(name) + "}";
    const auto at = tpl.find(key, pos);
    if (at == std::string_view::npos) fail(ErrorCode::InvariantViolation, "template lacks slot " + key);
    out.append(tpl.substr(pos, at - pos));
    out.append(value);
    pos = at + key.size();
  }
  out.append(tpl.substr(pos));
  return out;
}

}  // namespace detail

inline JudgePrompt build_judge_prompt(JudgeKind kind, const JudgeFixture& f) {
  const auto need = [&](const std::string& v, const char* what) {
    if (text::trim(v).empty()) fail(ErrorCode::MissingFixture, std::string(to_string(kind)) + " prompt needs " + what);
  };
  need(f.recipe_text, "recipe_text");
  need(f.user, "user");
  need(f.response_1, "an assistant response");
  JudgePrompt p{kind, {}, answer_schema(kind)};
  if (kind == JudgeKind::WinRate) {
    need(f.response_2, "a second response");
    const std::pair<std::string_view, std::string_view> slots[] = {{"recipe_text", f.recipe_text},
                                                                   {"dialog", f.dialog},
                                                                   {"user", f.user},
                                                                   {"assistant_response_1", f.response_1},
                                                                   {"assistant_response_2", f.response_2}};
    p.rendered_text = detail::fill_once(prompts::kJudgeWinRate, slots);
  } else {
    const std::pair<std::string_view, std::string_view> slots[] = {{"recipe_text", f.recipe_text},
                                                                   {"dialog_context", f.dialog},
                                                                   {"user", f.user},
                                                                   {"assistant_response", f.response_1},
                                                                   {"annotation_question", annotation_question(kind)}};
    p.rendered_text = detail::fill_once(prompts::kJudgePrefix, slots);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Verdicts

struct ParsedVerdict {
  bool ok = false;
  std::string value;   // normalized schema value when ok
  std::string reason;  // why parsing failed otherwise
};

/// Takes the text after the last line starting with "Answer:", normalizes it
/// (trim, lowercase, optional surrounding <>) and checks it against the schema.
/// Never guesses: anything off-schema is reported as unparseable.
inline ParsedVerdict parse_judge_answer(JudgeKind kind, std::string_view raw) {
  std::optional<std::string> answer;
  for (const auto& line : text::split(raw, '\n')) {
    const auto t = text::trim(line);
    if (t.size() >= 7 && text::to_lower(t.substr(0, 7)) == "answer:") answer = std::string(t.substr(7));
  }
  if (!answer) return {false, {}, "no Answer: line"};
  std::string v = text::to_lower(text::trim(*answer));
  if (!v.empty() && v.back() == '.') v.pop_back();
  if (v.size() >= 2 && v.front() == '<' && v.back() == '>') v = text::to_lower(text::trim(v.substr(1, v.size() - 2)));
  if (!v.empty() && v.back() == '.') v.pop_back();
  for (const auto& s : answer_schema(kind))
    if (v == s) return {true, v, {}};
  return {false, {}, "answer '" + v + "' not in schema"};
}

enum class Outcome { Win, Lose, Unparseable };

/// Win-rate outcome of one pairwise verdict when the candidate sat in
/// position `candidate_position` (1 or 2).
inline Outcome win_outcome(const ParsedVerdict& v, int candidate_position) {
  if (!v.ok) return Outcome::Unparseable;
  const std::string mine = "response " + std::to_string(candidate_position);
  return v.value == mine ? Outcome::Win : Outcome::Lose;
}

struct WinRateReport {
  std::size_t wins = 0;
  std::size_t counted = 0;
  double rate = 0.0;
  std::vector<std::size_t> excluded;  // indices of unparseable verdicts
};

inline WinRateReport aggregate_win_rate(std::span<const Outcome> verdicts) {
  if (verdicts.empty()) fail(ErrorCode::EmptyVerdictSet, "no verdicts to aggregate");
  WinRateReport r;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == Outcome::Unparseable) {
      r.excluded.push_back(i);
      continue;
    }
    ++r.counted;
    if (verdicts[i] == Outcome::Win) ++r.wins;
  }
  if (r.counted == 0) fail(ErrorCode::EmptyVerdictSet, "every verdict was unparseable");
  r.rate = static_cast<double>(r.wins) / static_cast<double>(r.counted);
  return r;
}

inline Json win_report_to_json(const WinRateReport& r) {
  return {{"wins", r.wins}, {"counted", r.counted}, {"rate", r.rate}, {"excluded", r.excluded}};
}

/// One line of a verdict file.
struct VerdictRecord {
  JudgeKind kind = JudgeKind::WinRate;
  std::string item_id;
  std::string raw;
  ParsedVerdict parsed;
  int candidate_position = 1;  // win_rate only
};

inline Json verdict_to_json(const VerdictRecord& v) {
  Json j = {{"kind", std::string(to_string(v.kind))}, {"item_id", v.item_id}, {"raw", v.raw}};
  j["parsed"] = v.parsed.ok ? Json(v.parsed.value) : Json(nullptr);
  if (v.kind == JudgeKind::WinRate) j["candidate_position"] = v.candidate_position;
  return j;
}

/// Reads a verdict JSONL file. The stored "parsed" field is ignored: raw
/// answers are always re-parsed so stale files cannot smuggle in verdicts.
inline std::vector<VerdictRecord> verdicts_from_jsonl(std::string_view jsonl) {
  std::vector<VerdictRecord> out;
  std::size_t line_no = 0;
  for (const auto& line : text::split(jsonl, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = Json::parse(line);
      VerdictRecord v;
      v.kind = parse_judge_kind(j.at("kind").get<std::string>());
      v.item_id = j.at("item_id").get<std::string>();
      v.raw = j.at("raw").get<std::string>();
      v.candidate_position = j.value("candidate_position", 1);
      if (v.candidate_position != 1 && v.candidate_position != 2)
        fail(ErrorCode::ValidationError, "candidate_position must be 1 or 2");
      v.parsed = parse_judge_answer(v.kind, v.raw);
      out.push_back(std::move(v));
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "verdict line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

/// Sends prompts through the port with at most `parallelism` calls in flight.
/// A timed-out call yields an empty raw answer, which parses as unparseable.
inline std::vector<std::string> run_judges(GeneratorPort& port, std::span<const JudgePrompt> judge_prompts,
                                           int parallelism = 4) {
  std::vector<std::string> raw(judge_prompts.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < judge_prompts.size();) {
      GenerationRequest req;
      req.prompt = judge_prompts[i].rendered_text;
      req.temperature = 0.0;
      try {
        raw[i] = port.generate(req);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::PortTimeout) continue;
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int j = 0; j < std::max(1, parallelism); ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return raw;
}

}  // namespace plandial
