#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plandial/errors.hpp"
#include "plandial/intent.hpp"
#include "plandial/rng.hpp"
#include "plandial/text.hpp"

namespace plandial {

struct WeightedUtterance {
  std::string text;
  std::uint64_t frequency = 1;
};

/// Real user utterances per intent, weighted by how often they were observed.
struct UtteranceBank {
  std::map<Intent, std::vector<WeightedUtterance>> entries;

  std::size_t size(Intent i) const {
    auto it = entries.find(i);
    return it == entries.end() ? 0 : it->second.size();
  }
};

inline const std::set<std::string>& default_wake_words() {
  static const std::set<std::string> words = {"alexa", "amazon", "computer", "echo", "ziggy"};
  return words;
}

struct ScrubReport {
  std::vector<std::string> rewritten;  // "before -> after"
  std::vector<std::string> dropped;    // utterances that were only wake words
};

namespace detail {

inline std::string strip_edge_punct(std::string_view tok) {
  while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
  while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
  return std::string(tok);
}

inline bool contains_wake_word(std::string_view utterance, const std::set<std::string>& blocklist) {
  for (const auto& tok : text::split_whitespace(utterance))
    if (blocklist.contains(text::to_lower(strip_edge_punct(tok)))) return true;
  return false;
}

inline std::string scrub_wake_words(std::string_view utterance, const std::set<std::string>& blocklist) {
  std::vector<std::string> kept;
  for (auto& tok : text::split_whitespace(utterance))
    if (!blocklist.contains(text::to_lower(strip_edge_punct(tok)))) kept.push_back(std::move(tok));
  std::string out = text::join(kept, " ");
  // A leading comma left behind by "alexa, next" reads badly.
  while (!out.empty() && (out.front() == ',' || out.front() == ' ')) out.erase(0, 1);
  return out;
}

}  // namespace detail

inline void validate_bank(const UtteranceBank& bank, const std::set<std::string>& blocklist = default_wake_words()) {
  for (const auto& [intent, list] : bank.entries) {
    if (!is_user_intent(intent)) fail(ErrorCode::ValidationError, "bank keyed by synthetic intent");
    for (const auto& u : list) {
      if (u.frequency < 1) fail(ErrorCode::ValidationError, "utterance '" + u.text + "' has zero frequency");
      if (text::trim(u.text).empty()) fail(ErrorCode::ValidationError, "empty utterance");
      if (detail::contains_wake_word(u.text, blocklist))
        fail(ErrorCode::ValidationError, "utterance '" + u.text + "' contains a wake word");
    }
  }
}

/// TSV columns: intent, utterance, frequency. A header row starting with
/// "intent" is skipped. Wake words are scrubbed on import; utterances that
/// collapse onto each other have their frequencies merged.
inline UtteranceBank parse_bank_tsv(std::string_view tsv, const std::set<std::string>& blocklist = default_wake_words(),
                                    ScrubReport* report = nullptr) {
  UtteranceBank bank;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(tsv, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (line_no == 1 && !cols.empty() && text::trim(cols[0]) == "intent") continue;
    if (cols.size() != 3) fail(ErrorCode::ParseError, "bank line " + std::to_string(line_no) + ": expected 3 columns");
    const Intent intent = parse_intent(text::trim(cols[0]));
    if (!is_user_intent(intent)) fail(ErrorCode::UnknownIntentLabel, "bank uses synthetic intent");
    std::uint64_t freq = 0;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(std::string(text::trim(cols[2])), &used);
      if (v < 1 || used != text::trim(cols[2]).size()) throw std::invalid_argument("freq");
      freq = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bank line " + std::to_string(line_no) + ": frequency must be a positive integer");
    }
    std::string utt(text::trim(cols[1]));
    if (detail::contains_wake_word(utt, blocklist)) {
      std::string cleaned = detail::scrub_wake_words(utt, blocklist);
      if (cleaned.empty()) {
        if (report) report->dropped.push_back(utt);
        continue;
      }
      if (report) report->rewritten.push_back(utt + " -> " + cleaned);
      utt = std::move(cleaned);
    }
    if (utt.empty()) fail(ErrorCode::ParseError, "bank line " + std::to_string(line_no) + ": empty utterance");
    auto& list = bank.entries[intent];
    auto it = std::find_if(list.begin(), list.end(), [&](const auto& w) { return w.text == utt; });
    if (it != list.end())
      it->frequency += freq;
    else
      list.push_back({std::move(utt), freq});
  }
  validate_bank(bank, blocklist);
  return bank;
}

inline UtteranceBank load_bank(const std::filesystem::path& path,
                               const std::set<std::string>& blocklist = default_wake_words(),
                               ScrubReport* report = nullptr) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::IoError, "bank file " + path.string() + " does not exist");
  return parse_bank_tsv(text::read_file(path), blocklist, report);
}

inline const std::string& sample_utterance(const UtteranceBank& bank, Intent intent, SplitMix64& rng) {
  auto it = bank.entries.find(intent);
  if (it == bank.entries.end() || it->second.empty())
    fail(ErrorCode::NoUtterancesForIntent, "no utterances for " + std::string(to_string(intent)));
  std::vector<double> w;
  w.reserve(it->second.size());
  for (const auto& u : it->second) w.push_back(static_cast<double>(u.frequency));
  return it->second[rng.weighted(w)].text;
}

// ---------------------------------------------------------------------------
// Request templates for definition questions and replacement requests.

struct RequestTemplateSet {
  std::vector<std::string> definition_templates;   // each has one {entity}
  std::vector<std::string> replacement_templates;  // each has one {resource}
};

inline void validate_request_templates(const RequestTemplateSet& t) {
  for (const auto& s : t.definition_templates)
    if (text::count_occurrences(s, "{entity}") != 1 || text::count_occurrences(s, "{") != 1)
      fail(ErrorCode::ValidationError, "definition template needs exactly one {entity}: " + s);
  for (const auto& s : t.replacement_templates)
    if (text::count_occurrences(s, "{resource}") != 1 || text::count_occurrences(s, "{") != 1)
      fail(ErrorCode::ValidationError, "replacement template needs exactly one {resource}: " + s);
}

inline RequestTemplateSet request_templates_from_json(const Json& j) {
  RequestTemplateSet t;
  try {
    if (j.contains("entity")) t.definition_templates = j.at("entity").get<std::vector<std::string>>();
    if (j.contains("resource")) t.replacement_templates = j.at("resource").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("request templates: ") + e.what());
  }
  validate_request_templates(t);
  return t;
}

inline RequestTemplateSet load_request_templates(const std::filesystem::path& path) {
  try {
    return request_templates_from_json(Json::parse(text::read_file(path)));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

inline std::string render_definition_question(const RequestTemplateSet& t, std::string_view entity, SplitMix64& rng) {
  if (t.definition_templates.empty()) fail(ErrorCode::EmptyTemplateSet, "no definition templates");
  if (entity.empty()) fail(ErrorCode::ValidationError, "empty entity");
  return text::fill(t.definition_templates[rng.below(t.definition_templates.size())], {{"entity", entity}});
}

inline std::string render_replacement_request(const RequestTemplateSet& t, std::string_view resource,
                                              SplitMix64& rng) {
  if (t.replacement_templates.empty()) fail(ErrorCode::EmptyTemplateSet, "no replacement templates");
  if (resource.empty()) fail(ErrorCode::ValidationError, "empty resource");
  return text::fill(t.replacement_templates[rng.below(t.replacement_templates.size())], {{"resource", resource}});
}

}  // namespace plandial
