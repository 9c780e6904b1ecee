#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plandial/errors.hpp"
#include "plandial/text.hpp"

namespace plandial {

enum class PlanDomain { Cooking, Diy };

inline std::string_view to_string(PlanDomain d) noexcept { return d == PlanDomain::Cooking ? "cooking" : "diy"; }

inline PlanDomain parse_domain(std::string_view s) {
  if (s == "cooking") return PlanDomain::Cooking;
  if (s == "diy") return PlanDomain::Diy;
  fail(ErrorCode::ParseError, "unknown plan domain '" + std::string(s) + "'");
}

struct PlanStep {
  int index = 0;  // 1-based
  std::string text;
  std::set<std::string> entities;
  std::set<std::string> resources;

  bool operator==(const PlanStep&) const = default;
};

struct ProceduralPlan {
  std::string id;
  std::string title;
  PlanDomain domain = PlanDomain::Cooking;
  std::vector<PlanStep> steps;
  std::set<std::string> all_resources;

  int size() const noexcept { return static_cast<int>(steps.size()); }

  const PlanStep& step(int index) const {
    if (index < 1 || index > size())
      fail(ErrorCode::StepOutOfRange,
           "step " + std::to_string(index) + " outside 1.." + std::to_string(size()) + " of plan " + id);
    return steps[static_cast<std::size_t>(index - 1)];
  }

  bool operator==(const ProceduralPlan&) const = default;
};

struct QAPair {
  std::string question;
  std::string answer;

  bool operator==(const QAPair&) const = default;
};

/// Resources used this rarely across the corpus count as replaceable.
inline constexpr int kRareResourceThreshold = 4;

struct KnowledgeSidecar {
  std::map<int, std::vector<QAPair>> qa_pairs;
  std::map<int, std::vector<std::string>> fun_facts;
  std::map<std::string, std::string> definitions;
  std::map<std::string, std::vector<std::string>> substitutions;
  std::set<std::string> rare_resources;

  const std::vector<QAPair>* qa_for(int step) const {
    auto it = qa_pairs.find(step);
    return it == qa_pairs.end() || it->second.empty() ? nullptr : &it->second;
  }
  const std::vector<std::string>* facts_for(int step) const {
    auto it = fun_facts.find(step);
    return it == fun_facts.end() || it->second.empty() ? nullptr : &it->second;
  }
};

namespace detail {

inline std::set<std::string> lowercase_set(const Json& arr) {
  std::set<std::string> out;
  for (const auto& v : arr) out.insert(text::to_lower(text::trim(v.get<std::string>())));
  out.erase("");
  return out;
}

template <typename Fn>
auto guarded_parse(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

inline int parse_step_key(const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "step key '" + key + "' is not an integer");
  }
}

}  // namespace detail

/// Throws ValidationError on a broken plan; returns soft warnings otherwise.
inline std::vector<std::string> validate_plan(const ProceduralPlan& plan) {
  std::vector<std::string> warnings;
  if (plan.id.empty()) fail(ErrorCode::ValidationError, "plan id is empty");
  if (plan.steps.empty()) fail(ErrorCode::ValidationError, "plan " + plan.id + " has no steps");
  std::set<std::string> used;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    if (s.index != static_cast<int>(i) + 1)
      fail(ErrorCode::ValidationError, "plan " + plan.id + ": step indices are not contiguous 1..k (found " +
                                           std::to_string(s.index) + " at position " + std::to_string(i + 1) + ")");
    if (text::trim(s.text).empty())
      fail(ErrorCode::ValidationError, "plan " + plan.id + ": step " + std::to_string(s.index) + " has empty text");
    for (const auto* set : {&s.entities, &s.resources})
      for (const auto& e : *set)
        if (e != text::to_lower(e))
          fail(ErrorCode::ValidationError, "plan " + plan.id + ": '" + e + "' is not lowercase");
    used.insert(s.resources.begin(), s.resources.end());
  }
  for (const auto& r : used)
    if (!plan.all_resources.contains(r))
      fail(ErrorCode::ValidationError, "plan " + plan.id + ": all_resources is missing '" + r + "'");
  if (plan.steps.size() < 3) warnings.push_back("plan " + plan.id + " has fewer than 3 steps");
  return warnings;
}

inline ProceduralPlan plan_from_json(const Json& j) {
  return detail::guarded_parse("plan", [&] {
    ProceduralPlan plan;
    plan.id = j.at("id").get<std::string>();
    plan.title = j.at("title").get<std::string>();
    plan.domain = parse_domain(j.at("domain").get<std::string>());
    for (const auto& js : j.at("steps")) {
      PlanStep s;
      s.index = js.at("index").get<int>();
      s.text = js.at("text").get<std::string>();
      if (js.contains("entities")) s.entities = detail::lowercase_set(js.at("entities"));
      if (js.contains("resources")) s.resources = detail::lowercase_set(js.at("resources"));
      plan.steps.push_back(std::move(s));
    }
    if (j.contains("all_resources")) {
      plan.all_resources = detail::lowercase_set(j.at("all_resources"));
    } else {
      for (const auto& s : plan.steps) plan.all_resources.insert(s.resources.begin(), s.resources.end());
    }
    return plan;
  });
}

inline Json plan_to_json(const ProceduralPlan& plan) {
  Json steps = Json::array();
  for (const auto& s : plan.steps)
    steps.push_back({{"index", s.index}, {"text", s.text}, {"entities", s.entities}, {"resources", s.resources}});
  return {{"id", plan.id},
          {"title", plan.title},
          {"domain", to_string(plan.domain)},
          {"steps", steps},
          {"all_resources", plan.all_resources}};
}

inline std::string serialize_plan(const ProceduralPlan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

inline ProceduralPlan parse_plan(std::string_view document, std::vector<std::string>* warnings = nullptr) {
  Json j;
  try {
    j = Json::parse(document);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("plan document: ") + e.what());
  }
  ProceduralPlan plan = plan_from_json(j);
  auto w = validate_plan(plan);
  if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  return plan;
}

inline ProceduralPlan load_plan(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::IoError, "plan file " + path.string() + " does not exist");
  return parse_plan(text::read_file(path), warnings);
}

// ---------------------------------------------------------------------------
// Knowledge sidecars

inline KnowledgeSidecar sidecar_from_json(const Json& j) {
  return detail::guarded_parse("sidecar", [&] {
    KnowledgeSidecar sc;
    if (j.contains("qa_pairs"))
      for (const auto& [key, list] : j.at("qa_pairs").items()) {
        auto& dst = sc.qa_pairs[detail::parse_step_key(key)];
        for (const auto& qa : list) dst.push_back({qa.at("question").get<std::string>(), qa.at("answer").get<std::string>()});
      }
    if (j.contains("fun_facts"))
      for (const auto& [key, list] : j.at("fun_facts").items())
        sc.fun_facts[detail::parse_step_key(key)] = list.get<std::vector<std::string>>();
    if (j.contains("definitions"))
      for (const auto& [key, def] : j.at("definitions").items())
        sc.definitions[text::to_lower(key)] = def.get<std::string>();
    if (j.contains("substitutions"))
      for (const auto& [key, alts] : j.at("substitutions").items())
        sc.substitutions[text::to_lower(key)] = alts.get<std::vector<std::string>>();
    if (j.contains("rare_resources")) sc.rare_resources = detail::lowercase_set(j.at("rare_resources"));
    return sc;
  });
}

inline Json sidecar_to_json(const KnowledgeSidecar& sc) {
  Json qa = Json::object();
  for (const auto& [step, list] : sc.qa_pairs) {
    Json arr = Json::array();
    for (const auto& p : list) arr.push_back({{"question", p.question}, {"answer", p.answer}});
    qa[std::to_string(step)] = arr;
  }
  Json facts = Json::object();
  for (const auto& [step, list] : sc.fun_facts) facts[std::to_string(step)] = list;
  return {{"qa_pairs", qa},
          {"fun_facts", facts},
          {"definitions", sc.definitions},
          {"substitutions", sc.substitutions},
          {"rare_resources", sc.rare_resources}};
}

inline void validate_sidecar(const KnowledgeSidecar& sc, const ProceduralPlan& plan) {
  const auto check_step = [&](int step, const char* what) {
    if (step < 1 || step > plan.size())
      fail(ErrorCode::ValidationError, std::string(what) + " key " + std::to_string(step) +
                                           " outside plan " + plan.id + " bounds 1.." + std::to_string(plan.size()));
  };
  for (const auto& [step, _] : sc.qa_pairs) check_step(step, "qa_pairs");
  for (const auto& [step, _] : sc.fun_facts) check_step(step, "fun_facts");
  for (const auto& [resource, alts] : sc.substitutions)
    if (alts.empty()) fail(ErrorCode::ValidationError, "substitution list for '" + resource + "' is empty");
}

inline KnowledgeSidecar load_sidecar(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(text::read_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return sidecar_from_json(j);
}

/// Two-column TSV: resource <TAB> alternative. Blank lines and '#' comments are skipped.
inline std::map<std::string, std::vector<std::string>> parse_substitutions_tsv(std::string_view tsv) {
  std::map<std::string, std::vector<std::string>> db;
  std::size_t line_no = 0;
  for (auto& raw : text::split(tsv, '\n')) {
    ++line_no;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2)
      fail(ErrorCode::ParseError, "substitutions line " + std::to_string(line_no) + ": expected 2 columns");
    auto resource = text::to_lower(text::trim(cols[0]));
    std::string alt(text::trim(cols[1]));
    if (resource.empty() || alt.empty())
      fail(ErrorCode::ParseError, "substitutions line " + std::to_string(line_no) + ": empty column");
    auto& list = db[resource];
    if (std::find(list.begin(), list.end(), alt) == list.end()) list.push_back(std::move(alt));
  }
  return db;
}

inline std::map<std::string, std::vector<std::string>> load_substitutions_tsv(const std::filesystem::path& path) {
  return parse_substitutions_tsv(text::read_file(path));
}

/// Resources appearing in at most `threshold` plans (counted once per plan).
inline std::set<std::string> compute_rare_resources(std::span<const ProceduralPlan> plans,
                                                    int threshold = kRareResourceThreshold) {
  std::map<std::string, int> counts;
  for (const auto& p : plans)
    for (const auto& r : p.all_resources) ++counts[r];
  std::set<std::string> rare;
  for (const auto& [r, n] : counts)
    if (n <= threshold) rare.insert(r);
  return rare;
}

inline std::set<std::string> replaceable_candidates(const ProceduralPlan& plan, const KnowledgeSidecar& sidecar,
                                                    int step) {
  const auto& s = plan.step(step);
  std::set<std::string> out;
  for (const auto& r : s.resources)
    if (sidecar.substitutions.contains(r) && sidecar.rare_resources.contains(r)) out.insert(r);
  return out;
}

/// Dictionary keys occurring in `step_text` on word boundaries, case-insensitively.
/// Keys are tried longest first; overlapping keys ("basil pesto", "basil") are all reported.
inline std::set<std::string> extract_entities(std::string_view step_text,
                                              const std::map<std::string, std::string>& definitions) {
  const std::string hay = text::to_lower(step_text);
  std::vector<std::string> keys;
  for (const auto& [k, _] : definitions)
    if (!k.empty()) keys.push_back(text::to_lower(k));
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::set<std::string> found;
  for (const auto& key : keys) {
    for (auto pos = hay.find(key); pos != std::string::npos; pos = hay.find(key, pos + 1)) {
      const bool left_ok = pos == 0 || !text::is_word_byte(static_cast<unsigned char>(hay[pos - 1]));
      const std::size_t end = pos + key.size();
      const bool right_ok = end == hay.size() || !text::is_word_byte(static_cast<unsigned char>(hay[end]));
      if (left_ok && right_ok) {
        found.insert(key);
        break;
      }
    }
  }
  return found;
}

// ---------------------------------------------------------------------------
// Corpus: a directory of plan files plus per-plan sidecars.

struct PlanCorpus {
  std::vector<ProceduralPlan> plans;  // sorted by id
  std::map<std::string, KnowledgeSidecar> sidecars;
  std::vector<std::string> warnings;

  const ProceduralPlan& plan(std::string_view id) const {
    auto it = std::lower_bound(plans.begin(), plans.end(), id,
                               [](const ProceduralPlan& p, std::string_view v) { return p.id < v; });
    if (it == plans.end() || it->id != id) fail(ErrorCode::ValidationError, "unknown plan id " + std::string(id));
    return *it;
  }

  const KnowledgeSidecar& sidecar(std::string_view id) const {
    auto it = sidecars.find(std::string(id));
    if (it == sidecars.end()) fail(ErrorCode::ValidationError, "no sidecar for plan " + std::string(id));
    return it->second;
  }
};

/// Shares the substitution DB and corpus-wide rare-resource set across all sidecars
/// of `corpus`, then validates every sidecar against its plan.
inline void finalize_corpus(PlanCorpus& corpus, const std::map<std::string, std::vector<std::string>>& extra_subs,
                            int rare_threshold = kRareResourceThreshold) {
  std::sort(corpus.plans.begin(), corpus.plans.end(),
            [](const ProceduralPlan& a, const ProceduralPlan& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < corpus.plans.size(); ++i)
    if (corpus.plans[i].id == corpus.plans[i - 1].id)
      fail(ErrorCode::ValidationError, "duplicate plan id " + corpus.plans[i].id);

  std::map<std::string, std::vector<std::string>> db = extra_subs;
  for (const auto& [_, sc] : corpus.sidecars)
    for (const auto& [r, alts] : sc.substitutions)
      for (const auto& a : alts) {
        auto& list = db[r];
        if (std::find(list.begin(), list.end(), a) == list.end()) list.push_back(a);
      }
  const auto rare = compute_rare_resources(corpus.plans, rare_threshold);
  for (const auto& p : corpus.plans) {
    auto& sc = corpus.sidecars[p.id];
    sc.substitutions = db;
    sc.rare_resources = rare;
    validate_sidecar(sc, p);
  }
  std::set<std::string> ids;
  for (const auto& p : corpus.plans) ids.insert(p.id);
  std::erase_if(corpus.sidecars, [&](const auto& kv) { return !ids.contains(kv.first); });
}

inline PlanCorpus load_corpus(const std::filesystem::path& plans_dir, const std::filesystem::path& sidecars_dir = {},
                              const std::filesystem::path& substitutions_tsv = {},
                              int rare_threshold = kRareResourceThreshold) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(plans_dir)) fail(ErrorCode::IoError, "plans directory " + plans_dir.string() + " not found");
  PlanCorpus corpus;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(plans_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) corpus.plans.push_back(load_plan(f, &corpus.warnings));
  if (corpus.plans.empty()) fail(ErrorCode::ValidationError, "no plans found in " + plans_dir.string());

  if (!sidecars_dir.empty()) {
    if (!fs::is_directory(sidecars_dir))
      fail(ErrorCode::IoError, "sidecars directory " + sidecars_dir.string() + " not found");
    for (const auto& p : corpus.plans) {
      const auto f = sidecars_dir / (p.id + ".json");
      if (fs::exists(f)) corpus.sidecars[p.id] = load_sidecar(f);
    }
  }
  std::map<std::string, std::vector<std::string>> subs;
  if (!substitutions_tsv.empty()) subs = load_substitutions_tsv(substitutions_tsv);
  finalize_corpus(corpus, subs, rare_threshold);
  return corpus;
}

}  // namespace plandial
