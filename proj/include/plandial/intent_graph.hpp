#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plandial/errors.hpp"
#include "plandial/intent.hpp"
#include "plandial/rng.hpp"
#include "plandial/text.hpp"

namespace plandial {

/// One annotated user-system session.
struct Interaction {
  std::string session;
  std::vector<Intent> intents;
};

/// First-order transition graph over user intents, with Start/End endpoints.
/// Successor lists are kept in Intent enum order so sampling is reproducible.
struct IntentGraph {
  std::map<Intent, std::vector<std::pair<Intent, double>>> trans;

  bool has_node(Intent i) const { return trans.contains(i); }

  std::set<Intent> nodes() const {
    std::set<Intent> out;
    for (const auto& [src, succ] : trans) {
      out.insert(src);
      for (const auto& [dst, _] : succ) out.insert(dst);
    }
    return out;
  }

  const std::vector<std::pair<Intent, double>>& successors(Intent i) const {
    static const std::vector<std::pair<Intent, double>> none;
    auto it = trans.find(i);
    return it == trans.end() ? none : it->second;
  }

  double prob(Intent from, Intent to) const {
    for (const auto& [dst, p] : successors(from))
      if (dst == to) return p;
    return 0.0;
  }
};

inline void validate_graph(const IntentGraph& g, double tol = 1e-9) {
  if (!g.has_node(Intent::Start)) fail(ErrorCode::ValidationError, "graph has no Start node");
  if (!g.successors(Intent::End).empty()) fail(ErrorCode::ValidationError, "End must not have successors");
  for (Intent n : g.nodes()) {
    if (n == Intent::End) continue;
    const auto& succ = g.successors(n);
    if (succ.empty())
      fail(ErrorCode::ValidationError, "node " + std::string(to_string(n)) + " has no successors");
    double sum = 0.0;
    for (const auto& [dst, p] : succ) {
      if (!(p >= 0.0)) fail(ErrorCode::ValidationError, "negative transition probability");
      if (dst == Intent::Start) fail(ErrorCode::ValidationError, "Start cannot be a successor");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      fail(ErrorCode::ValidationError, "outgoing mass of " + std::string(to_string(n)) + " sums to " +
                                           std::to_string(sum));
  }
}

// ---------------------------------------------------------------------------
// Log ingestion

inline std::vector<Interaction> parse_log_jsonl(std::string_view jsonl) {
  std::vector<Interaction> log;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(jsonl, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "log line " + std::to_string(line_no) + ": " + e.what());
    }
    Interaction it;
    try {
      it.session = j.value("session", std::string{});
      for (const auto& label : j.at("intents")) it.intents.push_back(parse_intent(label.get<std::string>()));
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "log line " + std::to_string(line_no) + ": " + e.what());
    }
    log.push_back(std::move(it));
  }
  return log;
}

inline std::vector<Interaction> load_log(const std::filesystem::path& path) {
  return parse_log_jsonl(text::read_file(path));
}

inline IntentGraph build_from_logs(std::span<const Interaction> log) {
  if (log.empty()) fail(ErrorCode::EmptyLog, "interaction log is empty");
  std::map<Intent, std::map<Intent, std::uint64_t>> counts;
  for (const auto& it : log) {
    if (it.intents.empty()) fail(ErrorCode::ParseError, "interaction '" + it.session + "' has no intents");
    Intent prev = Intent::Start;
    for (Intent i : it.intents) {
      if (!is_user_intent(i))
        fail(ErrorCode::UnknownIntentLabel, "synthetic label " + std::string(to_string(i)) + " in log");
      ++counts[prev][i];
      prev = i;
    }
    ++counts[prev][Intent::End];
  }
  IntentGraph g;
  for (const auto& [src, row] : counts) {
    std::uint64_t total = 0;
    for (const auto& [_, c] : row) total += c;
    auto& succ = g.trans[src];
    for (const auto& [dst, c] : row) succ.emplace_back(dst, static_cast<double>(c) / static_cast<double>(total));
  }
  g.trans[Intent::End];
  return g;
}

// ---------------------------------------------------------------------------
// Reweighting and sampling

inline const std::set<Intent>& default_boosted_intents() {
  static const std::set<Intent> boosted = {Intent::Question, Intent::GetFunFact, Intent::DefinitionQuestion,
                                           Intent::Replacement, Intent::Fallback, Intent::ChitChat};
  return boosted;
}

struct WalkConfig {
  int max_turns = 20;
  double boost_factor = 2.0;
  std::set<Intent> boosted = default_boosted_intents();
  std::uint64_t seed = 0;

  void validate() const {
    if (max_turns < 1) fail(ErrorCode::ValidationError, "max_turns must be >= 1");
    if (!(boost_factor > 0.0)) fail(ErrorCode::ValidationError, "boost_factor must be > 0");
  }
};

/// Multiplies the mass of boosted successors by `boost_factor` and renormalizes
/// each row. Zero-probability edges stay zero, so the support is unchanged.
inline IntentGraph reweight(const IntentGraph& g, const WalkConfig& cfg) {
  cfg.validate();
  IntentGraph out = g;
  for (auto& [src, succ] : out.trans) {
    double total = 0.0;
    bool touched = false;
    for (auto& [dst, p] : succ) {
      if (cfg.boosted.contains(dst) && p > 0.0 && cfg.boost_factor != 1.0) {
        p *= cfg.boost_factor;
        touched = true;
      }
      total += p;
    }
    if (!touched) continue;
    for (auto& [_, p] : succ) p /= total;
  }
  return out;
}

inline Intent next_intent(const IntentGraph& g, Intent from, SplitMix64& rng) {
  const auto& succ = g.successors(from);
  if (succ.empty()) return Intent::End;
  std::vector<double> w;
  w.reserve(succ.size());
  for (const auto& [_, p] : succ) w.push_back(p);
  return succ[rng.weighted(w)].first;
}

constexpr bool ends_walk(Intent i) noexcept {
  return i == Intent::CompleteTask || i == Intent::NewTask || i == Intent::End;
}

inline std::vector<Intent> sample_walk(const IntentGraph& g, const WalkConfig& cfg, SplitMix64& rng) {
  cfg.validate();
  std::vector<Intent> walk;
  Intent cur = next_intent(g, Intent::Start, rng);
  while (cur != Intent::End && static_cast<int>(walk.size()) < cfg.max_turns) {
    walk.push_back(cur);
    if (ends_walk(cur)) break;
    cur = next_intent(g, cur, rng);
  }
  return walk;
}

inline std::vector<Intent> sample_walk(const IntentGraph& g, const WalkConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  return sample_walk(g, cfg, rng);
}

// ---------------------------------------------------------------------------
// Export

inline Json graph_to_json(const IntentGraph& g) {
  Json nodes = Json::array();
  for (Intent n : g.nodes()) nodes.push_back(std::string(to_string(n)));
  Json trans = Json::object();
  for (const auto& [src, succ] : g.trans) {
    Json row = Json::object();
    for (const auto& [dst, p] : succ) row[std::string(to_string(dst))] = p;
    trans[std::string(to_string(src))] = row;
  }
  return {{"nodes", nodes}, {"transitions", trans}};
}

inline IntentGraph graph_from_json(const Json& j) {
  IntentGraph g;
  try {
    for (const auto& [src, row] : j.at("transitions").items()) {
      auto& succ = g.trans[parse_intent(src)];
      for (const auto& [dst, p] : row.items()) succ.emplace_back(parse_intent(dst), p.get<double>());
      std::sort(succ.begin(), succ.end());
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("graph: ") + e.what());
  }
  g.trans[Intent::End];
  validate_graph(g);
  return g;
}

inline IntentGraph load_graph(const std::filesystem::path& path) {
  try {
    return graph_from_json(Json::parse(text::read_file(path)));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace plandial
