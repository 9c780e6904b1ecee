#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "plandial/assistant_policy.hpp"
#include "plandial/intent_graph.hpp"
#include "plandial/plan_model.hpp"
#include "plandial/synth_pipeline.hpp"
#include "plandial/user_simulator.hpp"

namespace plandial {

/// Input locations for synthesis. Defaults follow the layout of data/.
struct WorkspacePaths {
  std::filesystem::path plans = "data/plans";
  std::filesystem::path sidecars = "data/sidecars";
  std::filesystem::path substitutions = "data/substitutions.tsv";
  std::filesystem::path bank = "data/bank/utterances.tsv";
  std::filesystem::path templates = "data/templates/responses.json";
  std::filesystem::path requests = "data/templates/requests.json";
  std::filesystem::path logs = "data/logs/interactions.jsonl";
  std::filesystem::path graph;  // prebuilt graph; overrides logs when set

  static WorkspacePaths under(const std::filesystem::path& root) {
    WorkspacePaths p;
    for (auto* f : {&p.plans, &p.sidecars, &p.substitutions, &p.bank, &p.templates, &p.requests, &p.logs})
      *f = root / *f;
    return p;
  }
};

/// Everything synthesis reads, loaded and validated once. Owns the stub
/// ports unless a caller installs its own.
struct Workspace {
  PlanCorpus corpus;
  IntentGraph raw_graph;
  IntentGraph graph;  // reweighted
  UtteranceBank bank;
  ScrubReport scrub;
  RequestTemplateSet requests;
  ResponseTemplateSet responses;
  std::unique_ptr<GeneratorPort> chat_port = std::make_unique<StubGeneratorPort>();
  std::unique_ptr<GeneratorPort> safety_port = std::make_unique<StubGeneratorPort>();
  bool live_safety = false;

  SynthResources resources() const {
    return {&corpus, &graph, &bank, &requests, &responses, chat_port.get(), safety_port.get(), live_safety};
  }
};

inline std::unique_ptr<Workspace> load_workspace(const WorkspacePaths& paths, const WalkConfig& walk) {
  auto ws = std::make_unique<Workspace>();
  ws->corpus = load_corpus(paths.plans, paths.sidecars, paths.substitutions);
  ws->raw_graph = paths.graph.empty() ? build_from_logs(load_log(paths.logs)) : load_graph(paths.graph);
  ws->graph = reweight(ws->raw_graph, walk);
  ws->bank = load_bank(paths.bank, default_wake_words(), &ws->scrub);
  ws->requests = load_request_templates(paths.requests);
  ws->responses = load_response_templates(paths.templates);
  return ws;
}

}  // namespace plandial
