#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "plandial/objectives.hpp"
#include "plandial/rng.hpp"

namespace plandial {

/// Random toy problem: policy, reference and one batch of each loss input.
struct GradInstance {
  ToyPolicy policy;
  ToyPolicy reference;
  std::vector<SftItem> sft;
  std::vector<PreferenceItem> prefs;
  std::vector<MixedItem> mixed;
};

inline Response random_response(std::size_t vocab, std::size_t max_len, SplitMix64& rng) {
  Response r(1 + rng.below(max_len));
  for (auto& t : r) t = static_cast<int>(rng.below(vocab));
  return r;
}

inline GradInstance random_instance(SplitMix64& rng, std::size_t contexts = 3, std::size_t vocab = 8,
                                    std::size_t max_len = 4, std::size_t batch = 3) {
  GradInstance g;
  g.policy = ToyPolicy::random(contexts, vocab, rng);
  g.reference = ToyPolicy::random(contexts, vocab, rng);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto cat = kCategories[rng.below(kCategories.size())];
    const std::size_t ctx = rng.below(contexts);
    g.sft.push_back({ctx, random_response(vocab, max_len, rng), cat});
    PreferenceItem p{ctx, random_response(vocab, max_len, rng), random_response(vocab, max_len, rng)};
    while (p.rejected == p.chosen) p.rejected = random_response(vocab, max_len, rng);
    g.prefs.push_back(p);
    g.mixed.push_back({p, p.chosen, cat});
  }
  return g;
}

/// Relative error with a floor on the denominator so components that are
/// analytically zero are compared on an absolute scale.
inline double grad_rel_error(double analytic, double numeric, double floor = 1e-4) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t components = 0;
};

/// Central differences of `loss` around `policy`, compared with `analytic`.
inline GradCheckResult check_gradient(const ToyPolicy& policy, const LogitGrad& analytic,
                                      const std::function<double(const ToyPolicy&)>& loss, double h = 1e-5) {
  GradCheckResult r;
  ToyPolicy p = policy;
  for (std::size_t c = 0; c < p.contexts(); ++c) {
    for (std::size_t i = 0; i < p.logits[c].size(); ++i) {
      const double z = p.logits[c][i];
      p.logits[c][i] = z + h;
      const double up = loss(p);
      p.logits[c][i] = z - h;
      const double down = loss(p);
      p.logits[c][i] = z;
      const double numeric = (up - down) / (2.0 * h);
      r.max_rel_error = std::max(r.max_rel_error, grad_rel_error(analytic[c][i], numeric));
      ++r.components;
    }
  }
  return r;
}

inline GradCheckResult check_instance(const GradInstance& g, LossKind kind, const TrainingConfig& cfg) {
  switch (kind) {
    case LossKind::Sft:
      return check_gradient(g.policy, grad_sft(g.policy, g.sft),
                            [&](const ToyPolicy& p) { return sft_loss(p, g.sft).total; });
    case LossKind::Dpo:
      return check_gradient(g.policy, grad_dpo(g.policy, g.reference, g.prefs, cfg.beta), [&](const ToyPolicy& p) {
        double s = 0.0;
        for (const auto& x : g.prefs) s += dpo_loss(p, g.reference, x, cfg.beta);
        return s;
      });
    case LossKind::DpoX:
      return check_gradient(g.policy, grad_dpo_x(g.policy, g.reference, g.mixed, cfg),
                            [&](const ToyPolicy& p) { return dpo_x_loss(p, g.reference, g.mixed, cfg).total; });
  }
  return {};
}

}  // namespace plandial
