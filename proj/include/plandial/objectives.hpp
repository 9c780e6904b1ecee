#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plandial/errors.hpp"
#include "plandial/intent.hpp"
#include "plandial/rng.hpp"

namespace plandial {

using Response = std::vector<int>;  // token ids in [0, V)

/// Finite-vocabulary policy: one logit vector per context.
struct ToyPolicy {
  std::vector<std::vector<double>> logits;

  std::size_t contexts() const { return logits.size(); }
  std::size_t vocab() const { return logits.empty() ? 0 : logits.front().size(); }

  static ToyPolicy uniform(std::size_t n_contexts, std::size_t vocab) {
    return {std::vector<std::vector<double>>(n_contexts, std::vector<double>(vocab, 0.0))};
  }

  static ToyPolicy random(std::size_t n_contexts, std::size_t vocab, SplitMix64& rng, double scale = 2.0) {
    ToyPolicy p = uniform(n_contexts, vocab);
    for (auto& row : p.logits)
      for (auto& z : row) z = scale * (2.0 * rng.uniform() - 1.0);
    return p;
  }

  const std::vector<double>& row(std::size_t context) const {
    if (context >= logits.size()) fail(ErrorCode::ValidationError, "context id " + std::to_string(context) + " out of range");
    return logits[context];
  }

  std::vector<double> log_softmax(std::size_t context) const {
    const auto& z = row(context);
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
    return out;
  }

  std::vector<double> probs(std::size_t context) const {
    auto lp = log_softmax(context);
    for (auto& v : lp) v = std::exp(v);
    return lp;
  }

  double log_prob(std::size_t context, const Response& r) const {
    const auto lp = log_softmax(context);
    double s = 0.0;
    for (int tok : r) {
      if (tok < 0 || static_cast<std::size_t>(tok) >= lp.size())
        fail(ErrorCode::UnknownResponseToken, "token " + std::to_string(tok) + " outside the vocabulary");
      s += lp[static_cast<std::size_t>(tok)];
    }
    return s;
  }
};

inline void validate_policy(const ToyPolicy& p) {
  if (p.logits.empty()) fail(ErrorCode::ValidationError, "policy has no contexts");
  const auto v = p.vocab();
  if (v == 0) fail(ErrorCode::ValidationError, "empty vocabulary");
  for (std::size_t c = 0; c < p.contexts(); ++c) {
    if (p.logits[c].size() != v) fail(ErrorCode::ValidationError, "ragged logit table");
    double s = 0.0;
    for (double q : p.probs(c)) s += q;
    if (std::abs(s - 1.0) > 1e-9) fail(ErrorCode::InvariantViolation, "softmax does not normalize");
  }
}

struct TrainingConfig {
  double beta = 0.4;
  double lambda_sft = 0.1;

  void validate() const {
    if (!(beta > 0)) fail(ErrorCode::ValidationError, "beta must be > 0");
    if (!(lambda_sft >= 0)) fail(ErrorCode::ValidationError, "lambda_sft must be >= 0");
  }
};

struct LossReport {
  double total = 0.0;
  std::map<ResponseCategory, double> per_category;
};

struct SftItem {
  std::size_t context = 0;
  Response gold;
  ResponseCategory category = ResponseCategory::Nav;
};

struct PreferenceItem {
  std::size_t context = 0;
  Response chosen;
  Response rejected;
};

/// One DPO-x training turn: a preference pair plus the gold response that
/// carries the SFT term (usually the chosen one).
struct MixedItem {
  PreferenceItem pair;
  Response gold;
  ResponseCategory category = ResponseCategory::Nav;
};

/// log(1 + e^x) without overflow.
inline double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// − Σ log p(gold | x), split by response category.
inline LossReport sft_loss(const ToyPolicy& policy, std::span<const SftItem> batch) {
  LossReport r;
  for (const auto& it : batch) {
    const double l = -policy.log_prob(it.context, it.gold);
    r.per_category[it.category] += l;
  }
  for (const auto& [_, v] : r.per_category) r.total += v;
  return r;
}

inline double dpo_margin(const ToyPolicy& policy, const ToyPolicy& reference, const PreferenceItem& p, double beta) {
  const double dw = policy.log_prob(p.context, p.chosen) - reference.log_prob(p.context, p.chosen);
  const double dl = policy.log_prob(p.context, p.rejected) - reference.log_prob(p.context, p.rejected);
  return beta * (dw - dl);
}

/// −log σ(margin) = softplus(−margin).
inline double dpo_loss_from_margin(double margin) noexcept { return softplus(-margin); }

inline double dpo_loss(const ToyPolicy& policy, const ToyPolicy& reference, const PreferenceItem& p, double beta) {
  if (p.chosen == p.rejected) fail(ErrorCode::ValidationError, "chosen and rejected responses are identical");
  return dpo_loss_from_margin(dpo_margin(policy, reference, p, beta));
}

struct MixedLoss {
  double dpo = 0.0;
  double sft = 0.0;
  double total = 0.0;  // dpo + lambda * sft
  ResponseCategory category = ResponseCategory::Nav;
};

inline MixedLoss dpo_x_loss(const ToyPolicy& policy, const ToyPolicy& reference, const MixedItem& item,
                            const TrainingConfig& cfg) {
  cfg.validate();
  MixedLoss m;
  m.dpo = dpo_loss(policy, reference, item.pair, cfg.beta);
  m.sft = -policy.log_prob(item.pair.context, item.gold);
  m.total = m.dpo + cfg.lambda_sft * m.sft;
  m.category = item.category;
  return m;
}

inline LossReport dpo_x_loss(const ToyPolicy& policy, const ToyPolicy& reference, std::span<const MixedItem> batch,
                             const TrainingConfig& cfg) {
  LossReport r;
  for (const auto& it : batch) r.per_category[it.category] += dpo_x_loss(policy, reference, it, cfg).total;
  for (const auto& [_, v] : r.per_category) r.total += v;
  return r;
}

// ---------------------------------------------------------------------------
// Analytic gradients with respect to the policy logits. The gradient has the
// shape of ToyPolicy::logits.

using LogitGrad = std::vector<std::vector<double>>;

enum class LossKind { Sft, Dpo, DpoX };

constexpr std::string_view to_string(LossKind k) noexcept {
  switch (k) {
    case LossKind::Sft: return "sft";
    case LossKind::Dpo: return "dpo";
    case LossKind::DpoX: return "dpo_x";
  }
  return "?";
}

namespace detail {

inline LogitGrad zeros_like(const ToyPolicy& p) {
  LogitGrad g(p.contexts());
  for (std::size_t c = 0; c < p.contexts(); ++c) g[c].assign(p.logits[c].size(), 0.0);
  return g;
}

/// d/dz log p(r | x) = counts(r) − |r| softmax(z), accumulated with `scale`.
inline void add_log_prob_grad(std::vector<double>& g, const std::vector<double>& probs, const Response& r,
                              double scale) {
  for (int tok : r) g[static_cast<std::size_t>(tok)] += scale;
  const double n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= scale * n * probs[i];
}

inline void add_dpo_grad(LogitGrad& g, const ToyPolicy& policy, const ToyPolicy& reference, const PreferenceItem& p,
                         double beta, double scale) {
  const double m = dpo_margin(policy, reference, p, beta);
  const double coef = -sigmoid(-m) * beta * scale;
  const auto probs = policy.probs(p.context);
  add_log_prob_grad(g[p.context], probs, p.chosen, coef);
  add_log_prob_grad(g[p.context], probs, p.rejected, -coef);
}

}  // namespace detail

inline LogitGrad grad_sft(const ToyPolicy& policy, std::span<const SftItem> batch) {
  auto g = detail::zeros_like(policy);
  for (const auto& it : batch) {
    policy.log_prob(it.context, it.gold);  // vocabulary check
    detail::add_log_prob_grad(g[it.context], policy.probs(it.context), it.gold, -1.0);
  }
  return g;
}

inline LogitGrad grad_dpo(const ToyPolicy& policy, const ToyPolicy& reference, std::span<const PreferenceItem> batch,
                          double beta) {
  auto g = detail::zeros_like(policy);
  for (const auto& p : batch) {
    dpo_loss(policy, reference, p, beta);  // input checks
    detail::add_dpo_grad(g, policy, reference, p, beta, 1.0);
  }
  return g;
}

inline LogitGrad grad_dpo_x(const ToyPolicy& policy, const ToyPolicy& reference, std::span<const MixedItem> batch,
                            const TrainingConfig& cfg) {
  cfg.validate();
  auto g = detail::zeros_like(policy);
  for (const auto& it : batch) {
    dpo_loss(policy, reference, it.pair, cfg.beta);
    detail::add_dpo_grad(g, policy, reference, it.pair, cfg.beta, 1.0);
    detail::add_log_prob_grad(g[it.pair.context], policy.probs(it.pair.context), it.gold, -cfg.lambda_sft);
  }
  return g;
}

}  // namespace plandial
