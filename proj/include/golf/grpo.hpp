#pragma once

#include <limits>
#include <span>
#include <vector>

#include "golf/policy.hpp"
#include "golf/types.hpp"

namespace golf::grpo {

enum class AdvMode { grpo, dr_grpo };

// Per-member advantages aligned with a rollout group; they always sum to 0.
struct AdvantageSet {
  std::vector<double> values;
  AdvMode mode = AdvMode::dr_grpo;
};

/// Group-relative advantages. dr_grpo subtracts the group mean; grpo
/// additionally divides by the population standard deviation, falling back to
/// all-zero advantages when the std is 0. Throws group_too_small for fewer
/// than 2 rewards.
AdvantageSet group_advantages(std::span<const double> rewards, AdvMode mode);

/// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)
double clip_term(double ratio, double advantage, double epsilon);

struct SurrogateOptions {
  double epsilon = 0.2;
  double lambda = 0.1;           // off-policy ratio reshaping u / (u + lambda)
  bool clip_off_policy = false;  // clip around the reshaped off-policy ratio
};

struct LossBreakdown {
  double on = 0.0;   // on-policy generation contribution
  double off = 0.0;  // injected off-policy contribution (or the sft loss)
  double ref = 0.0;  // refinement-group contribution
  // raw off-policy ratio range seen this step, for support-mismatch diagnosis
  double off_ratio_min = std::numeric_limits<double>::infinity();
  double off_ratio_max = -std::numeric_limits<double>::infinity();
  bool saw_off_policy = false;
};

/// Token-level clipped surrogate over a batch of on-policy groups, summed
/// over tokens and normalized by the total token count across the batch (no
/// per-sequence length normalization). Advantages and behavior
/// log-probabilities are constants; gradients accumulate into acc. At
/// current == behavior the gradient is the plain group-relative policy
/// gradient. Throws missing_behavior when a trajectory lacks recorded
/// behavior log-probabilities.
double grpo_objective(std::span<const RolloutGroup> groups, const policy::PolicyParams& current,
                      double epsilon, AdvMode mode, policy::GradAccumulator& acc);

namespace detail {

// Shared token loop used by every objective in this repo. Adds one group's
// surrogate terms at advantage values adv, scaled by inv_z, to the value
// breakdown and the gradient accumulator. On-policy members contribute
// clip_term over the ratio of current to behavior probabilities under the
// member's own sampling context. Off-policy members contribute the reshaped
// ratio term: the numerator conditions the current policy on the group
// prompt, the denominator is the recorded behavior probability under the
// refinement context, and the clip is omitted unless opts.clip_off_policy.
void group_terms(const RolloutGroup& group, const policy::PolicyParams& current,
                 std::span<const double> adv, const SurrogateOptions& opts, double inv_z,
                 bool as_refinement, policy::GradAccumulator& acc, LossBreakdown& value);

size_t total_tokens(std::span<const RolloutGroup> groups);

}  // namespace detail

}  // namespace golf::grpo
