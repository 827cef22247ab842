#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "golf/envs.hpp"
#include "golf/grpo.hpp"
#include "golf/policy.hpp"
#include "golf/types.hpp"

namespace golf::refine {

// The aggregated refinement prompt: the original prompt followed by ordered
// (failed attempt, critique) pairs, rendered as one token sequence
//   prompt | SEP | fail_1 | SEP | crit_1 | SEP | fail_2 | SEP | crit_2 | ...
struct RefinementContext {
  TokenSeq base_prompt;
  std::vector<std::pair<TokenSeq, CritiqueText>> entries;
  TokenSeq rendered;
};

struct InjectionDecision {
  bool triggered = false;
  std::optional<int> replaced_index;
  std::optional<TrajectoryRecord> injected;
};

/// Builds the refinement context for a feedback mode. mixed keeps up to cap
/// (failure, critique) entries; external keeps exactly one failure with its
/// full critique; intra keeps up to cap failures with critiques collapsed to
/// the failure marker; simple keeps one failure with the marker. When more
/// than cap failures exist, a seeded uniform subset is kept in original
/// order. Throws no_failures on an empty failure list and context_overflow
/// when the rendering exceeds max_context_len.
RefinementContext aggregate_refinement_context(
    const TokenSeq& prompt, std::span<const std::pair<TokenSeq, CritiqueText>> failures,
    envs::FeedbackMode mode, int cap, uint64_t seed, int max_context_len);

/// Samples and verifies a refinement group of n trajectories conditioned on
/// the rendered context. Behavior log-probabilities are recorded under that
/// context; group.prompt keeps the original instance prompt.
RolloutGroup sample_refinement_group(const policy::PolicyParams& params_old,
                                     const envs::TaskSpec& task, const envs::Instance& instance,
                                     const RefinementContext& ctx, int n, double temperature,
                                     uint64_t seed);

/// Members of a refinement group with reward 1.
std::vector<TrajectoryRecord> successful_refinements(const RolloutGroup& g_ref);

/// Injection trigger: strictly below the threshold.
bool should_inject(double mean_reward, double tau);

/// Uniformly picks one successful refinement and replaces one uniformly
/// chosen reward-0 member, flagging the copy as off-policy while keeping its
/// refinement-context behavior log-probabilities. Empty candidates leave the
/// group unchanged. Throws no_failure_slot if no reward-0 member exists.
std::pair<RolloutGroup, InjectionDecision> inject(const RolloutGroup& g_gen,
                                                  std::span<const TrajectoryRecord> s_ref,
                                                  uint64_t seed);

/// The always-inject ablation: takes the highest-reward refinement (first on
/// ties) instead of a uniform draw; the replacement slot is still uniform.
std::pair<RolloutGroup, InjectionDecision> inject_best(const RolloutGroup& g_gen,
                                                       std::span<const TrajectoryRecord> s_ref,
                                                       uint64_t seed);

/// Bounded monotone reshaping u / (u + lambda) of off-policy ratios.
double reshape_ratio(double u, double lambda);

/// Mixed on/off-policy objective over augmented groups. Advantages are
/// mean-only within each augmented group; on-policy tokens contribute the
/// clipped surrogate, off-policy tokens the reshaped unclipped ratio term
/// (unless clip_off_policy). With no off-policy members this is identical to
/// grpo_objective in dr_grpo mode, bitwise.
double mixed_objective(std::span<const RolloutGroup> groups, const policy::PolicyParams& current,
                       double epsilon, double lambda, bool clip_off_policy,
                       policy::GradAccumulator& acc);

// One prompt's training unit: the augmented generation group plus, when the
// failure set was nonempty, the refinement group. Advantages are computed
// separately per group; all items in a step share one token normalizer.
struct TrainingBatch {
  struct Item {
    RolloutGroup g_aug;
    std::optional<RolloutGroup> g_ref;
  };
  std::vector<Item> items;

  void append(TrainingBatch other);
};

/// Pairs an augmented group with its refinement group. Throws
/// prompt_mismatch when the groups come from different prompts.
TrainingBatch joint_batch(RolloutGroup g_aug, std::optional<RolloutGroup> g_ref);

/// Objective over a full training batch: mixed terms for augmented groups
/// (advantages mean-only), clipped surrogate for refinement groups
/// (advantages mean-only over the refinement group alone), one shared token
/// normalizer. gen_adv_mode selects the advantage normalization for the
/// generation groups so the plain grpo/dr_grpo baselines run through the
/// same code path.
double batch_objective(const TrainingBatch& batch, const policy::PolicyParams& current,
                       const grpo::SurrogateOptions& opts, grpo::AdvMode gen_adv_mode,
                       policy::GradAccumulator& acc, grpo::LossBreakdown* breakdown = nullptr);

}  // namespace golf::refine
