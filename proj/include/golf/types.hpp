#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "golf/error.hpp"

namespace golf {

using TokenId = int32_t;
using TokenSeq = std::vector<TokenId>;

enum class Origin { on_policy, off_policy_injected };
enum class GroupKind { generation, refinement };
enum class ContextKind { prompt, refinement };
enum class CritiqueKind { simple, indicative_ground_truth, constraint_report };

struct CritiqueText {
  CritiqueKind kind = CritiqueKind::simple;
  TokenSeq tokens;
};

// The exact token sequence a trajectory was conditioned on at sampling time.
// Shared by all members of a rollout group; immutable after construction.
struct SamplingContext {
  ContextKind kind = ContextKind::prompt;
  TokenSeq tokens;
};
using ContextRef = std::shared_ptr<const SamplingContext>;

inline ContextRef make_context(ContextKind kind, TokenSeq tokens) {
  return std::make_shared<SamplingContext>(SamplingContext{kind, std::move(tokens)});
}

// One sampled response with everything needed to rescore it later: the
// conditioning context, the per-token log-probabilities recorded under the
// behavior policy, the verifier verdict, and whether it was injected from a
// refinement rollout.
struct TrajectoryRecord {
  ContextRef context;
  TokenSeq response;
  std::vector<double> behavior_logprobs;  // nats, each <= 0, one per token
  double reward = 0.0;                    // binary {0,1} in all v1 environments
  CritiqueText critique;
  Origin origin = Origin::on_policy;
};

// N trajectories sampled for one prompt. Injection replaces a member in
// place, so the size is invariant; provenance lives in the origin flag.
struct RolloutGroup {
  TokenSeq prompt;
  std::vector<TrajectoryRecord> members;
  GroupKind kind = GroupKind::generation;
};

/// Arithmetic mean of member rewards. Throws empty_group on an empty group.
double group_mean_reward(const RolloutGroup& group);

/// Members with reward 0, in sampling order, each paired with its critique.
/// Requires binary rewards; throws non_binary_reward otherwise.
std::vector<std::pair<TokenSeq, CritiqueText>> failure_set(const RolloutGroup& group);

/// True iff every member reward is 0.
bool is_zero_reward_group(const RolloutGroup& group);

}  // namespace golf
