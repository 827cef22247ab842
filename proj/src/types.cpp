#include "golf/types.hpp"

namespace golf {

const char* errc_name(errc code) {
  switch (code) {
    case errc::empty_group: return "EmptyGroup";
    case errc::non_binary_reward: return "NonBinaryReward";
    case errc::bad_task_spec: return "BadTaskSpec";
    case errc::bad_token: return "BadToken";
    case errc::bad_shape: return "BadShape";
    case errc::non_finite_gradient: return "NonFiniteGradient";
    case errc::group_too_small: return "GroupTooSmall";
    case errc::missing_behavior: return "MissingBehavior";
    case errc::no_failures: return "NoFailures";
    case errc::context_overflow: return "ContextOverflow";
    case errc::no_failure_slot: return "NoFailureSlot";
    case errc::bad_provenance: return "BadProvenance";
    case errc::prompt_mismatch: return "PromptMismatch";
    case errc::empty_batch: return "EmptyBatch";
    case errc::bad_k: return "BadK";
    case errc::no_examples: return "NoExamples";
    case errc::bad_config: return "BadConfig";
    case errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

double group_mean_reward(const RolloutGroup& group) {
  if (group.members.empty()) throw error(errc::empty_group, "group_mean_reward on empty group");
  double sum = 0.0;
  for (const auto& m : group.members) sum += m.reward;
  return sum / static_cast<double>(group.members.size());
}

std::vector<std::pair<TokenSeq, CritiqueText>> failure_set(const RolloutGroup& group) {
  if (group.members.empty()) throw error(errc::empty_group, "failure_set on empty group");
  std::vector<std::pair<TokenSeq, CritiqueText>> failures;
  for (const auto& m : group.members) {
    if (m.reward != 0.0 && m.reward != 1.0)
      throw error(errc::non_binary_reward, "failure_set requires rewards in {0,1}");
    if (m.reward == 0.0) failures.emplace_back(m.response, m.critique);
  }
  return failures;
}

bool is_zero_reward_group(const RolloutGroup& group) {
  if (group.members.empty()) throw error(errc::empty_group, "is_zero_reward_group on empty group");
  for (const auto& m : group.members)
    if (m.reward != 0.0) return false;
  return true;
}

}  // namespace golf
