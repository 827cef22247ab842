#include "golf/grpo.hpp"

#include <algorithm>
#include <cmath>

namespace golf::grpo {

AdvantageSet group_advantages(std::span<const double> rewards, AdvMode mode) {
  if (rewards.size() < 2)
    throw error(errc::group_too_small, "group advantages need at least 2 rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;

  AdvantageSet out;
  out.mode = mode;
  out.values.resize(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) out.values[i] = rewards[i] - mean;

  if (mode == AdvMode::grpo) {
    double var = 0.0;
    for (double a : out.values) var += a * a;
    var /= n;  // population variance
    const double std_dev = std::sqrt(var);
    if (std_dev == 0.0) {
      std::fill(out.values.begin(), out.values.end(), 0.0);
    } else {
      for (double& a : out.values) a /= std_dev;
    }
  }
  return out;
}

double clip_term(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace detail {

size_t total_tokens(std::span<const RolloutGroup> groups) {
  size_t total = 0;
  for (const auto& g : groups)
    for (const auto& m : g.members) total += m.response.size();
  return total;
}

namespace {

void check_behavior(const TrajectoryRecord& traj) {
  if (traj.behavior_logprobs.size() != traj.response.size() || traj.response.empty())
    throw error(errc::missing_behavior, "trajectory lacks recorded behavior log-probabilities");
}

}  // namespace

void group_terms(const RolloutGroup& group, const policy::PolicyParams& current,
                 std::span<const double> adv, const SurrogateOptions& opts, double inv_z,
                 bool as_refinement, policy::GradAccumulator& acc, LossBreakdown& value) {
  std::vector<double> weights;
  for (size_t i = 0; i < group.members.size(); ++i) {
    const TrajectoryRecord& traj = group.members[i];
    check_behavior(traj);
    const double a = adv[i];

    if (traj.origin == Origin::on_policy) {
      const TokenSeq& ctx = traj.context->tokens;
      const std::vector<double> lps = policy::logprobs(current, ctx, traj.response);
      weights.assign(lps.size(), 0.0);
      double sum = 0.0;
      for (size_t t = 0; t < lps.size(); ++t) {
        const double ratio = std::exp(lps[t] - traj.behavior_logprobs[t]);
        sum += clip_term(ratio, a, opts.epsilon);
        // gradient flows only while the unclipped branch is active
        const double clipped = std::clamp(ratio, 1.0 - opts.epsilon, 1.0 + opts.epsilon);
        if (ratio * a <= clipped * a) weights[t] = a * ratio * inv_z;
      }
      (as_refinement ? value.ref : value.on) += sum;
      policy::accumulate_weighted_logprob_grad(current, ctx, traj.response, weights, acc);
    } else {
      if (!traj.context || traj.context->kind != ContextKind::refinement)
        throw error(errc::bad_provenance,
                    "injected trajectory must carry a refinement sampling context");
      // numerator under the original prompt, denominator under the
      // refinement context the behavior policy actually sampled from
      const std::vector<double> lps = policy::logprobs(current, group.prompt, traj.response);
      weights.assign(lps.size(), 0.0);
      double sum = 0.0;
      value.saw_off_policy = true;
      for (size_t t = 0; t < lps.size(); ++t) {
        const double ratio = std::exp(lps[t] - traj.behavior_logprobs[t]);
        value.off_ratio_min = std::min(value.off_ratio_min, ratio);
        value.off_ratio_max = std::max(value.off_ratio_max, ratio);
        const double shaped = ratio / (ratio + opts.lambda);
        // d shaped / d ratio = lambda / (ratio + lambda)^2
        const double dshaped = opts.lambda / ((ratio + opts.lambda) * (ratio + opts.lambda));
        if (opts.clip_off_policy) {
          sum += clip_term(shaped, a, opts.epsilon);
          const double clipped = std::clamp(shaped, 1.0 - opts.epsilon, 1.0 + opts.epsilon);
          if (shaped * a <= clipped * a) weights[t] = a * dshaped * ratio * inv_z;
        } else {
          sum += shaped * a;
          weights[t] = a * dshaped * ratio * inv_z;
        }
      }
      value.off += sum;
      policy::accumulate_weighted_logprob_grad(current, group.prompt, traj.response, weights, acc);
    }
  }
}

}  // namespace detail

double grpo_objective(std::span<const RolloutGroup> groups, const policy::PolicyParams& current,
                      double epsilon, AdvMode mode, policy::GradAccumulator& acc) {
  if (groups.empty()) throw error(errc::empty_batch, "objective over an empty batch");
  const size_t z = detail::total_tokens(groups);
  const double inv_z = 1.0 / static_cast<double>(z);

  SurrogateOptions opts;
  opts.epsilon = epsilon;
  LossBreakdown value;
  std::vector<double> rewards;
  for (const auto& g : groups) {
    rewards.clear();
    for (const auto& m : g.members) rewards.push_back(m.reward);
    const AdvantageSet adv = group_advantages(rewards, mode);
    detail::group_terms(g, current, adv.values, opts, inv_z, false, acc, value);
  }
  return (value.on + value.off + value.ref) * inv_z;
}

}  // namespace golf::grpo
