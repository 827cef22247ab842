#include "golf/golf.hpp"

#include <algorithm>
#include <cmath>

#include "golf/rng.hpp"

namespace golf::refine {

namespace {

// Seeded uniform subset of size cap, original order preserved.
std::vector<size_t> pick_subset(size_t total, size_t cap, rng::Engine& engine) {
  std::vector<size_t> indices(total);
  for (size_t i = 0; i < total; ++i) indices[i] = i;
  if (total <= cap) return indices;
  // partial Fisher-Yates, then restore order
  for (size_t i = 0; i < cap; ++i) {
    size_t j = i + engine.uniform_int(total - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(cap);
  std::sort(indices.begin(), indices.end());
  return indices;
}

TokenSeq strip_trailing_eos(const TokenSeq& seq) {
  TokenSeq out = seq;
  while (!out.empty() && out.back() == envs::vocab::eos) out.pop_back();
  return out;
}

}  // namespace

RefinementContext aggregate_refinement_context(
    const TokenSeq& prompt, std::span<const std::pair<TokenSeq, CritiqueText>> failures,
    envs::FeedbackMode mode, int cap, uint64_t seed, int max_context_len) {
  if (failures.empty())
    throw error(errc::no_failures, "cannot aggregate an empty failure set");
  if (cap < 1) throw error(errc::bad_shape, "entry cap must be >= 1");

  rng::Engine engine(seed);
  std::vector<size_t> selected;
  switch (mode) {
    case envs::FeedbackMode::mixed:
    case envs::FeedbackMode::intra:
      selected = pick_subset(failures.size(), static_cast<size_t>(cap), engine);
      break;
    case envs::FeedbackMode::external:
    case envs::FeedbackMode::simple:
      selected = {engine.uniform_int(failures.size())};
      break;
  }

  RefinementContext ctx;
  ctx.base_prompt = prompt;
  ctx.rendered = prompt;
  for (size_t idx : selected) {
    const auto& [response, critique] = failures[idx];
    envs::Verdict verdict{0.0, critique};
    CritiqueText shown = envs::critique_for_mode(verdict, mode);
    TokenSeq attempt = strip_trailing_eos(response);
    ctx.entries.emplace_back(attempt, shown);
    ctx.rendered.push_back(envs::vocab::sep);
    ctx.rendered.insert(ctx.rendered.end(), attempt.begin(), attempt.end());
    ctx.rendered.push_back(envs::vocab::sep);
    ctx.rendered.insert(ctx.rendered.end(), shown.tokens.begin(), shown.tokens.end());
  }
  if (ctx.rendered.size() > static_cast<size_t>(max_context_len))
    throw error(errc::context_overflow, "rendered refinement context exceeds max_context_len");
  return ctx;
}

RolloutGroup sample_refinement_group(const policy::PolicyParams& params_old,
                                     const envs::TaskSpec& task, const envs::Instance& instance,
                                     const RefinementContext& ctx, int n, double temperature,
                                     uint64_t seed) {
  RolloutGroup group;
  group.prompt = instance.prompt;
  group.kind = GroupKind::refinement;
  ContextRef context = make_context(ContextKind::refinement, ctx.rendered);
  for (int i = 0; i < n; ++i) {
    auto sampled = policy::sample(params_old, ctx.rendered, task.max_response_len, temperature,
                                  rng::mix(seed, static_cast<uint64_t>(i)), envs::vocab::eos);
    envs::Verdict verdict =
        envs::verify(task, instance.prompt, instance.hidden_target, sampled.response);
    group.members.push_back(TrajectoryRecord{context, std::move(sampled.response),
                                             std::move(sampled.logprobs), verdict.reward,
                                             verdict.critique, Origin::on_policy});
  }
  return group;
}

std::vector<TrajectoryRecord> successful_refinements(const RolloutGroup& g_ref) {
  std::vector<TrajectoryRecord> out;
  for (const auto& m : g_ref.members)
    if (m.reward == 1.0) out.push_back(m);
  return out;
}

bool should_inject(double mean_reward, double tau) { return mean_reward < tau; }

namespace {

std::pair<RolloutGroup, InjectionDecision> inject_impl(const RolloutGroup& g_gen,
                                                       std::span<const TrajectoryRecord> s_ref,
                                                       uint64_t seed, bool pick_best) {
  if (s_ref.empty()) return {g_gen, InjectionDecision{}};

  rng::Engine engine(seed);
  size_t pick = 0;
  if (pick_best) {
    for (size_t i = 1; i < s_ref.size(); ++i)
      if (s_ref[i].reward > s_ref[pick].reward) pick = i;
  } else {
    pick = engine.uniform_int(s_ref.size());
  }

  std::vector<size_t> slots;
  for (size_t i = 0; i < g_gen.members.size(); ++i)
    if (g_gen.members[i].reward == 0.0) slots.push_back(i);
  if (slots.empty())
    throw error(errc::no_failure_slot, "no reward-0 member available for replacement");
  const size_t slot = slots[engine.uniform_int(slots.size())];

  RolloutGroup g_aug = g_gen;
  TrajectoryRecord injected = s_ref[pick];
  injected.origin = Origin::off_policy_injected;
  g_aug.members[slot] = injected;

  InjectionDecision decision;
  decision.triggered = true;
  decision.replaced_index = static_cast<int>(slot);
  decision.injected = std::move(injected);
  return {std::move(g_aug), std::move(decision)};
}

}  // namespace

std::pair<RolloutGroup, InjectionDecision> inject(const RolloutGroup& g_gen,
                                                  std::span<const TrajectoryRecord> s_ref,
                                                  uint64_t seed) {
  return inject_impl(g_gen, s_ref, seed, false);
}

std::pair<RolloutGroup, InjectionDecision> inject_best(const RolloutGroup& g_gen,
                                                       std::span<const TrajectoryRecord> s_ref,
                                                       uint64_t seed) {
  return inject_impl(g_gen, s_ref, seed, true);
}

double reshape_ratio(double u, double lambda) {
  if (u < 0.0) throw error(errc::bad_shape, "ratio must be nonnegative");
  if (!(lambda > 0.0)) throw error(errc::bad_shape, "lambda must be positive");
  return u / (u + lambda);
}

double mixed_objective(std::span<const RolloutGroup> groups, const policy::PolicyParams& current,
                       double epsilon, double lambda, bool clip_off_policy,
                       policy::GradAccumulator& acc) {
  if (groups.empty()) throw error(errc::empty_batch, "objective over an empty batch");
  const size_t z = grpo::detail::total_tokens(groups);
  const double inv_z = 1.0 / static_cast<double>(z);

  grpo::SurrogateOptions opts;
  opts.epsilon = epsilon;
  opts.lambda = lambda;
  opts.clip_off_policy = clip_off_policy;

  grpo::LossBreakdown value;
  std::vector<double> rewards;
  for (const auto& g : groups) {
    rewards.clear();
    for (const auto& m : g.members) rewards.push_back(m.reward);
    const grpo::AdvantageSet adv = grpo::group_advantages(rewards, grpo::AdvMode::dr_grpo);
    grpo::detail::group_terms(g, current, adv.values, opts, inv_z, false, acc, value);
  }
  return (value.on + value.off + value.ref) * inv_z;
}

void TrainingBatch::append(TrainingBatch other) {
  for (auto& item : other.items) items.push_back(std::move(item));
}

TrainingBatch joint_batch(RolloutGroup g_aug, std::optional<RolloutGroup> g_ref) {
  if (g_ref && g_ref->prompt != g_aug.prompt)
    throw error(errc::prompt_mismatch, "generation and refinement groups share one prompt");
  TrainingBatch batch;
  batch.items.push_back(TrainingBatch::Item{std::move(g_aug), std::move(g_ref)});
  return batch;
}

double batch_objective(const TrainingBatch& batch, const policy::PolicyParams& current,
                       const grpo::SurrogateOptions& opts, grpo::AdvMode gen_adv_mode,
                       policy::GradAccumulator& acc, grpo::LossBreakdown* breakdown) {
  if (batch.items.empty()) throw error(errc::empty_batch, "objective over an empty batch");
  size_t z = 0;
  for (const auto& item : batch.items) {
    for (const auto& m : item.g_aug.members) z += m.response.size();
    if (item.g_ref)
      for (const auto& m : item.g_ref->members) z += m.response.size();
  }
  const double inv_z = 1.0 / static_cast<double>(z);

  grpo::LossBreakdown value;
  std::vector<double> rewards;
  for (const auto& item : batch.items) {
    rewards.clear();
    for (const auto& m : item.g_aug.members) rewards.push_back(m.reward);
    const grpo::AdvantageSet adv = grpo::group_advantages(rewards, gen_adv_mode);
    grpo::detail::group_terms(item.g_aug, current, adv.values, opts, inv_z, false, acc, value);

    if (item.g_ref) {
      rewards.clear();
      for (const auto& m : item.g_ref->members) rewards.push_back(m.reward);
      const grpo::AdvantageSet ref_adv = grpo::group_advantages(rewards, grpo::AdvMode::dr_grpo);
      grpo::detail::group_terms(*item.g_ref, current, ref_adv.values, opts, inv_z, true, acc,
                                value);
    }
  }
  if (breakdown) {
    breakdown->on = value.on * inv_z;
    breakdown->off = value.off * inv_z;
    breakdown->ref = value.ref * inv_z;
    breakdown->off_ratio_min = value.off_ratio_min;
    breakdown->off_ratio_max = value.off_ratio_max;
    breakdown->saw_off_policy = value.saw_off_policy;
  }
  return (value.on + value.off + value.ref) * inv_z;
}

}  // namespace golf::refine
