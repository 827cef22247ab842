#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "golf/config.hpp"
#include "golf/golf.hpp"
#include "golf/metrics.hpp"
#include "golf/policy.hpp"
#include "golf/sft.hpp"

namespace golf::trainer {

// Rollouts, refinement, injection, objective and optimizer update for one
// step. Sampling and behavior log-probabilities always come from the
// params_old snapshot; only the optimizer mutates params. step_index is
// 0-based; the emitted record carries the 1-based step number.
metrics::MetricsRecord train_step(const TrainConfig& config, policy::PolicyParams& params,
                                  const policy::PolicyParams& params_old,
                                  policy::OptimizerState& opt, int step_index,
                                  std::vector<sft::SftExample>* sft_audit = nullptr,
                                  grpo::LossBreakdown* diagnostics = nullptr);

struct PassKResult {
  std::vector<int> ks;
  std::vector<double> pass_rates;  // aligned with ks
  double mean_reward = 0.0;        // avg over all samples; equals pass@1
  int instances = 0;
  int samples_per_instance = 0;
};

/// Samples n responses per held-out instance at the configured temperature,
/// verifies them, and reports the unbiased pass@k estimate averaged over
/// instances. Held-out instances come from a seed stream disjoint from
/// training.
PassKResult eval_pass_at_k(const policy::PolicyParams& params, const envs::TaskSpec& task, int n,
                           std::span<const int> ks, uint64_t seed, int instances,
                           double temperature);

/// Runs a full experiment: writes the config snapshot, a flushed-per-step
/// JSONL metrics stream, periodic and final checkpoints, and a final
/// held-out evaluation report into config.out_dir. resume_from continues
/// from a checkpoint, executing only the remaining steps. Returns the run
/// directory.
std::filesystem::path run_experiment(const TrainConfig& config,
                                     const std::string& resume_from = "");

struct AblationRow {
  std::string variant;
  std::vector<double> final_mean_reward;      // held-out eval mean, per seed
  std::vector<int> steps_to_half;             // first step with mean_reward >= 0.5, -1 if never
  std::vector<double> mean_zero_reward_ratio; // over all steps, per seed
  std::vector<double> mean_entropy;           // over all steps, per seed
};

struct AblationSummary {
  std::vector<AblationRow> rows;
  std::string to_table() const;
  std::string to_json() const;
};

const std::vector<std::string>& ablation_variants();
TrainConfig variant_config(const TrainConfig& base, const std::string& variant);

/// Runs {golf-mixed, golf-external-only, golf-intra-only, golf-always-inject,
/// golf-sft, dr_grpo} for every seed under out_root/<variant>/seed_<s>, then
/// summarizes. jobs > 1 runs independent experiments in parallel; results do
/// not depend on the schedule. Requires at least 3 seeds.
AblationSummary run_ablation_suite(const TrainConfig& base, std::span<const uint64_t> seeds,
                                   const std::string& out_root, int jobs = 1);

/// Rebuilds the summary from stored logs without re-running anything.
AblationSummary summarize_ablation(const TrainConfig& base, std::span<const uint64_t> seeds,
                                   const std::string& out_root);

// Helpers shared with the acceptance suite.
std::vector<metrics::MetricsRecord> read_metrics_file(const std::filesystem::path& path);
PassKResult read_eval_report(const std::filesystem::path& path);

}  // namespace golf::trainer
