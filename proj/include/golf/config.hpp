#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "golf/envs.hpp"

namespace golf::trainer {

enum class Algorithm { grpo, dr_grpo, golf };
enum class InjectionMode { adaptive, always, never };
enum class OffPolicyMode { mixed_rl, sft };

// Everything a run needs. The effective values (defaults included) are
// written verbatim to the run directory's config snapshot.
struct TrainConfig {
  envs::TaskSpec task;
  int max_context_len = 256;

  Algorithm algorithm = Algorithm::golf;
  envs::FeedbackMode feedback_mode = envs::FeedbackMode::mixed;
  InjectionMode injection_mode = InjectionMode::adaptive;
  OffPolicyMode offpolicy_mode = OffPolicyMode::mixed_rl;
  bool joint_refinement = true;   // sample and co-train refinement groups
  bool clip_off_policy = false;   // clip around the reshaped off-policy ratio

  int rollout_n = 8;
  double tau = -1.0;  // injection threshold; negative means 1 / rollout_n
  double epsilon = 0.2;
  double lambda = 0.1;
  double temperature = 1.0;
  double learning_rate = 1e-3;
  double sft_coef = 0.1;
  int entry_cap = 4;

  int steps = 300;
  int prompts_per_step = 16;
  uint64_t seed = 1;
  int d_emb = 32;
  int d_h = 64;
  double init_scale = 0.08;

  std::string out_dir = "runs/out";
  int checkpoint_every = 100;
  int eval_instances = 200;
  int eval_samples = 8;

  double effective_tau() const {
    return tau >= 0.0 ? tau : 1.0 / static_cast<double>(rollout_n);
  }
};

/// Parses the flat key-value config format: one `key = value` per line,
/// `#` comments, unknown keys rejected. Starts from defaults.
TrainConfig parse_config_text(const std::string& text);
TrainConfig parse_config_file(const std::string& path);

/// Applies one `key=value` override; the key set is identical to the file
/// schema. Throws bad_config for unknown keys or unparsable values.
void apply_override(TrainConfig& config, const std::string& key, const std::string& value);

/// Serializes every key with its effective value, in schema order.
std::string serialize_config(const TrainConfig& config);

/// All config keys in schema order (drives the CLI override flags).
const std::vector<std::string>& config_keys();

// Experiment presets used by the directional comparisons; difficulty is
// pinned so the base policy starts in the intended reward regime.
TrainConfig medium_preset();
TrainConfig hard_preset();

const char* algorithm_name(Algorithm a);
const char* feedback_mode_name(envs::FeedbackMode m);
const char* injection_mode_name(InjectionMode m);
const char* offpolicy_mode_name(OffPolicyMode m);

}  // namespace golf::trainer
