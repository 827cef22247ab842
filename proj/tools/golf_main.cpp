#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "golf/trainer.hpp"

namespace {

using golf::trainer::TrainConfig;

// Registers every config key as a --key <value> override on a subcommand.
void add_config_overrides(CLI::App* cmd, std::vector<std::pair<std::string, std::string>>* sink) {
  for (const auto& key : golf::trainer::config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [sink, key](const std::string& value) { sink->emplace_back(key, value); },
        "override config key '" + key + "'");
  }
}

TrainConfig load_config(const std::string& config_path, const std::string& preset,
                        const std::vector<std::pair<std::string, std::string>>& overrides) {
  TrainConfig config;
  if (!preset.empty()) {
    if (preset == "medium") config = golf::trainer::medium_preset();
    else if (preset == "hard") config = golf::trainer::hard_preset();
    else throw golf::error(golf::errc::bad_config, "unknown preset '" + preset + "'");
  }
  if (!config_path.empty()) config = golf::trainer::parse_config_file(config_path);
  for (const auto& [key, value] : overrides)
    golf::trainer::apply_override(config, key, value);
  return config;
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  return seeds;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-relative policy optimization with group-level feedback"};
  app.require_subcommand(1);

  std::string config_path, preset, resume_from, checkpoint_path, out_dir, seeds_text, ks_text;
  std::vector<std::pair<std::string, std::string>> overrides;
  int n_samples = 8, instances = 200, jobs = 1;
  bool summary_only = false;

  CLI::App* train = app.add_subcommand("train", "run one training experiment");
  train->add_option("--config", config_path, "config file (flat key = value)");
  train->add_option("--preset", preset, "start from a preset: medium | hard");
  train->add_option("--resume", resume_from, "resume from a checkpoint file");
  add_config_overrides(train, &overrides);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on held-out instances");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--config", config_path, "config file");
  eval->add_option("--preset", preset, "preset: medium | hard");
  eval->add_option("--instances", instances, "held-out instance count");
  eval->add_option("--samples", n_samples, "samples per instance");
  add_config_overrides(eval, &overrides);

  CLI::App* ablate = app.add_subcommand("ablate", "run the ablation suite over seeds");
  ablate->add_option("--config", config_path, "base config file");
  ablate->add_option("--preset", preset, "preset: medium | hard");
  ablate->add_option("--seeds", seeds_text, "comma-separated seed list (>= 3)")->required();
  ablate->add_option("--out", out_dir, "output root directory")->required();
  ablate->add_option("--jobs", jobs, "parallel runs");
  ablate->add_flag("--summary-only", summary_only, "summarize existing logs without running");
  add_config_overrides(ablate, &overrides);

  CLI::App* passk = app.add_subcommand("passk", "pass@k table for a checkpoint");
  passk->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  passk->add_option("--config", config_path, "config file");
  passk->add_option("--preset", preset, "preset: medium | hard");
  passk->add_option("--n", n_samples, "samples per instance");
  passk->add_option("--ks", ks_text, "comma-separated k list")->default_val("1,2,4,8");
  passk->add_option("--instances", instances, "held-out instance count");
  add_config_overrides(passk, &overrides);

  CLI::App* inspect = app.add_subcommand("inspect-checkpoint", "print checkpoint header and stats");
  inspect->add_option("path", checkpoint_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      TrainConfig config = load_config(config_path, preset, overrides);
      auto run_dir = golf::trainer::run_experiment(config, resume_from);
      std::cout << "run written to " << run_dir.string() << "\n";
    } else if (eval->parsed()) {
      TrainConfig config = load_config(config_path, preset, overrides);
      auto ckpt = golf::policy::load_checkpoint_file(checkpoint_path);
      const std::vector<int> ks = {1, 2, 4, 8};
      std::vector<int> usable;
      for (int k : ks)
        if (k <= n_samples) usable.push_back(k);
      auto result = golf::trainer::eval_pass_at_k(ckpt.params, config.task, n_samples, usable,
                                                  config.seed, instances, 1.0);
      std::cout << "mean_reward " << result.mean_reward << "\n";
      for (size_t i = 0; i < result.ks.size(); ++i)
        std::cout << "pass@" << result.ks[i] << " " << result.pass_rates[i] << "\n";
    } else if (ablate->parsed()) {
      TrainConfig config = load_config(config_path, preset, overrides);
      auto seeds = parse_seed_list(seeds_text);
      auto summary = summary_only
                         ? golf::trainer::summarize_ablation(config, seeds, out_dir)
                         : golf::trainer::run_ablation_suite(config, seeds, out_dir, jobs);
      std::cout << summary.to_table();
      std::ofstream json_out(std::filesystem::path(out_dir) / "summary.json");
      json_out << summary.to_json() << "\n";
    } else if (passk->parsed()) {
      TrainConfig config = load_config(config_path, preset, overrides);
      auto ckpt = golf::policy::load_checkpoint_file(checkpoint_path);
      auto ks = parse_int_list(ks_text);
      auto result = golf::trainer::eval_pass_at_k(ckpt.params, config.task, n_samples, ks,
                                                  config.seed, instances, 1.0);
      for (size_t i = 0; i < result.ks.size(); ++i)
        std::cout << "pass@" << result.ks[i] << " " << result.pass_rates[i] << "\n";
    } else if (inspect->parsed()) {
      auto ckpt = golf::policy::load_checkpoint_file(checkpoint_path);
      std::cout << "vocab " << ckpt.params.dims.vocab << "\n"
                << "d_emb " << ckpt.params.dims.d_emb << "\n"
                << "d_h " << ckpt.params.dims.d_h << "\n"
                << "parameters " << ckpt.params.size() << "\n"
                << "trained_steps " << ckpt.trained_steps << "\n"
                << "optimizer_step " << ckpt.opt.step << "\n"
                << "learning_rate " << ckpt.opt.learning_rate << "\n";
      double norm = 0.0;
      for (auto span : ckpt.params.tensors())
        for (double x : span) norm += x * x;
      std::cout << "param_l2 " << std::sqrt(norm) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
