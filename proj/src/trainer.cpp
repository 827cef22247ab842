#include "golf/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "golf/rng.hpp"
#include "json.hpp"

namespace golf::trainer {

namespace {

using rng::Stream;

RolloutGroup sample_generation_group(const TrainConfig& config,
                                     const policy::PolicyParams& params_old,
                                     const envs::Instance& instance, uint64_t master,
                                     int step_index, int prompt_index) {
  RolloutGroup group;
  group.prompt = instance.prompt;
  group.kind = GroupKind::generation;
  ContextRef context = make_context(ContextKind::prompt, instance.prompt);
  for (int i = 0; i < config.rollout_n; ++i) {
    auto sampled = policy::sample(
        params_old, instance.prompt, config.task.max_response_len, config.temperature,
        rng::mix(master, Stream::rollout, static_cast<uint64_t>(step_index),
                 static_cast<uint64_t>(prompt_index), static_cast<uint64_t>(i)),
        envs::vocab::eos);
    envs::Verdict verdict =
        envs::verify(config.task, instance.prompt, instance.hidden_target, sampled.response);
    group.members.push_back(TrajectoryRecord{context, std::move(sampled.response),
                                             std::move(sampled.logprobs), verdict.reward,
                                             verdict.critique, Origin::on_policy});
  }
  return group;
}

void dump_diagnostics(const TrainConfig& config, int step_index, double value) {
  std::ofstream out(std::filesystem::path(config.out_dir) / "diagnostics.txt",
                    std::ios::app);
  out << "non-finite loss " << value << " at step " << (step_index + 1) << "\n";
}

}  // namespace

metrics::MetricsRecord train_step(const TrainConfig& config, policy::PolicyParams& params,
                                  const policy::PolicyParams& params_old,
                                  policy::OptimizerState& opt, int step_index,
                                  std::vector<sft::SftExample>* sft_audit,
                                  grpo::LossBreakdown* diagnostics) {
  const uint64_t master = config.seed;
  const double tau = config.effective_tau();
  const bool golf_mode = config.algorithm == Algorithm::golf;

  refine::TrainingBatch batch;
  std::vector<RolloutGroup> generation_groups;
  std::vector<sft::SftExample> sft_examples;
  int injections = 0;

  for (int j = 0; j < config.prompts_per_step; ++j) {
    const envs::Instance instance = envs::generate_instance(
        config.task, rng::mix(master, Stream::instance, static_cast<uint64_t>(step_index),
                              static_cast<uint64_t>(j)));
    RolloutGroup g_gen =
        sample_generation_group(config, params_old, instance, master, step_index, j);
    generation_groups.push_back(g_gen);

    std::optional<RolloutGroup> g_ref;
    std::vector<TrajectoryRecord> successes;
    if (golf_mode && config.joint_refinement) {
      const auto failures = failure_set(g_gen);
      if (!failures.empty()) {
        const refine::RefinementContext ctx = refine::aggregate_refinement_context(
            instance.prompt, failures, config.feedback_mode, config.entry_cap,
            rng::mix(master, Stream::aggregate, static_cast<uint64_t>(step_index),
                     static_cast<uint64_t>(j)),
            config.max_context_len);
        g_ref = refine::sample_refinement_group(
            params_old, config.task, instance, ctx, config.rollout_n, config.temperature,
            rng::mix(master, Stream::refine_rollout, static_cast<uint64_t>(step_index),
                     static_cast<uint64_t>(j)));
        successes = refine::successful_refinements(*g_ref);
      }
    }

    RolloutGroup g_aug = g_gen;
    if (golf_mode && !successes.empty()) {
      const double s = group_mean_reward(g_gen);
      const uint64_t inject_seed = rng::mix(master, Stream::inject,
                                            static_cast<uint64_t>(step_index),
                                            static_cast<uint64_t>(j));
      if (config.offpolicy_mode == OffPolicyMode::sft) {
        // imitate exactly the sample mixed-policy RL would have injected
        if (refine::should_inject(s, tau)) {
          auto [unused, decision] = refine::inject(g_gen, successes, inject_seed);
          if (decision.triggered)
            sft_examples.push_back(sft::SftExample{instance.prompt, decision.injected->response});
        }
      } else if (config.injection_mode == InjectionMode::adaptive) {
        if (refine::should_inject(s, tau)) {
          auto [augmented, decision] = refine::inject(g_gen, successes, inject_seed);
          g_aug = std::move(augmented);
          if (decision.triggered) ++injections;
        }
      } else if (config.injection_mode == InjectionMode::always) {
        auto [augmented, decision] = refine::inject_best(g_gen, successes, inject_seed);
        g_aug = std::move(augmented);
        if (decision.triggered) ++injections;
      }
    }

    // the sft ablation isolates imitation: refinement groups carry no RL loss
    if (config.offpolicy_mode == OffPolicyMode::sft) g_ref.reset();
    batch.append(refine::joint_batch(std::move(g_aug), std::move(g_ref)));
  }

  policy::GradAccumulator acc(params.dims);
  grpo::SurrogateOptions opts;
  opts.epsilon = config.epsilon;
  opts.lambda = config.lambda;
  opts.clip_off_policy = config.clip_off_policy;
  const grpo::AdvMode gen_mode =
      config.algorithm == Algorithm::grpo ? grpo::AdvMode::grpo : grpo::AdvMode::dr_grpo;

  grpo::LossBreakdown breakdown;
  double objective = refine::batch_objective(batch, params, opts, gen_mode, acc, &breakdown);
  if (diagnostics) *diagnostics = breakdown;

  double sft_loss = 0.0;
  if (config.offpolicy_mode == OffPolicyMode::sft && !sft_examples.empty()) {
    sft_loss = sft::sft_loss_and_grad(params, sft_examples, config.sft_coef, acc);
    objective -= sft_loss;
    if (sft_audit)
      sft_audit->insert(sft_audit->end(), sft_examples.begin(), sft_examples.end());
  }

  if (!std::isfinite(objective)) {
    dump_diagnostics(config, step_index, objective);
    throw error(errc::non_finite_gradient, "non-finite loss, run aborted");
  }
  policy::adam_step(params, acc, opt);

  metrics::MetricsRecord rec;
  rec.step = step_index + 1;
  double reward_sum = 0.0;
  int reward_count = 0;
  for (const auto& g : generation_groups)
    for (const auto& m : g.members) {
      reward_sum += m.reward;
      ++reward_count;
    }
  rec.mean_reward = reward_sum / static_cast<double>(reward_count);
  rec.zero_reward_ratio = metrics::zero_reward_ratio(generation_groups);
  rec.entropy = metrics::batch_entropy(params_old, generation_groups);
  rec.injection_rate =
      static_cast<double>(injections) / static_cast<double>(config.prompts_per_step);
  rec.on_loss = breakdown.on;
  rec.off_loss = config.offpolicy_mode == OffPolicyMode::sft ? sft_loss : breakdown.off;
  rec.ref_loss = breakdown.ref;
  return rec;
}

PassKResult eval_pass_at_k(const policy::PolicyParams& params, const envs::TaskSpec& task, int n,
                           std::span<const int> ks, uint64_t seed, int instances,
                           double temperature) {
  for (int k : ks)
    if (k > n) throw error(errc::bad_k, "pass@k needs n >= k samples");

  PassKResult result;
  result.ks.assign(ks.begin(), ks.end());
  result.pass_rates.assign(ks.size(), 0.0);
  result.instances = instances;
  result.samples_per_instance = n;

  double reward_sum = 0.0;
  for (int i = 0; i < instances; ++i) {
    const envs::Instance instance = envs::generate_instance(
        task, rng::mix(seed, Stream::holdout_instance, static_cast<uint64_t>(i)));
    int successes = 0;
    for (int s = 0; s < n; ++s) {
      auto sampled = policy::sample(params, instance.prompt, task.max_response_len, temperature,
                                    rng::mix(seed, Stream::holdout_rollout,
                                             static_cast<uint64_t>(i), static_cast<uint64_t>(s)),
                                    envs::vocab::eos);
      const envs::Verdict verdict =
          envs::verify(task, instance.prompt, instance.hidden_target, sampled.response);
      if (verdict.reward == 1.0) ++successes;
      reward_sum += verdict.reward;
    }
    for (size_t k = 0; k < result.ks.size(); ++k)
      result.pass_rates[k] += metrics::pass_at_k(n, successes, result.ks[k]);
  }
  for (double& rate : result.pass_rates) rate /= static_cast<double>(instances);
  result.mean_reward = reward_sum / static_cast<double>(instances) / static_cast<double>(n);
  return result;
}

namespace {

void write_eval_report(const std::filesystem::path& path, const PassKResult& result) {
  nlohmann::json j;
  j["mean_reward"] = result.mean_reward;
  j["instances"] = result.instances;
  j["samples_per_instance"] = result.samples_per_instance;
  nlohmann::json passk = nlohmann::json::object();
  for (size_t i = 0; i < result.ks.size(); ++i)
    passk["pass@" + std::to_string(result.ks[i])] = result.pass_rates[i];
  j["pass_at_k"] = passk;
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << "\n";
}

void append_sft_audit(const std::filesystem::path& path, int step,
                      std::span<const sft::SftExample> examples) {
  std::ofstream out(path, std::ios::app);
  for (const auto& ex : examples) {
    nlohmann::json j;
    j["step"] = step;
    j["context"] = ex.context;
    j["target"] = ex.target;
    out << j.dump() << "\n";
  }
}

}  // namespace

PassKResult read_eval_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_failure, "cannot open eval report " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  PassKResult result;
  result.mean_reward = j.at("mean_reward").get<double>();
  result.instances = j.at("instances").get<int>();
  result.samples_per_instance = j.at("samples_per_instance").get<int>();
  for (auto& [key, value] : j.at("pass_at_k").items()) {
    result.ks.push_back(std::stoi(key.substr(5)));
    result.pass_rates.push_back(value.get<double>());
  }
  return result;
}

std::vector<metrics::MetricsRecord> read_metrics_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_failure, "cannot open metrics file " + path.string());
  std::vector<metrics::MetricsRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(metrics::from_json_line(line));
  }
  return records;
}

std::filesystem::path run_experiment(const TrainConfig& config, const std::string& resume_from) {
  namespace fs = std::filesystem;
  const fs::path run_dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) throw error(errc::io_failure, "cannot create run directory " + run_dir.string());

  {
    std::ofstream out(run_dir / "config.txt", std::ios::trunc);
    if (!out) throw error(errc::io_failure, "cannot write config snapshot");
    out << serialize_config(config);
  }

  policy::PolicyDims dims{config.task.vocab_size, config.d_emb, config.d_h};
  policy::PolicyParams params = policy::PolicyParams::init(dims, config.seed, config.init_scale);
  policy::OptimizerState opt(dims, config.learning_rate);
  int start_step = 0;
  if (!resume_from.empty()) {
    policy::Checkpoint ckpt = policy::load_checkpoint_file(resume_from);
    if (!(ckpt.params.dims == dims))
      throw error(errc::bad_config, "checkpoint dimensions do not match the config");
    params = std::move(ckpt.params);
    opt = std::move(ckpt.opt);
    start_step = static_cast<int>(ckpt.trained_steps);
  }

  if (resume_from.empty()) {
    for (const char* stale : {"offpolicy_ratios.jsonl", "sft_examples.jsonl", "diagnostics.txt"})
      fs::remove(run_dir / stale, ec);
  }
  std::ofstream metrics_out(run_dir / "metrics.jsonl",
                            resume_from.empty() ? std::ios::trunc : std::ios::app);
  if (!metrics_out) throw error(errc::io_failure, "cannot open metrics stream");

  std::vector<sft::SftExample> sft_audit;
  for (int step = start_step; step < config.steps; ++step) {
    const policy::PolicyParams params_old = params;  // behavior snapshot for this step
    sft_audit.clear();
    grpo::LossBreakdown diag;
    metrics::MetricsRecord rec =
        train_step(config, params, params_old, opt, step, &sft_audit, &diag);
    metrics_out << metrics::to_json_line(rec) << "\n" << std::flush;
    if (diag.saw_off_policy) {
      std::ofstream ratio_out(run_dir / "offpolicy_ratios.jsonl", std::ios::app);
      nlohmann::json j;
      j["step"] = step + 1;
      j["off_ratio_min"] = diag.off_ratio_min;
      j["off_ratio_max"] = diag.off_ratio_max;
      ratio_out << j.dump() << "\n";
    }
    if (!sft_audit.empty())
      append_sft_audit(run_dir / "sft_examples.jsonl", step + 1, sft_audit);
    if (config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0 &&
        step + 1 < config.steps) {
      policy::save_checkpoint_file(
          (run_dir / ("checkpoint_" + std::to_string(step + 1) + ".bin")).string(), params, opt,
          static_cast<uint64_t>(step + 1));
    }
  }
  policy::save_checkpoint_file((run_dir / "checkpoint_final.bin").string(), params, opt,
                               static_cast<uint64_t>(config.steps));

  if (config.eval_instances > 0) {
    const std::vector<int> ks = {1, 2, 4, 8};
    std::vector<int> usable;
    for (int k : ks)
      if (k <= config.eval_samples) usable.push_back(k);
    const PassKResult eval = eval_pass_at_k(params, config.task, config.eval_samples, usable,
                                            config.seed, config.eval_instances, 1.0);
    write_eval_report(run_dir / "eval_report.json", eval);
  }
  return run_dir;
}

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> variants = {
      "golf-mixed",         "golf-external-only", "golf-intra-only",
      "golf-always-inject", "golf-sft",           "dr_grpo",
  };
  return variants;
}

TrainConfig variant_config(const TrainConfig& base, const std::string& variant) {
  TrainConfig config = base;
  config.algorithm = Algorithm::golf;
  config.feedback_mode = envs::FeedbackMode::mixed;
  config.injection_mode = InjectionMode::adaptive;
  config.offpolicy_mode = OffPolicyMode::mixed_rl;
  if (variant == "golf-mixed") {
  } else if (variant == "golf-external-only") {
    config.feedback_mode = envs::FeedbackMode::external;
  } else if (variant == "golf-intra-only") {
    config.feedback_mode = envs::FeedbackMode::intra;
  } else if (variant == "golf-always-inject") {
    config.injection_mode = InjectionMode::always;
  } else if (variant == "golf-sft") {
    config.offpolicy_mode = OffPolicyMode::sft;
  } else if (variant == "dr_grpo") {
    config.algorithm = Algorithm::dr_grpo;
  } else {
    throw error(errc::bad_config, "unknown ablation variant '" + variant + "'");
  }
  return config;
}

namespace {

AblationRow summarize_variant(const TrainConfig& base, const std::string& variant,
                              std::span<const uint64_t> seeds, const std::string& out_root) {
  AblationRow row;
  row.variant = variant;
  for (uint64_t seed : seeds) {
    const std::filesystem::path run_dir =
        std::filesystem::path(out_root) / variant / ("seed_" + std::to_string(seed));
    const auto records = read_metrics_file(run_dir / "metrics.jsonl");
    const PassKResult eval = read_eval_report(run_dir / "eval_report.json");
    row.final_mean_reward.push_back(eval.mean_reward);

    int first_half = -1;
    double zero_sum = 0.0, entropy_sum = 0.0;
    for (const auto& rec : records) {
      if (first_half < 0 && rec.mean_reward >= 0.5) first_half = static_cast<int>(rec.step);
      zero_sum += rec.zero_reward_ratio;
      entropy_sum += rec.entropy;
    }
    row.steps_to_half.push_back(first_half);
    const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
    row.mean_zero_reward_ratio.push_back(zero_sum / n);
    row.mean_entropy.push_back(entropy_sum / n);
  }
  (void)base;
  return row;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

AblationSummary summarize_ablation(const TrainConfig& base, std::span<const uint64_t> seeds,
                                   const std::string& out_root) {
  AblationSummary summary;
  for (const auto& variant : ablation_variants())
    summary.rows.push_back(summarize_variant(base, variant, seeds, out_root));
  return summary;
}

AblationSummary run_ablation_suite(const TrainConfig& base, std::span<const uint64_t> seeds,
                                   const std::string& out_root, int jobs) {
  if (seeds.size() < 3)
    throw error(errc::bad_config, "ablation suite needs at least 3 seeds");

  struct Job {
    TrainConfig config;
  };
  std::vector<Job> pending;
  for (const auto& variant : ablation_variants()) {
    for (uint64_t seed : seeds) {
      TrainConfig config = variant_config(base, variant);
      config.seed = seed;
      config.out_dir = (std::filesystem::path(out_root) / variant /
                        ("seed_" + std::to_string(seed)))
                           .string();
      pending.push_back(Job{std::move(config)});
    }
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      run_experiment(pending[i].config);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return summarize_ablation(base, seeds, out_root);
}

std::string AblationSummary::to_table() const {
  std::ostringstream out;
  out << "variant, median_final_mean_reward, median_steps_to_0.5, "
         "median_zero_reward_ratio, median_entropy\n";
  for (const auto& row : rows) {
    std::vector<double> steps;
    for (int s : row.steps_to_half) steps.push_back(static_cast<double>(s));
    out << row.variant << ", " << median(row.final_mean_reward) << ", " << median(steps) << ", "
        << median(row.mean_zero_reward_ratio) << ", " << median(row.mean_entropy) << "\n";
  }
  return out.str();
}

std::string AblationSummary::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["variant"] = row.variant;
    r["final_mean_reward"] = row.final_mean_reward;
    r["steps_to_half"] = row.steps_to_half;
    r["mean_zero_reward_ratio"] = row.mean_zero_reward_ratio;
    r["mean_entropy"] = row.mean_entropy;
    j.push_back(r);
  }
  return j.dump(2);
}

}  // namespace golf::trainer
