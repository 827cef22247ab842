#include "golf/metrics.hpp"

#include "json.hpp"

namespace golf::metrics {

std::string to_json_line(const MetricsRecord& rec) {
  nlohmann::json j;
  j["step"] = rec.step;
  j["mean_reward"] = rec.mean_reward;
  j["zero_reward_ratio"] = rec.zero_reward_ratio;
  j["entropy"] = rec.entropy;
  j["injection_rate"] = rec.injection_rate;
  j["on_loss"] = rec.on_loss;
  j["off_loss"] = rec.off_loss;
  j["ref_loss"] = rec.ref_loss;
  return j.dump();
}

MetricsRecord from_json_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  MetricsRecord rec;
  rec.step = j.at("step").get<int64_t>();
  rec.mean_reward = j.at("mean_reward").get<double>();
  rec.zero_reward_ratio = j.at("zero_reward_ratio").get<double>();
  rec.entropy = j.at("entropy").get<double>();
  rec.injection_rate = j.at("injection_rate").get<double>();
  rec.on_loss = j.at("on_loss").get<double>();
  rec.off_loss = j.at("off_loss").get<double>();
  rec.ref_loss = j.at("ref_loss").get<double>();
  return rec;
}

double zero_reward_ratio(std::span<const RolloutGroup> groups) {
  if (groups.empty()) throw error(errc::empty_batch, "zero_reward_ratio over an empty batch");
  int generation = 0, zero = 0;
  for (const auto& g : groups) {
    if (g.kind != GroupKind::generation) continue;
    ++generation;
    if (is_zero_reward_group(g)) ++zero;
  }
  if (generation == 0)
    throw error(errc::empty_batch, "zero_reward_ratio needs at least one generation group");
  return static_cast<double>(zero) / static_cast<double>(generation);
}

double batch_entropy(const policy::PolicyParams& params, std::span<const RolloutGroup> groups) {
  double total = 0.0;
  int count = 0;
  for (const auto& g : groups) {
    if (g.kind != GroupKind::generation) continue;
    for (const auto& m : g.members) {
      if (m.origin != Origin::on_policy) continue;
      double seq_sum = 0.0;
      for (double h : policy::token_entropies(params, m.context->tokens, m.response))
        seq_sum += h;
      total += seq_sum;
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double pass_at_k(int n, int c, int k) {
  if (n < 1 || k < 1 || k > n || c < 0 || c > n)
    throw error(errc::bad_k, "pass_at_k requires 0 <= c <= n and 1 <= k <= n");
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  double prod = 1.0;
  for (int i = 0; i < k; ++i)
    prod *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - prod;
}

double avg_at_n(std::span<const double> rewards) {
  if (rewards.empty()) throw error(errc::empty_batch, "avg_at_n over zero samples");
  double sum = 0.0;
  for (double r : rewards) sum += r;
  return sum / static_cast<double>(rewards.size());
}

}  // namespace golf::metrics
