#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "golf/policy.hpp"
#include "golf/types.hpp"

namespace golf::metrics {

// Per-step scalars, serialized as one JSON object per line in the run log.
struct MetricsRecord {
  int64_t step = 0;
  double mean_reward = 0.0;
  double zero_reward_ratio = 0.0;
  double entropy = 0.0;  // seq-mean-token-sum, nats
  double injection_rate = 0.0;
  double on_loss = 0.0;
  double off_loss = 0.0;
  double ref_loss = 0.0;
};

std::string to_json_line(const MetricsRecord& rec);
MetricsRecord from_json_line(const std::string& line);

/// Fraction of generation groups whose members all have reward 0, measured
/// before injection. Throws empty_batch when no generation group is present.
double zero_reward_ratio(std::span<const RolloutGroup> groups);

/// Sum of per-step next-token entropies per trajectory, averaged over the
/// on-policy trajectories of generation groups. Returns 0 when no such
/// trajectory exists.
double batch_entropy(const policy::PolicyParams& params, std::span<const RolloutGroup> groups);

/// Unbiased pass@k estimator 1 - C(n-c, k) / C(n, k), computed with the
/// cancelled product form so it stays exact-in-double for n <= 1024.
double pass_at_k(int n, int c, int k);

/// Arithmetic mean of rewards over n samples.
double avg_at_n(std::span<const double> rewards);

}  // namespace golf::metrics
