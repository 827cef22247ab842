#include "golf/sft.hpp"

#include <vector>

namespace golf::sft {

double sft_loss_and_grad(const policy::PolicyParams& params, std::span<const SftExample> examples,
                         double coefficient, policy::GradAccumulator& acc) {
  if (examples.empty()) throw error(errc::no_examples, "sft loss over an empty example set");

  const double inv_e = 1.0 / static_cast<double>(examples.size());
  double mean_loglik = 0.0;
  std::vector<double> weights;
  for (const auto& ex : examples) {
    const std::vector<double> lps = policy::logprobs(params, ex.context, ex.target);
    const double inv_t = 1.0 / static_cast<double>(lps.size());
    double seq_mean = 0.0;
    for (double lp : lps) seq_mean += lp;
    seq_mean *= inv_t;
    mean_loglik += seq_mean * inv_e;
    if (coefficient != 0.0) {
      weights.assign(lps.size(), coefficient * inv_e * inv_t);
      policy::accumulate_weighted_logprob_grad(params, ex.context, ex.target, weights, acc);
    }
  }
  return -coefficient * mean_loglik;
}

}  // namespace golf::sft
