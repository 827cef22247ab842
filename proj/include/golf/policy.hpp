#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "golf/types.hpp"

namespace golf::policy {

struct PolicyDims {
  int vocab = 64;
  int d_emb = 32;
  int d_h = 64;
  bool operator==(const PolicyDims&) const = default;
};

// A single tanh recurrent layer over token embeddings with a softmax output
// head. All math is 64-bit. Parameters are plain vectors so snapshots are
// value copies and finite-difference audits can walk every coordinate.
//
// Tensor declaration order (also the checkpoint order):
//   embedding [vocab x d_emb], w_in [d_h x d_emb], w_rec [d_h x d_h],
//   b_rec [d_h], w_out [vocab x d_h], b_out [vocab]
struct PolicyParams {
  PolicyDims dims;
  std::vector<double> embedding;
  std::vector<double> w_in;
  std::vector<double> w_rec;
  std::vector<double> b_rec;
  std::vector<double> w_out;
  std::vector<double> b_out;

  static PolicyParams init(PolicyDims dims, uint64_t seed, double scale = 0.08);

  size_t size() const;
  std::array<std::span<double>, 6> tensors();
  std::array<std::span<const double>, 6> tensors() const;
};

// One buffer per parameter tensor; zeroed at the start of each training step.
struct GradAccumulator {
  explicit GradAccumulator(const PolicyDims& dims);
  std::vector<double> embedding, w_in, w_rec, b_rec, w_out, b_out;
  void zero();
  size_t size() const;
  std::array<std::span<double>, 6> tensors();
  std::array<std::span<const double>, 6> tensors() const;
};

struct OptimizerState {
  explicit OptimizerState(const PolicyDims& dims, double learning_rate = 1e-3);
  std::vector<double> m;  // first moment, flat over all tensors
  std::vector<double> v;  // second moment
  int64_t step = 0;
  double learning_rate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct SampleResult {
  TokenSeq response;
  std::vector<double> logprobs;  // temperature-1 log-probabilities of chosen tokens
};

/// Teacher-forced log-probabilities log pi(response_t | context, response_<t)
/// for every response position. Throws bad_token for ids outside the vocab
/// and bad_shape for empty context or response.
std::vector<double> logprobs(const PolicyParams& params, const TokenSeq& context,
                             const TokenSeq& response);

/// Autoregressive sampling until eos or max_len. Sampling applies the
/// temperature; the recorded log-probabilities are always at temperature 1,
/// which is the training-time scoring contract. greedy picks the argmax token
/// at every step (the temperature -> 0 limit).
SampleResult sample(const PolicyParams& params, const TokenSeq& context, int max_len,
                    double temperature, uint64_t seed, TokenId eos, bool greedy = false);

/// Shannon entropy (nats) of the next-token distribution at each decoding
/// step under teacher forcing.
std::vector<double> token_entropies(const PolicyParams& params, const TokenSeq& context,
                                    const TokenSeq& response);

/// Full next-token probability vectors at each decoding step. Mainly for
/// audits: exp(logprobs) and entropies must match these exactly.
std::vector<std::vector<double>> step_distributions(const PolicyParams& params,
                                                    const TokenSeq& context,
                                                    const TokenSeq& response);

/// Adds d/dtheta sum_t weights[t] * log pi(response_t | ...) to the
/// accumulator via backpropagation through time. Weights are constants.
void accumulate_weighted_logprob_grad(const PolicyParams& params, const TokenSeq& context,
                                      const TokenSeq& response, std::span<const double> weights,
                                      GradAccumulator& acc);

/// Bias-corrected adaptive-moment ascent step: the accumulator holds the
/// gradient of the objective and the update adds, never subtracts. Throws
/// non_finite_gradient if any accumulated value is not finite.
void adam_step(PolicyParams& params, const GradAccumulator& acc, OptimizerState& state);

// Checkpoint format (little-endian, documented in the README):
//   magic "GOLFCKP1", u32 version, u32 vocab, u32 d_emb, u32 d_h,
//   u64 trained_steps, parameter tensors as f64 in declaration order,
//   u64 optimizer step, f64 lr, f64 beta1, f64 beta2, f64 eps,
//   first moments as f64, second moments as f64.
struct Checkpoint {
  PolicyParams params;
  OptimizerState opt;
  uint64_t trained_steps = 0;
};

void save_checkpoint(std::ostream& out, const PolicyParams& params, const OptimizerState& opt,
                     uint64_t trained_steps);
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const PolicyParams& params,
                          const OptimizerState& opt, uint64_t trained_steps);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace golf::policy
