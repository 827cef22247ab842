#include "golf/policy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "golf/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace golf::policy {

size_t PolicyParams::size() const {
  return embedding.size() + w_in.size() + w_rec.size() + b_rec.size() + w_out.size() +
         b_out.size();
}

std::array<std::span<double>, 6> PolicyParams::tensors() {
  return {std::span(embedding), std::span(w_in), std::span(w_rec),
          std::span(b_rec),     std::span(w_out), std::span(b_out)};
}

std::array<std::span<const double>, 6> PolicyParams::tensors() const {
  return {std::span(embedding), std::span(w_in), std::span(w_rec),
          std::span(b_rec),     std::span(w_out), std::span(b_out)};
}

PolicyParams PolicyParams::init(PolicyDims dims, uint64_t seed, double scale) {
  PolicyParams p;
  p.dims = dims;
  p.embedding.resize(static_cast<size_t>(dims.vocab) * dims.d_emb);
  p.w_in.resize(static_cast<size_t>(dims.d_h) * dims.d_emb);
  p.w_rec.resize(static_cast<size_t>(dims.d_h) * dims.d_h);
  p.b_rec.resize(dims.d_h);
  p.w_out.resize(static_cast<size_t>(dims.vocab) * dims.d_h);
  p.b_out.resize(dims.vocab);
  rng::Engine engine(rng::mix(seed, rng::Stream::param_init));
  for (auto span : p.tensors())
    for (double& x : span) x = (engine.uniform01() * 2.0 - 1.0) * scale;
  return p;
}

GradAccumulator::GradAccumulator(const PolicyDims& dims)
    : embedding(static_cast<size_t>(dims.vocab) * dims.d_emb, 0.0),
      w_in(static_cast<size_t>(dims.d_h) * dims.d_emb, 0.0),
      w_rec(static_cast<size_t>(dims.d_h) * dims.d_h, 0.0),
      b_rec(dims.d_h, 0.0),
      w_out(static_cast<size_t>(dims.vocab) * dims.d_h, 0.0),
      b_out(dims.vocab, 0.0) {}

void GradAccumulator::zero() {
  for (auto span : tensors())
    for (double& x : span) x = 0.0;
}

size_t GradAccumulator::size() const {
  return embedding.size() + w_in.size() + w_rec.size() + b_rec.size() + w_out.size() +
         b_out.size();
}

std::array<std::span<double>, 6> GradAccumulator::tensors() {
  return {std::span(embedding), std::span(w_in), std::span(w_rec),
          std::span(b_rec),     std::span(w_out), std::span(b_out)};
}

std::array<std::span<const double>, 6> GradAccumulator::tensors() const {
  return {std::span(embedding), std::span(w_in), std::span(w_rec),
          std::span(b_rec),     std::span(w_out), std::span(b_out)};
}

OptimizerState::OptimizerState(const PolicyDims& dims, double learning_rate)
    : learning_rate(learning_rate) {
  size_t total = static_cast<size_t>(dims.vocab) * dims.d_emb +
                 static_cast<size_t>(dims.d_h) * dims.d_emb +
                 static_cast<size_t>(dims.d_h) * dims.d_h + dims.d_h +
                 static_cast<size_t>(dims.vocab) * dims.d_h + dims.vocab;
  m.assign(total, 0.0);
  v.assign(total, 0.0);
}

namespace {

void check_tokens(const PolicyParams& params, const TokenSeq& seq) {
  for (TokenId t : seq)
    if (t < 0 || t >= params.dims.vocab)
      throw error(errc::bad_token, "token id " + std::to_string(t) + " outside vocabulary");
}

// h' = tanh(w_in * emb[token] + w_rec * h + b_rec)
void recurrent_step(const PolicyParams& p, TokenId token, const std::vector<double>& h,
                    std::vector<double>& h_next) {
  const int d_h = p.dims.d_h;
  const int d_emb = p.dims.d_emb;
  const double* emb = p.embedding.data() + static_cast<size_t>(token) * d_emb;
  for (int i = 0; i < d_h; ++i) {
    double a = p.b_rec[i];
    const double* wi = p.w_in.data() + static_cast<size_t>(i) * d_emb;
    for (int j = 0; j < d_emb; ++j) a += wi[j] * emb[j];
    const double* wr = p.w_rec.data() + static_cast<size_t>(i) * d_h;
    for (int j = 0; j < d_h; ++j) a += wr[j] * h[j];
    h_next[i] = std::tanh(a);
  }
}

void output_logits(const PolicyParams& p, const std::vector<double>& h,
                   std::vector<double>& logits) {
  const int d_h = p.dims.d_h;
  for (int v = 0; v < p.dims.vocab; ++v) {
    double z = p.b_out[v];
    const double* wo = p.w_out.data() + static_cast<size_t>(v) * d_h;
    for (int j = 0; j < d_h; ++j) z += wo[j] * h[j];
    logits[v] = z;
  }
}

// In-place softmax with max subtraction; returns log of the normalizer so
// callers can form log-probabilities as logit - max - log_z.
struct SoftmaxResult {
  double max_logit;
  double log_z;
};

SoftmaxResult softmax_inplace(std::vector<double>& logits_to_probs) {
  double max_logit = logits_to_probs[0];
  for (double z : logits_to_probs) max_logit = std::max(max_logit, z);
  double sum = 0.0;
  for (double& z : logits_to_probs) {
    z = std::exp(z - max_logit);
    sum += z;
  }
  for (double& z : logits_to_probs) z /= sum;
  return {max_logit, std::log(sum)};
}

}  // namespace

std::vector<double> logprobs(const PolicyParams& params, const TokenSeq& context,
                             const TokenSeq& response) {
  if (context.empty() || response.empty())
    throw error(errc::bad_shape, "logprobs requires nonempty context and response");
  check_tokens(params, context);
  check_tokens(params, response);

  std::vector<double> h(params.dims.d_h, 0.0), h_next(params.dims.d_h);
  std::vector<double> logits(params.dims.vocab);
  for (TokenId t : context) {
    recurrent_step(params, t, h, h_next);
    h.swap(h_next);
  }
  std::vector<double> out(response.size());
  for (size_t t = 0; t < response.size(); ++t) {
    output_logits(params, h, logits);
    double raw = logits[response[t]];
    auto sm = softmax_inplace(logits);
    out[t] = raw - sm.max_logit - sm.log_z;
    if (t + 1 < response.size()) {
      recurrent_step(params, response[t], h, h_next);
      h.swap(h_next);
    }
  }
  return out;
}

SampleResult sample(const PolicyParams& params, const TokenSeq& context, int max_len,
                    double temperature, uint64_t seed, TokenId eos, bool greedy) {
  if (context.empty()) throw error(errc::bad_shape, "sample requires a nonempty context");
  if (!greedy && !(temperature > 0.0))
    throw error(errc::bad_shape, "temperature must be positive");
  check_tokens(params, context);

  rng::Engine engine(seed);
  std::vector<double> h(params.dims.d_h, 0.0), h_next(params.dims.d_h);
  std::vector<double> logits(params.dims.vocab), probs(params.dims.vocab);
  for (TokenId t : context) {
    recurrent_step(params, t, h, h_next);
    h.swap(h_next);
  }

  SampleResult result;
  for (int step = 0; step < max_len; ++step) {
    output_logits(params, h, logits);
    TokenId choice;
    if (greedy) {
      choice = 0;
      for (int v = 1; v < params.dims.vocab; ++v)
        if (logits[v] > logits[choice]) choice = v;
    } else {
      for (int v = 0; v < params.dims.vocab; ++v) probs[v] = logits[v] / temperature;
      softmax_inplace(probs);
      choice = static_cast<TokenId>(engine.categorical(probs));
    }
    // record the temperature-1 log-probability of the chosen token
    double raw = logits[choice];
    auto sm = softmax_inplace(logits);
    result.response.push_back(choice);
    result.logprobs.push_back(raw - sm.max_logit - sm.log_z);
    if (choice == eos) break;
    recurrent_step(params, choice, h, h_next);
    h.swap(h_next);
  }
  return result;
}

std::vector<std::vector<double>> step_distributions(const PolicyParams& params,
                                                    const TokenSeq& context,
                                                    const TokenSeq& response) {
  if (context.empty() || response.empty())
    throw error(errc::bad_shape, "step_distributions requires nonempty context and response");
  check_tokens(params, context);
  check_tokens(params, response);

  std::vector<double> h(params.dims.d_h, 0.0), h_next(params.dims.d_h);
  std::vector<std::vector<double>> out;
  out.reserve(response.size());
  for (TokenId t : context) {
    recurrent_step(params, t, h, h_next);
    h.swap(h_next);
  }
  for (size_t t = 0; t < response.size(); ++t) {
    std::vector<double> probs(params.dims.vocab);
    output_logits(params, h, probs);
    softmax_inplace(probs);
    out.push_back(std::move(probs));
    if (t + 1 < response.size()) {
      recurrent_step(params, response[t], h, h_next);
      h.swap(h_next);
    }
  }
  return out;
}

std::vector<double> token_entropies(const PolicyParams& params, const TokenSeq& context,
                                    const TokenSeq& response) {
  auto dists = step_distributions(params, context, response);
  std::vector<double> out(dists.size());
  for (size_t t = 0; t < dists.size(); ++t) {
    double entropy = 0.0;
    for (double p : dists[t])
      if (p > 0.0) entropy -= p * std::log(p);
    out[t] = entropy;
  }
  return out;
}

void accumulate_weighted_logprob_grad(const PolicyParams& params, const TokenSeq& context,
                                      const TokenSeq& response, std::span<const double> weights,
                                      GradAccumulator& acc) {
  if (context.empty() || response.empty())
    throw error(errc::bad_shape, "gradient requires nonempty context and response");
  if (weights.size() != response.size())
    throw error(errc::bad_shape, "weights length must equal response length");
  check_tokens(params, context);
  check_tokens(params, response);

  const int d_h = params.dims.d_h;
  const int d_emb = params.dims.d_emb;
  const int vocab = params.dims.vocab;
  const size_t m = context.size();
  const size_t n_out = response.size();
  const size_t consumed = m + n_out - 1;  // the final response token is never fed back

  // forward pass, storing every hidden state and output distribution
  std::vector<TokenId> inputs;
  inputs.reserve(consumed);
  inputs.insert(inputs.end(), context.begin(), context.end());
  inputs.insert(inputs.end(), response.begin(), response.end() - 1);

  std::vector<std::vector<double>> h(consumed + 1, std::vector<double>(d_h, 0.0));
  for (size_t k = 0; k < consumed; ++k) recurrent_step(params, inputs[k], h[k], h[k + 1]);

  std::vector<std::vector<double>> probs(n_out, std::vector<double>(vocab));
  for (size_t t = 0; t < n_out; ++t) {
    output_logits(params, h[m + t], probs[t]);
    softmax_inplace(probs[t]);
  }

  // reverse sweep
  std::vector<double> dh(d_h, 0.0), dh_prev(d_h), da(d_h), dz(vocab);
  for (size_t j = consumed; j >= 1; --j) {
    if (j >= m) {
      const size_t t = j - m;
      const double w = weights[t];
      const auto& p = probs[t];
      for (int v = 0; v < vocab; ++v) dz[v] = -w * p[v];
      dz[response[t]] += w;
      const auto& hj = h[j];
      for (int v = 0; v < vocab; ++v) {
        const double g = dz[v];
        acc.b_out[v] += g;
        double* wo_acc = acc.w_out.data() + static_cast<size_t>(v) * d_h;
        const double* wo = params.w_out.data() + static_cast<size_t>(v) * d_h;
        for (int i = 0; i < d_h; ++i) {
          wo_acc[i] += g * hj[i];
          dh[i] += g * wo[i];
        }
      }
    }
    // through the tanh and the recurrence into step j-1
    const auto& hj = h[j];
    for (int i = 0; i < d_h; ++i) da[i] = dh[i] * (1.0 - hj[i] * hj[i]);

    const TokenId tok = inputs[j - 1];
    const double* emb = params.embedding.data() + static_cast<size_t>(tok) * d_emb;
    double* emb_acc = acc.embedding.data() + static_cast<size_t>(tok) * d_emb;
    const auto& h_prev = h[j - 1];
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (int i = 0; i < d_h; ++i) {
      const double g = da[i];
      acc.b_rec[i] += g;
      double* wi_acc = acc.w_in.data() + static_cast<size_t>(i) * d_emb;
      const double* wi = params.w_in.data() + static_cast<size_t>(i) * d_emb;
      for (int k = 0; k < d_emb; ++k) {
        wi_acc[k] += g * emb[k];
        emb_acc[k] += g * wi[k];
      }
      double* wr_acc = acc.w_rec.data() + static_cast<size_t>(i) * d_h;
      const double* wr = params.w_rec.data() + static_cast<size_t>(i) * d_h;
      for (int k = 0; k < d_h; ++k) {
        wr_acc[k] += g * h_prev[k];
        dh_prev[k] += g * wr[k];
      }
    }
    dh.swap(dh_prev);
  }
}

void adam_step(PolicyParams& params, const GradAccumulator& acc, OptimizerState& state) {
  if (acc.size() != params.size() || state.m.size() != params.size())
    throw error(errc::bad_shape, "optimizer state does not match parameter shapes");
  for (auto span : acc.tensors())
    for (double g : span)
      if (!std::isfinite(g)) throw error(errc::non_finite_gradient, "gradient is not finite");

  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  auto p_tensors = params.tensors();
  auto g_tensors = acc.tensors();
  size_t offset = 0;
  for (size_t t = 0; t < p_tensors.size(); ++t) {
    auto p = p_tensors[t];
    auto g = g_tensors[t];
    for (size_t i = 0; i < p.size(); ++i) {
      double& m = state.m[offset + i];
      double& v = state.v[offset + i];
      m = b1 * m + (1.0 - b1) * g[i];
      v = b2 * v + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p[i] += state.learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
    offset += p.size();
  }
}

namespace {

constexpr char kMagic[8] = {'G', 'O', 'L', 'F', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

void write_doubles(std::ostream& out, std::span<const double> values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::span<double> values) {
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
}

}  // namespace

void save_checkpoint(std::ostream& out, const PolicyParams& params, const OptimizerState& opt,
                     uint64_t trained_steps) {
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<uint32_t>(params.dims.vocab));
  write_pod(out, static_cast<uint32_t>(params.dims.d_emb));
  write_pod(out, static_cast<uint32_t>(params.dims.d_h));
  write_pod(out, trained_steps);
  for (auto span : params.tensors()) write_doubles(out, span);
  write_pod(out, static_cast<uint64_t>(opt.step));
  write_pod(out, opt.learning_rate);
  write_pod(out, opt.beta1);
  write_pod(out, opt.beta2);
  write_pod(out, opt.eps);
  write_doubles(out, opt.m);
  write_doubles(out, opt.v);
  if (!out) throw error(errc::io_failure, "failed to write checkpoint");
}

Checkpoint load_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw error(errc::io_failure, "not a checkpoint file");
  uint32_t version = 0, vocab = 0, d_emb = 0, d_h = 0;
  read_pod(in, version);
  if (version != kVersion) throw error(errc::io_failure, "unsupported checkpoint version");
  read_pod(in, vocab);
  read_pod(in, d_emb);
  read_pod(in, d_h);
  uint64_t trained_steps = 0;
  read_pod(in, trained_steps);

  PolicyDims dims{static_cast<int>(vocab), static_cast<int>(d_emb), static_cast<int>(d_h)};
  Checkpoint ckpt{PolicyParams::init(dims, 0), OptimizerState(dims), trained_steps};
  for (auto span : ckpt.params.tensors()) read_doubles(in, span);
  uint64_t opt_step = 0;
  read_pod(in, opt_step);
  ckpt.opt.step = static_cast<int64_t>(opt_step);
  read_pod(in, ckpt.opt.learning_rate);
  read_pod(in, ckpt.opt.beta1);
  read_pod(in, ckpt.opt.beta2);
  read_pod(in, ckpt.opt.eps);
  read_doubles(in, ckpt.opt.m);
  read_doubles(in, ckpt.opt.v);
  if (!in) throw error(errc::io_failure, "truncated checkpoint file");
  return ckpt;
}

void save_checkpoint_file(const std::string& path, const PolicyParams& params,
                          const OptimizerState& opt, uint64_t trained_steps) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_failure, "cannot open " + path + " for writing");
  save_checkpoint(out, params, opt, trained_steps);
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  return load_checkpoint(in);
}

}  // namespace golf::policy
