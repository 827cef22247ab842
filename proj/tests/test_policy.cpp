#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "golf/policy.hpp"
#include "golf/rng.hpp"
#include "test_oracles.hpp"

using namespace golf;
using namespace golf::policy;

namespace {

PolicyParams zero_params(PolicyDims dims) {
  PolicyParams p = PolicyParams::init(dims, 0);
  for (auto span : p.tensors())
    for (double& x : span) x = 0.0;
  return p;
}

}  // namespace

TEST_CASE("parameter budget stays under the limit") {
  PolicyParams p = PolicyParams::init({64, 32, 64}, 1);
  CHECK(p.size() < 100000);
  for (auto span : p.tensors())
    for (double x : span) CHECK(std::isfinite(x));
}

TEST_CASE("logprobs are finite log-probabilities") {
  PolicyParams p = PolicyParams::init({64, 32, 64}, 3, 0.2);
  TokenSeq ctx = {32, 5, 34};
  TokenSeq resp = {10, 11, 33};
  auto lps = logprobs(p, ctx, resp);
  REQUIRE(lps.size() == resp.size());
  for (double lp : lps) {
    CHECK(lp <= 0.0);
    CHECK(std::isfinite(lp));
  }
  CHECK_THROWS_AS(logprobs(p, ctx, {64}), error);  // token outside vocab
  CHECK_THROWS_AS(logprobs(p, {}, resp), error);
}

TEST_CASE("uniform-output parameters give -ln V everywhere") {
  PolicyParams p = zero_params({64, 32, 64});
  auto lps = logprobs(p, {32, 34}, {1, 2, 3, 4});
  for (double lp : lps) CHECK(lp == doctest::Approx(-std::log(64.0)).epsilon(1e-12));
}

TEST_CASE("per-step probability vectors sum to 1") {
  rng::Engine engine(17);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    PolicyParams p = PolicyParams::init({64, 32, 64}, seed, 0.5);
    TokenSeq ctx = {32, static_cast<TokenId>(engine.uniform_int(64)), 34};
    TokenSeq resp = {static_cast<TokenId>(engine.uniform_int(64)), 33};
    for (const auto& dist : step_distributions(p, ctx, resp)) {
      const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
      CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    // exp of logprobs equals exported probabilities
    auto lps = logprobs(p, ctx, resp);
    auto dists = step_distributions(p, ctx, resp);
    for (size_t t = 0; t < resp.size(); ++t)
      CHECK(std::fabs(std::exp(lps[t]) - dists[t][resp[t]]) < 1e-14);
  }
}

TEST_CASE("sampling is deterministic and records matching logprobs") {
  PolicyParams p = PolicyParams::init({64, 32, 64}, 5, 0.3);
  TokenSeq ctx = {32, 7, 34};
  auto a = sample(p, ctx, 16, 1.0, 99, 33);
  auto b = sample(p, ctx, 16, 1.0, 99, 33);
  CHECK(a.response == b.response);
  CHECK(a.logprobs == b.logprobs);

  // rescoring reproduces the recorded behavior logprobs
  auto rescored = logprobs(p, ctx, a.response);
  REQUIRE(rescored.size() == a.logprobs.size());
  for (size_t t = 0; t < rescored.size(); ++t)
    CHECK(std::fabs(rescored[t] - a.logprobs[t]) < 1e-12);
}

TEST_CASE("greedy sampling emits the argmax token") {
  PolicyParams p = PolicyParams::init({16, 4, 6}, 8, 0.4);
  TokenSeq ctx = {1, 2};
  auto greedy = sample(p, ctx, 5, 1.0, 1, 15, true);
  auto dists = step_distributions(p, ctx, greedy.response);
  for (size_t t = 0; t < greedy.response.size(); ++t) {
    const auto& dist = dists[t];
    const TokenId argmax = static_cast<TokenId>(
        std::max_element(dist.begin(), dist.end()) - dist.begin());
    CHECK(greedy.response[t] == argmax);
  }
  // identical across seeds
  CHECK(sample(p, ctx, 5, 1.0, 2, 15, true).response == greedy.response);
}

TEST_CASE("first-token frequencies match the multinomial oracle at 5 sigma") {
  PolicyParams p = zero_params({64, 8, 8});
  const int draws = 10000;
  const double prob = 1.0 / 64.0;
  std::vector<int> counts(64, 0);
  for (int i = 0; i < draws; ++i) {
    auto s = sample(p, {32}, 1, 1.0, rng::mix(1234, static_cast<uint64_t>(i)), 33);
    REQUIRE(s.response.size() == 1);
    counts[s.response[0]]++;
  }
  const double sigma = std::sqrt(draws * prob * (1.0 - prob));
  for (int v = 0; v < 64; ++v)
    CHECK(std::fabs(counts[v] - draws * prob) <= 5.0 * sigma);
}

TEST_CASE("token entropies match the direct summation oracle") {
  PolicyParams uniform = zero_params({64, 32, 64});
  auto hs = token_entropies(uniform, {32, 34}, {1, 2, 3});
  for (double h : hs) CHECK(h == doctest::Approx(std::log(64.0)).epsilon(1e-12));

  // saturating logits drive the entropy toward zero
  PolicyParams sharp = zero_params({8, 4, 4});
  sharp.b_out[3] = 1e4;
  auto sharp_h = token_entropies(sharp, {0}, {3});
  CHECK(sharp_h[0] == doctest::Approx(0.0).epsilon(1e-9));

  PolicyParams p = PolicyParams::init({32, 8, 12}, 21, 0.6);
  TokenSeq ctx = {1, 2, 3};
  TokenSeq resp = {4, 5, 6, 7};
  auto entropies = token_entropies(p, ctx, resp);
  auto dists = step_distributions(p, ctx, resp);
  for (size_t t = 0; t < resp.size(); ++t) {
    double direct = 0.0;
    for (double q : dists[t])
      if (q > 0.0) direct -= q * std::log(q);
    CHECK(std::fabs(entropies[t] - direct) < 1e-10);
  }
}

TEST_CASE("weighted logprob gradient: zero weights and linearity") {
  PolicyParams p = test::tiny_policy(2);
  TokenSeq ctx = {0, 1};
  TokenSeq resp = {2, 3, 6};

  GradAccumulator acc(p.dims);
  std::vector<double> zeros(resp.size(), 0.0);
  accumulate_weighted_logprob_grad(p, ctx, resp, zeros, acc);
  for (double g : test::flatten(acc)) CHECK(g == 0.0);

  std::vector<double> w = {0.3, -0.7, 1.1};
  GradAccumulator twice(p.dims), once(p.dims);
  accumulate_weighted_logprob_grad(p, ctx, resp, w, twice);
  accumulate_weighted_logprob_grad(p, ctx, resp, w, twice);
  std::vector<double> dbl = {0.6, -1.4, 2.2};
  accumulate_weighted_logprob_grad(p, ctx, resp, dbl, once);
  auto a = test::flatten(twice), b = test::flatten(once);
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-12);

  std::vector<double> short_w = {1.0};
  CHECK_THROWS_AS(accumulate_weighted_logprob_grad(p, ctx, resp, short_w, acc), error);
}

TEST_CASE("weighted logprob gradient matches finite differences") {
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    PolicyParams p = test::tiny_policy(seed);
    TokenSeq ctx = {0, 5, 1};
    TokenSeq resp = {2, 3, 6, 4};
    std::vector<double> w = {0.5, -1.0, 0.25, 2.0};

    GradAccumulator acc(p.dims);
    accumulate_weighted_logprob_grad(p, ctx, resp, w, acc);

    auto objective = [&](const PolicyParams& q) {
      auto lps = logprobs(q, ctx, resp);
      double sum = 0.0;
      for (size_t t = 0; t < lps.size(); ++t) sum += w[t] * lps[t];
      return sum;
    };
    auto fd = test::fd_gradient(p, objective);
    CHECK(test::max_scaled_error(test::flatten(acc), fd) < 1e-5);
  }
}

TEST_CASE("adam_step closed-form first step and no-op cases") {
  PolicyDims dims{2, 1, 1};  // a handful of scalar parameters
  PolicyParams p = zero_params(dims);
  OptimizerState state(dims, 0.001);
  GradAccumulator acc(dims);

  // zero gradient from a fresh state leaves parameters unchanged
  PolicyParams before = p;
  adam_step(p, acc, state);
  CHECK(p.b_out == before.b_out);
  CHECK(p.w_rec == before.w_rec);

  // g = 1 for one step from a fresh state moves a coordinate by ~lr
  OptimizerState fresh(dims, 0.001);
  acc.b_out[0] = 1.0;
  adam_step(p, acc, fresh);
  CHECK(p.b_out[0] == doctest::Approx(0.001).epsilon(1e-6));

  acc.b_out[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(p, acc, state), error);
}

TEST_CASE("adam runs are bit-identical across repeats") {
  auto run = [] {
    PolicyParams p = PolicyParams::init({16, 4, 6}, 7);
    OptimizerState state(p.dims, 0.01);
    TokenSeq ctx = {1, 2};
    for (int step = 0; step < 5; ++step) {
      GradAccumulator acc(p.dims);
      auto s = sample(p, ctx, 6, 1.0, rng::mix(42, static_cast<uint64_t>(step)), 15);
      std::vector<double> w(s.response.size(), 0.5);
      accumulate_weighted_logprob_grad(p, ctx, s.response, w, acc);
      adam_step(p, acc, state);
    }
    return p;
  };
  PolicyParams a = run(), b = run();
  auto ta = a.tensors(), tb = b.tensors();
  for (size_t i = 0; i < ta.size(); ++i)
    for (size_t j = 0; j < ta[i].size(); ++j) CHECK(ta[i][j] == tb[i][j]);
}

TEST_CASE("snapshot stays untouched while params update") {
  PolicyParams p = PolicyParams::init({16, 4, 6}, 9);
  PolicyParams snapshot = p;
  OptimizerState state(p.dims, 0.05);
  GradAccumulator acc(p.dims);
  std::vector<double> w = {1.0, 1.0};
  accumulate_weighted_logprob_grad(p, {1}, {2, 3}, w, acc);
  adam_step(p, acc, state);
  CHECK(snapshot.b_out != p.b_out);
  auto fresh = PolicyParams::init({16, 4, 6}, 9);
  CHECK(snapshot.b_out == fresh.b_out);
  CHECK(snapshot.w_rec == fresh.w_rec);
}

TEST_CASE("checkpoint round trip preserves every byte of state") {
  PolicyParams p = PolicyParams::init({16, 4, 6}, 10, 0.2);
  OptimizerState state(p.dims, 0.003);
  state.step = 17;
  for (size_t i = 0; i < state.m.size(); ++i) {
    state.m[i] = 0.01 * static_cast<double>(i);
    state.v[i] = 0.001 * static_cast<double>(i);
  }

  std::stringstream buf;
  save_checkpoint(buf, p, state, 42);
  Checkpoint ckpt = load_checkpoint(buf);

  CHECK(ckpt.trained_steps == 42);
  CHECK(ckpt.opt.step == 17);
  CHECK(ckpt.opt.learning_rate == 0.003);
  CHECK(ckpt.opt.m == state.m);
  CHECK(ckpt.opt.v == state.v);
  auto ta = p.tensors(), tb = ckpt.params.tensors();
  for (size_t i = 0; i < ta.size(); ++i)
    for (size_t j = 0; j < ta[i].size(); ++j) CHECK(ta[i][j] == tb[i][j]);

  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(load_checkpoint(junk), error);
}
