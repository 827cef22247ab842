#pragma once

#include <span>

#include "golf/policy.hpp"
#include "golf/types.hpp"

namespace golf::sft {

// A supervised imitation example: the original prompt as context (not the
// refinement prompt) and a successful refinement as target.
struct SftExample {
  TokenSeq context;
  TokenSeq target;
};

/// loss = -coefficient * mean over examples of the per-token-mean target
/// log-likelihood. The accumulator receives the gradient of the negated loss
/// so the shared ascent step minimizes it. Throws no_examples on an empty
/// set.
double sft_loss_and_grad(const policy::PolicyParams& params, std::span<const SftExample> examples,
                         double coefficient, policy::GradAccumulator& acc);

}  // namespace golf::sft
