#pragma once

#include <span>
#include <vector>

#include "adacot/types.hpp"

namespace adacot {

struct OptimizerConfig {
  double clip_epsilon = 0.2;
  // Weight of the mode-switch loss in the combined objective.
  double lambda = 0.1;
  double advantage_std_floor = 1e-6;
  double kl_coeff = 0.0;
};

void validate(const OptimizerConfig& cfg);

// Group-relative advantages: (r - mean) / max(std, floor) with the
// population standard deviation. All-equal groups come out as all zeros.
std::vector<double> group_advantages(std::span<const double> rewards,
                                     const OptimizerConfig& cfg);

// Loss value plus exact partial derivatives with respect to the fresh
// per-token log-probabilities it was evaluated at.
struct SurrogateResult {
  double loss = 0.0;
  std::vector<std::vector<double>> grad_new_logprobs;
};

// Clipped policy-gradient surrogate over one group, length-normalized per
// response:
//   loss = -(1/G) sum_i (1/|o_i|) sum_t min(rho*A_i, clip(rho,1-e,1+e)*A_i)
// with rho = exp(new - old). When kl_coeff > 0 an approximate KL penalty
// (exp(old-new) - (old-new) - 1 per token, same normalization) is added.
// At clip boundaries the gradient takes the clipped (zero) branch.
SurrogateResult grpo_surrogate(const RolloutGroup& group,
                               std::span<const double> advantages,
                               const std::vector<std::vector<double>>& new_logprobs,
                               const OptimizerConfig& cfg);

// Combined objective: grpo_loss + lambda * switch_loss.
double total_loss(double grpo_loss, double switch_loss, const OptimizerConfig& cfg);

// One training step's losses and the flat parameter gradient behind them.
struct LossBundle {
  double grpo_loss = 0.0;
  double switch_loss = 0.0;
  double total = 0.0;
  std::vector<double> gradient;
};

}  // namespace adacot
