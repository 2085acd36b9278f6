#include "adacot/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adacot {

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.clip_epsilon > 0.0 && cfg.clip_epsilon < 1.0)) {
    throw std::invalid_argument("optimizer: clip_epsilon must lie in (0, 1)");
  }
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw std::invalid_argument("optimizer: lambda must be finite and >= 0");
  }
  if (!(cfg.advantage_std_floor > 0.0)) {
    throw std::invalid_argument("optimizer: advantage_std_floor must be > 0");
  }
  if (!(cfg.kl_coeff >= 0.0)) {
    throw std::invalid_argument("optimizer: kl_coeff must be >= 0");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards,
                                     const OptimizerConfig& cfg) {
  validate(cfg);
  if (rewards.size() < 2) {
    throw std::invalid_argument("advantages: need at least 2 rewards, got " +
                                std::to_string(rewards.size()));
  }
  double mean = 0.0;
  for (double r : rewards) {
    if (!std::isfinite(r)) {
      throw std::invalid_argument("advantages: rewards must be finite");
    }
    mean += r;
  }
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) {
    var += (r - mean) * (r - mean);
  }
  var /= static_cast<double>(rewards.size());
  const double denom = std::max(std::sqrt(var), cfg.advantage_std_floor);

  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = (rewards[i] - mean) / denom;
  }
  return out;
}

SurrogateResult grpo_surrogate(const RolloutGroup& group,
                               std::span<const double> advantages,
                               const std::vector<std::vector<double>>& new_logprobs,
                               const OptimizerConfig& cfg) {
  validate(cfg);
  const std::size_t g = group.responses.size();
  if (advantages.size() != g) {
    throw std::invalid_argument("surrogate: advantages do not align with group");
  }
  if (new_logprobs.size() != g) {
    throw std::invalid_argument("surrogate: new_logprobs do not align with group");
  }

  SurrogateResult result;
  result.grad_new_logprobs.resize(g);
  const double lo = 1.0 - cfg.clip_epsilon;
  const double hi = 1.0 + cfg.clip_epsilon;

  for (std::size_t i = 0; i < g; ++i) {
    const RolloutResponse& response = group.responses[i];
    const std::vector<double>& old_lp = response.old_logprobs;
    const std::vector<double>& new_lp = new_logprobs[i];
    if (old_lp.size() != new_lp.size()) {
      throw std::invalid_argument("surrogate: response " + std::to_string(i) +
                                  " token log-probs misaligned (" +
                                  std::to_string(old_lp.size()) + " old vs " +
                                  std::to_string(new_lp.size()) + " new)");
    }
    if (old_lp.empty()) {
      throw std::invalid_argument("surrogate: response " + std::to_string(i) +
                                  " carries no log-probs");
    }
    const double adv = advantages[i];
    const double norm =
        1.0 / (static_cast<double>(g) * static_cast<double>(old_lp.size()));
    result.grad_new_logprobs[i].assign(old_lp.size(), 0.0);

    for (std::size_t t = 0; t < old_lp.size(); ++t) {
      const double rho = std::exp(new_lp[t] - old_lp[t]);
      const double clipped = std::clamp(rho, lo, hi);
      const double unclipped_term = rho * adv;
      const double clipped_term = clipped * adv;
      result.loss -= norm * std::min(unclipped_term, clipped_term);

      // d/dnew of the min: A*rho on the unclipped branch or inside the clip
      // interval; zero once the clipped branch saturates (boundaries count
      // as clipped).
      double grad = 0.0;
      if (unclipped_term < clipped_term || (rho > lo && rho < hi)) {
        grad = -norm * adv * rho;
      }
      if (cfg.kl_coeff > 0.0) {
        const double diff = old_lp[t] - new_lp[t];
        result.loss += cfg.kl_coeff * norm * (std::exp(diff) - diff - 1.0);
        grad += cfg.kl_coeff * norm * (1.0 - std::exp(diff));
      }
      result.grad_new_logprobs[i][t] = grad;
    }
  }
  if (!std::isfinite(result.loss)) {
    throw std::runtime_error("surrogate: loss is not finite");
  }
  return result;
}

double total_loss(double grpo_loss, double switch_loss, const OptimizerConfig& cfg) {
  if (!std::isfinite(grpo_loss) || !std::isfinite(switch_loss)) {
    throw std::invalid_argument("total_loss: inputs must be finite");
  }
  return grpo_loss + cfg.lambda * switch_loss;
}

}  // namespace adacot
