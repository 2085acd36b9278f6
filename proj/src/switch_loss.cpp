#include "adacot/switch_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace adacot {

void validate(const SwitchLossConfig& cfg) {
  if (cfg.long_token_ids.empty()) {
    throw std::invalid_argument("switch-loss: long_token_ids must be non-empty");
  }
  if (cfg.top_k < 1) {
    throw std::invalid_argument("switch-loss: top_k must be >= 1");
  }
  if (!(cfg.margin_easy >= 0.0) || !(cfg.margin_hard >= 0.0)) {
    throw std::invalid_argument("switch-loss: margins must be >= 0");
  }
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw std::invalid_argument("switch-loss: theta must lie in [0, 1]");
  }
}

FirstTokenPartition partition_first_token(std::span<const double> probs,
                                          const SwitchLossConfig& cfg) {
  validate(cfg);
  const std::set<int> long_set(cfg.long_token_ids.begin(), cfg.long_token_ids.end());
  for (int id : long_set) {
    if (id < 0 || static_cast<std::size_t>(id) >= probs.size()) {
      throw std::invalid_argument("switch-loss: long token id " +
                                  std::to_string(id) + " outside vocabulary of " +
                                  std::to_string(probs.size()));
    }
  }
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::fabs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "switch-loss: first-token probabilities sum to " + std::to_string(sum));
  }

  FirstTokenPartition partition;
  partition.vocab_size = probs.size();
  std::vector<int> rest;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int id = static_cast<int>(i);
    if (long_set.count(id)) {
      partition.long_members.push_back(id);
      partition.long_mass += probs[i];
    } else {
      rest.push_back(id);
    }
  }
  // Top-k of the remainder, largest probability first, smaller id on ties.
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });
  const std::size_t k = std::min<std::size_t>(rest.size(), cfg.top_k);
  partition.short_members.assign(rest.begin(), rest.begin() + k);
  for (int id : partition.short_members) {
    partition.short_mass += probs[id];
  }
  return partition;
}

double switch_loss_value(double long_mass, double short_mass, double alpha,
                         const SwitchLossConfig& cfg) {
  if (alpha >= cfg.theta) {
    return std::max(0.0, long_mass - short_mass + cfg.margin_easy);
  }
  return std::max(0.0, short_mass - long_mass + cfg.margin_hard);
}

SwitchLossResult mode_switch_loss(const FirstTokenPartition& partition,
                                  double alpha, const SwitchLossConfig& cfg) {
  validate(cfg);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("switch-loss: alpha must lie in [0, 1]");
  }
  SwitchLossResult result;
  result.loss =
      switch_loss_value(partition.long_mass, partition.short_mass, alpha, cfg);
  result.grad_probs.assign(partition.vocab_size, 0.0);
  if (result.loss <= 0.0) return result;

  // Active hinge: +1 on the mass being pushed down, -1 on the other side.
  const double long_sign = alpha >= cfg.theta ? 1.0 : -1.0;
  for (int id : partition.long_members) {
    result.grad_probs[id] = long_sign;
  }
  for (int id : partition.short_members) {
    result.grad_probs[id] = -long_sign;
  }
  return result;
}

}  // namespace adacot
