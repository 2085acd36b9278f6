#pragma once

#include <span>
#include <vector>

namespace adacot {

struct SwitchLossConfig {
  // Token ids whose first-token probability counts as long-mode mass.
  std::vector<int> long_token_ids{0};
  // Size of the competing short-side set: the k largest remaining
  // probabilities, recomputed at every evaluation.
  int top_k = 5;
  double margin_easy = 0.1;
  double margin_hard = 0.1;
  // Short-accuracy threshold; shared with the reward shaping config.
  double theta = 0.5;
};

void validate(const SwitchLossConfig& cfg);

// First-token probability mass split into the long-initiating group and the
// top-k of everything else.
struct FirstTokenPartition {
  double long_mass = 0.0;
  double short_mass = 0.0;
  std::vector<int> long_members;
  std::vector<int> short_members;
  std::size_t vocab_size = 0;
};

// Splits a first-token distribution. probs must sum to 1 within 1e-6 and
// cover every configured long token id. Ties in the top-k selection break
// toward the smaller token id.
FirstTokenPartition partition_first_token(std::span<const double> probs,
                                          const SwitchLossConfig& cfg);

struct SwitchLossResult {
  double loss = 0.0;
  // Partials with respect to each entry of the first-token probability
  // vector, holding the partition membership fixed. Zero outside both
  // member sets and whenever the hinge is inactive.
  std::vector<double> grad_probs;
};

// Margin-ranking loss steering the first-token mass:
//   alpha >= theta: max(0, long_mass - short_mass + margin_easy)
//   alpha <  theta: max(0, short_mass - long_mass + margin_hard)
SwitchLossResult mode_switch_loss(const FirstTokenPartition& partition,
                                  double alpha, const SwitchLossConfig& cfg);

// Loss value from the masses alone (fixed membership); the piece the
// gradient checks differentiate.
double switch_loss_value(double long_mass, double short_mass, double alpha,
                         const SwitchLossConfig& cfg);

}  // namespace adacot
