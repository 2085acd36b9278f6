#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adacot/types.hpp"

namespace adacot {

// Token layout of the synthetic vocabulary. The first-token ("mode head")
// vocabulary is [long open, short starts...]; answers sit after the short
// starts in the global id space.
inline constexpr int kLongOpenToken = 0;
inline constexpr int kLongCloseToken = 1;
inline constexpr int kFillerToken = 2;
inline constexpr int kShortStartBase = 3;

// A desk-scale task: classes with one correct answer token each. Classes
// sharing a multi-class alias group are "hard": short mode observes only
// the group id, so no short answer distribution can solve all of them.
struct SyntheticTask {
  int num_classes = 0;
  int answer_vocab = 0;
  std::vector<int> targets;
  std::vector<std::vector<int>> alias_groups;
  int short_start_tokens = 1;
  // Inclusive total-length ranges per mode (long covers open/close markers
  // and the answer; short covers the start token and the answer).
  std::pair<long, long> long_len_range{8, 16};
  std::pair<long, long> short_len_range{3, 6};
};

void validate(const SyntheticTask& task);

int answer_token_base(const SyntheticTask& task);
int alias_group_of(const SyntheticTask& task, int class_index);
bool is_easy_class(const SyntheticTask& task, int class_index);

// Stable fingerprint of the task definition; stored in policy checkpoints.
std::uint64_t task_hash(const SyntheticTask& task);

std::vector<double> softmax(std::span<const double> logits);
// Backpropagates upstream/d(probs) to d(logits) for p = softmax(logits).
std::vector<double> softmax_vjp(std::span<const double> probs,
                                std::span<const double> upstream);

// Tabular policy: per-class first-token logits plus per-class (long) and
// per-alias-group (short) answer logits, flattened into one parameter
// vector laid out [mode heads | long answer heads | short answer heads].
class ToyPolicy {
 public:
  ToyPolicy() = default;

  static ToyPolicy zeros(const SyntheticTask& task);

  int num_classes() const { return num_classes_; }
  int mode_vocab() const { return mode_vocab_; }
  int answer_vocab() const { return answer_vocab_; }
  int num_alias_groups() const { return num_groups_; }
  int alias_group_of(int class_index) const;

  std::size_t param_count() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  std::size_t mode_head_offset(int class_index) const;
  std::size_t long_head_offset(int class_index) const;
  std::size_t short_head_offset(int group_index) const;

  std::span<const double> mode_head(int class_index) const;
  std::span<const double> long_head(int class_index) const;
  std::span<const double> short_head(int group_index) const;

 private:
  int num_classes_ = 0;
  int mode_vocab_ = 0;
  int answer_vocab_ = 0;
  int num_groups_ = 0;
  std::vector<int> class_to_group_;
  std::vector<double> params_;
};

// Samples one trajectory. Instructed prompts force the mode; uninstructed
// prompts sample the first token from the mode head. Filler tokens are
// deterministic, so log-probability mass sits only on the sampled mode
// token (when sampled) and the answer token.
RolloutResponse sample_response(const ToyPolicy& policy, const PromptRecord& prompt,
                                const SyntheticTask& task, std::mt19937_64& rng);

// Best achievable expected accuracy for a class under a mode, by
// enumeration over the alias group's targets: 1.0 for long mode and for
// easy classes; the best single short-head answer averaged over the group
// otherwise.
double oracle_accuracy(const SyntheticTask& task, ReasoningMode mode,
                       int class_index);

// Softmax of the mode head for an uninstructed prompt's class.
std::vector<double> first_token_distribution(const ToyPolicy& policy,
                                             const PromptRecord& prompt);

// Plain gradient-descent update: params - learning_rate * gradient.
ToyPolicy apply_gradient(const ToyPolicy& policy, std::span<const double> gradient,
                         double learning_rate);

// Per-token log-probabilities of an existing response under the current
// policy, evaluated with the same instruction conditioning it was sampled
// with. Deterministic tokens get exactly 0.
std::vector<double> response_logprobs(const ToyPolicy& policy,
                                      const SyntheticTask& task,
                                      PromptInstruction instruction,
                                      int class_index,
                                      const RolloutResponse& response);

// Accumulates sum_t coeff[t] * d log pi(token_t) / d params into grad_out.
// Only the stochastic positions (mode token, answer token) touch
// parameters; deterministic filler contributes nothing.
void add_logprob_param_grad(const ToyPolicy& policy, const SyntheticTask& task,
                            PromptInstruction instruction, int class_index,
                            const RolloutResponse& response,
                            std::span<const double> token_coeffs,
                            std::span<double> grad_out);

}  // namespace adacot
