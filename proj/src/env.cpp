#include "adacot/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adacot/reward.hpp"
#include "adacot/rng.hpp"

namespace adacot {
namespace {

constexpr long kLongOverhead = 3;   // open marker + close marker + answer
constexpr long kShortOverhead = 2;  // start token + answer

void check_class(const SyntheticTask& task, int class_index) {
  if (class_index < 0 || class_index >= task.num_classes) {
    throw std::invalid_argument("task: class index " + std::to_string(class_index) +
                                " outside [0, " + std::to_string(task.num_classes) +
                                ")");
  }
}

}  // namespace

void validate(const SyntheticTask& task) {
  if (task.num_classes < 1) {
    throw std::invalid_argument("task: num_classes must be >= 1");
  }
  if (task.answer_vocab < 1) {
    throw std::invalid_argument("task: answer_vocab must be >= 1");
  }
  if (task.short_start_tokens < 1) {
    throw std::invalid_argument("task: short_start_tokens must be >= 1");
  }
  if (static_cast<int>(task.targets.size()) != task.num_classes) {
    throw std::invalid_argument("task: need one target per class");
  }
  for (int t : task.targets) {
    if (t < 0 || t >= task.answer_vocab) {
      throw std::invalid_argument("task: target " + std::to_string(t) +
                                  " outside answer vocabulary");
    }
  }
  std::vector<int> seen(task.num_classes, 0);
  for (const std::vector<int>& group : task.alias_groups) {
    if (group.empty()) {
      throw std::invalid_argument("task: empty alias group");
    }
    for (int c : group) {
      check_class(task, c);
      if (seen[c]++) {
        throw std::invalid_argument("task: class " + std::to_string(c) +
                                    " appears in more than one alias group");
      }
    }
  }
  for (int c = 0; c < task.num_classes; ++c) {
    if (!seen[c]) {
      throw std::invalid_argument("task: class " + std::to_string(c) +
                                  " missing from alias groups");
    }
  }
  const auto& [llo, lhi] = task.long_len_range;
  const auto& [slo, shi] = task.short_len_range;
  if (slo < kShortOverhead || shi < slo) {
    throw std::invalid_argument("task: short length range must satisfy " +
                                std::to_string(kShortOverhead) + " <= lo <= hi");
  }
  if (llo < kLongOverhead || lhi < llo) {
    throw std::invalid_argument("task: long length range must satisfy " +
                                std::to_string(kLongOverhead) + " <= lo <= hi");
  }
  if (llo < shi) {
    throw std::invalid_argument("task: long length minimum must be >= short maximum");
  }
}

int answer_token_base(const SyntheticTask& task) {
  return kShortStartBase + task.short_start_tokens;
}

int alias_group_of(const SyntheticTask& task, int class_index) {
  check_class(task, class_index);
  for (std::size_t g = 0; g < task.alias_groups.size(); ++g) {
    for (int c : task.alias_groups[g]) {
      if (c == class_index) return static_cast<int>(g);
    }
  }
  throw std::invalid_argument("task: class " + std::to_string(class_index) +
                              " missing from alias groups");
}

bool is_easy_class(const SyntheticTask& task, int class_index) {
  return task.alias_groups[alias_group_of(task, class_index)].size() == 1;
}

std::uint64_t task_hash(const SyntheticTask& task) {
  std::string canon = "C=" + std::to_string(task.num_classes) +
                      ";A=" + std::to_string(task.answer_vocab) +
                      ";S=" + std::to_string(task.short_start_tokens) + ";T=";
  for (int t : task.targets) canon += std::to_string(t) + ",";
  canon += ";G=";
  for (const std::vector<int>& group : task.alias_groups) {
    for (int c : group) canon += std::to_string(c) + ",";
    canon += "|";
  }
  canon += ";L=" + std::to_string(task.long_len_range.first) + "-" +
           std::to_string(task.long_len_range.second) +
           ";S=" + std::to_string(task.short_len_range.first) + "-" +
           std::to_string(task.short_len_range.second);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw std::invalid_argument("softmax: empty logits");
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - zmax);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> softmax_vjp(std::span<const double> probs,
                                std::span<const double> upstream) {
  if (probs.size() != upstream.size()) {
    throw std::invalid_argument("softmax_vjp: size mismatch");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    dot += probs[i] * upstream[i];
  }
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[i] = probs[i] * (upstream[i] - dot);
  }
  return out;
}

ToyPolicy ToyPolicy::zeros(const SyntheticTask& task) {
  validate(task);
  ToyPolicy policy;
  policy.num_classes_ = task.num_classes;
  policy.mode_vocab_ = 1 + task.short_start_tokens;
  policy.answer_vocab_ = task.answer_vocab;
  policy.num_groups_ = static_cast<int>(task.alias_groups.size());
  policy.class_to_group_.resize(task.num_classes);
  for (int c = 0; c < task.num_classes; ++c) {
    policy.class_to_group_[c] = adacot::alias_group_of(task, c);
  }
  const std::size_t count =
      static_cast<std::size_t>(task.num_classes) * policy.mode_vocab_ +
      static_cast<std::size_t>(task.num_classes) * task.answer_vocab +
      static_cast<std::size_t>(policy.num_groups_) * task.answer_vocab;
  policy.params_.assign(count, 0.0);
  return policy;
}

int ToyPolicy::alias_group_of(int class_index) const {
  if (class_index < 0 || class_index >= num_classes_) {
    throw std::invalid_argument("policy: class index out of range");
  }
  return class_to_group_[class_index];
}

std::size_t ToyPolicy::mode_head_offset(int class_index) const {
  return static_cast<std::size_t>(class_index) * mode_vocab_;
}

std::size_t ToyPolicy::long_head_offset(int class_index) const {
  return static_cast<std::size_t>(num_classes_) * mode_vocab_ +
         static_cast<std::size_t>(class_index) * answer_vocab_;
}

std::size_t ToyPolicy::short_head_offset(int group_index) const {
  return static_cast<std::size_t>(num_classes_) * mode_vocab_ +
         static_cast<std::size_t>(num_classes_) * answer_vocab_ +
         static_cast<std::size_t>(group_index) * answer_vocab_;
}

std::span<const double> ToyPolicy::mode_head(int class_index) const {
  return std::span<const double>(params_).subspan(mode_head_offset(class_index),
                                                  mode_vocab_);
}

std::span<const double> ToyPolicy::long_head(int class_index) const {
  return std::span<const double>(params_).subspan(long_head_offset(class_index),
                                                  answer_vocab_);
}

std::span<const double> ToyPolicy::short_head(int group_index) const {
  return std::span<const double>(params_).subspan(short_head_offset(group_index),
                                                  answer_vocab_);
}

namespace {

// Conditional distribution over the short-start entries of one mode head,
// i.e. the sampling distribution under an explicit short instruction.
std::vector<double> short_conditional(std::span<const double> mode_probs) {
  double mass = 0.0;
  for (std::size_t i = 1; i < mode_probs.size(); ++i) mass += mode_probs[i];
  std::vector<double> cond(mode_probs.size() - 1);
  for (std::size_t i = 1; i < mode_probs.size(); ++i) {
    cond[i - 1] = mode_probs[i] / mass;
  }
  return cond;
}

}  // namespace

RolloutResponse sample_response(const ToyPolicy& policy, const PromptRecord& prompt,
                                const SyntheticTask& task, std::mt19937_64& rng) {
  check_class(task, prompt.class_index);
  const std::vector<double> mode_probs =
      softmax(policy.mode_head(prompt.class_index));

  RolloutResponse response;
  response.prompt_id = prompt.id;

  int first_token = kLongOpenToken;
  double first_logprob = 0.0;
  switch (prompt.instruction) {
    case PromptInstruction::LongInstructed:
      response.mode = ReasoningMode::Long;
      break;
    case PromptInstruction::ShortInstructed: {
      const std::vector<double> cond = short_conditional(mode_probs);
      const int j = sample_categorical(rng, cond);
      response.mode = ReasoningMode::Short;
      first_token = kShortStartBase + j;
      first_logprob = std::log(cond[j]);
      break;
    }
    case PromptInstruction::Uninstructed: {
      const int idx = sample_categorical(rng, mode_probs);
      first_logprob = std::log(mode_probs[idx]);
      if (idx == 0) {
        response.mode = ReasoningMode::Long;
      } else {
        response.mode = ReasoningMode::Short;
        first_token = kShortStartBase + (idx - 1);
      }
      break;
    }
  }

  const bool is_long = response.mode == ReasoningMode::Long;
  const auto& range = is_long ? task.long_len_range : task.short_len_range;
  const long total_len = uniform_long(rng, range.first, range.second);
  const long overhead = is_long ? kLongOverhead : kShortOverhead;

  std::span<const double> answer_logits =
      is_long ? policy.long_head(prompt.class_index)
              : policy.short_head(policy.alias_group_of(prompt.class_index));
  const std::vector<double> answer_probs = softmax(answer_logits);
  const int answer = sample_categorical(rng, answer_probs);

  response.tokens.reserve(total_len);
  response.old_logprobs.assign(total_len, 0.0);
  response.tokens.push_back(first_token);
  response.old_logprobs[0] = first_logprob;
  for (long i = 0; i < total_len - overhead; ++i) {
    response.tokens.push_back(kFillerToken);
  }
  if (is_long) response.tokens.push_back(kLongCloseToken);
  response.tokens.push_back(answer_token_base(task) + answer);
  response.old_logprobs[total_len - 1] = std::log(answer_probs[answer]);
  response.length = total_len;

  response.correct = answer == task.targets[prompt.class_index];
  const int long_markers[] = {kLongOpenToken};
  const int end_markers[] = {kLongCloseToken};
  response.format_ok = check_format(response, long_markers, end_markers);
  return response;
}

double oracle_accuracy(const SyntheticTask& task, ReasoningMode mode,
                       int class_index) {
  validate(task);
  check_class(task, class_index);
  if (mode == ReasoningMode::Long) return 1.0;
  const std::vector<int>& group =
      task.alias_groups[alias_group_of(task, class_index)];
  // Best deterministic short answer for the group, scored group-wide.
  double best = 0.0;
  for (int candidate : group) {
    const int answer = task.targets[candidate];
    int hits = 0;
    for (int c : group) {
      if (task.targets[c] == answer) ++hits;
    }
    best = std::max(best,
                    static_cast<double>(hits) / static_cast<double>(group.size()));
  }
  return best;
}

std::vector<double> first_token_distribution(const ToyPolicy& policy,
                                             const PromptRecord& prompt) {
  if (prompt.instruction != PromptInstruction::Uninstructed) {
    throw std::invalid_argument(
        "first_token_distribution: prompt must be uninstructed");
  }
  return softmax(policy.mode_head(prompt.class_index));
}

ToyPolicy apply_gradient(const ToyPolicy& policy, std::span<const double> gradient,
                         double learning_rate) {
  if (gradient.size() != policy.param_count()) {
    throw std::invalid_argument(
        "apply_gradient: gradient length " + std::to_string(gradient.size()) +
        " does not match parameter count " + std::to_string(policy.param_count()));
  }
  ToyPolicy next = policy;
  std::span<double> params = next.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= learning_rate * gradient[i];
  }
  return next;
}

namespace {

int answer_index_of(const SyntheticTask& task, const RolloutResponse& response) {
  if (response.tokens.empty()) {
    throw std::invalid_argument("response carries no tokens");
  }
  const int answer = response.tokens.back() - answer_token_base(task);
  if (answer < 0 || answer >= task.answer_vocab) {
    throw std::invalid_argument("response does not end with an answer token");
  }
  return answer;
}

}  // namespace

std::vector<double> response_logprobs(const ToyPolicy& policy,
                                      const SyntheticTask& task,
                                      PromptInstruction instruction,
                                      int class_index,
                                      const RolloutResponse& response) {
  check_class(task, class_index);
  const int answer = answer_index_of(task, response);
  std::vector<double> out(response.tokens.size(), 0.0);

  const std::vector<double> mode_probs = softmax(policy.mode_head(class_index));
  const int first = response.tokens.front();
  switch (instruction) {
    case PromptInstruction::LongInstructed:
      break;  // forced, probability 1
    case PromptInstruction::ShortInstructed: {
      const std::vector<double> cond = short_conditional(mode_probs);
      out[0] = std::log(cond[first - kShortStartBase]);
      break;
    }
    case PromptInstruction::Uninstructed: {
      const int idx = first == kLongOpenToken ? 0 : 1 + (first - kShortStartBase);
      out[0] = std::log(mode_probs[idx]);
      break;
    }
  }

  std::span<const double> answer_logits =
      response.mode == ReasoningMode::Long
          ? policy.long_head(class_index)
          : policy.short_head(policy.alias_group_of(class_index));
  const std::vector<double> answer_probs = softmax(answer_logits);
  out.back() = std::log(answer_probs[answer]);
  return out;
}

void add_logprob_param_grad(const ToyPolicy& policy, const SyntheticTask& task,
                            PromptInstruction instruction, int class_index,
                            const RolloutResponse& response,
                            std::span<const double> token_coeffs,
                            std::span<double> grad_out) {
  check_class(task, class_index);
  if (token_coeffs.size() != response.tokens.size()) {
    throw std::invalid_argument("param grad: coefficients do not align with tokens");
  }
  if (grad_out.size() != policy.param_count()) {
    throw std::invalid_argument("param grad: output buffer size mismatch");
  }

  // First token: d log pi / d mode-head logits.
  const double c0 = token_coeffs.front();
  if (c0 != 0.0 && instruction != PromptInstruction::LongInstructed) {
    const std::vector<double> mode_probs = softmax(policy.mode_head(class_index));
    const std::size_t off = policy.mode_head_offset(class_index);
    const int first = response.tokens.front();
    if (instruction == PromptInstruction::ShortInstructed) {
      // Conditional over the short-start entries; the long logit cancels.
      const std::vector<double> cond = short_conditional(mode_probs);
      const int j = first - kShortStartBase;
      for (std::size_t i = 0; i < cond.size(); ++i) {
        const double indicator = static_cast<int>(i) == j ? 1.0 : 0.0;
        grad_out[off + 1 + i] += c0 * (indicator - cond[i]);
      }
    } else {
      const int idx = first == kLongOpenToken ? 0 : 1 + (first - kShortStartBase);
      for (std::size_t i = 0; i < mode_probs.size(); ++i) {
        const double indicator = static_cast<int>(i) == idx ? 1.0 : 0.0;
        grad_out[off + i] += c0 * (indicator - mode_probs[i]);
      }
    }
  }

  // Answer token: d log pi / d answer-head logits.
  const double ca = token_coeffs.back();
  if (ca != 0.0) {
    const int answer = answer_index_of(task, response);
    const bool is_long = response.mode == ReasoningMode::Long;
    const std::size_t off =
        is_long ? policy.long_head_offset(class_index)
                : policy.short_head_offset(policy.alias_group_of(class_index));
    std::span<const double> logits =
        is_long ? policy.long_head(class_index)
                : policy.short_head(policy.alias_group_of(class_index));
    const std::vector<double> probs = softmax(logits);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double indicator = static_cast<int>(i) == answer ? 1.0 : 0.0;
      grad_out[off + i] += ca * (indicator - probs[i]);
    }
  }
}

}  // namespace adacot
