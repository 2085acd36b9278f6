#include "adacot/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adacot {

const char* to_string(ReasoningMode mode) {
  return mode == ReasoningMode::Long ? "long" : "short";
}

const char* to_string(PromptInstruction instruction) {
  switch (instruction) {
    case PromptInstruction::LongInstructed: return "long_instructed";
    case PromptInstruction::ShortInstructed: return "short_instructed";
    default: return "uninstructed";
  }
}

void validate_response(const RolloutResponse& response, const std::string& where) {
  if (response.length < 1) {
    throw std::invalid_argument(where + ": response length must be >= 1");
  }
  if (!response.tokens.empty() &&
      static_cast<long>(response.tokens.size()) != response.length) {
    throw std::invalid_argument(where + ": token count does not match length");
  }
  if (!response.old_logprobs.empty() &&
      response.old_logprobs.size() != response.tokens.size()) {
    throw std::invalid_argument(where + ": old_logprobs do not align with tokens");
  }
  if (response.shaped_reward && !std::isfinite(*response.shaped_reward)) {
    throw std::invalid_argument(where + ": shaped reward is not finite");
  }
}

RolloutGroup make_group(const PromptRecord& prompt,
                        std::vector<RolloutResponse> long_half,
                        std::vector<RolloutResponse> short_half) {
  if (long_half.empty() || short_half.empty()) {
    throw std::invalid_argument("make_group: both mode halves must be non-empty");
  }
  if (long_half.size() != short_half.size()) {
    throw std::invalid_argument(
        "make_group: length mismatch (" + std::to_string(long_half.size()) +
        " long vs " + std::to_string(short_half.size()) + " short)");
  }
  const std::string& id = long_half.front().prompt_id;
  auto check = [&](const RolloutResponse& r, ReasoningMode expected, std::size_t index) {
    const std::string where = "make_group: response " + std::to_string(index);
    validate_response(r, where);
    if (r.mode != expected) {
      throw std::invalid_argument(where + ": mode mismatch, expected " +
                                  to_string(expected));
    }
    if (r.prompt_id != id) {
      throw std::invalid_argument(where + ": prompt-id mismatch ('" + r.prompt_id +
                                  "' vs '" + id + "')");
    }
  };
  for (std::size_t i = 0; i < long_half.size(); ++i) {
    check(long_half[i], ReasoningMode::Long, i);
  }
  for (std::size_t i = 0; i < short_half.size(); ++i) {
    check(short_half[i], ReasoningMode::Short, long_half.size() + i);
  }

  RolloutGroup group;
  group.prompt = prompt;
  group.responses = std::move(long_half);
  group.responses.insert(group.responses.end(),
                         std::make_move_iterator(short_half.begin()),
                         std::make_move_iterator(short_half.end()));
  return group;
}

RolloutGroup make_group(std::vector<RolloutResponse> long_half,
                        std::vector<RolloutResponse> short_half) {
  PromptRecord prompt;
  if (!long_half.empty()) prompt.id = long_half.front().prompt_id;
  return make_group(prompt, std::move(long_half), std::move(short_half));
}

void validate_group(const RolloutGroup& group) {
  const std::size_t n = group.responses.size();
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("group: size must be even and >= 2, got " +
                                std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const RolloutResponse& r = group.responses[i];
    const std::string where = "group: response " + std::to_string(i);
    validate_response(r, where);
    const ReasoningMode expected =
        i < n / 2 ? ReasoningMode::Long : ReasoningMode::Short;
    if (r.mode != expected) {
      throw std::invalid_argument(where + ": mode mismatch, expected " +
                                  to_string(expected));
    }
    if (r.prompt_id != group.responses.front().prompt_id) {
      throw std::invalid_argument(where + ": prompt-id mismatch");
    }
  }
}

double short_accuracy(const RolloutGroup& group) {
  validate_group(group);
  const std::size_t half = group.half();
  std::size_t correct = 0;
  for (std::size_t i = half; i < group.responses.size(); ++i) {
    if (group.responses[i].correct) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(half);
}

MetricsRow compute_metrics(std::span<const RolloutResponse> responses) {
  if (responses.empty()) {
    throw std::invalid_argument("compute_metrics: empty response list");
  }
  MetricsRow row;
  for (const RolloutResponse& r : responses) {
    row.accuracy += r.correct ? 1.0 : 0.0;
    row.thinking_rate += r.mode == ReasoningMode::Long ? 1.0 : 0.0;
    row.avg_tokens += static_cast<double>(r.length);
  }
  const double n = static_cast<double>(responses.size());
  row.accuracy /= n;
  row.thinking_rate /= n;
  row.avg_tokens /= n;
  return row;
}

}  // namespace adacot
