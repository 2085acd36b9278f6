#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adacot {

enum class ReasoningMode { Long, Short };

// How a prompt steers the sampled reasoning mode. Instructed prompts force
// the mode; uninstructed prompts leave it to the policy's first token.
enum class PromptInstruction { LongInstructed, ShortInstructed, Uninstructed };

const char* to_string(ReasoningMode mode);
const char* to_string(PromptInstruction instruction);

struct PromptRecord {
  std::string id;
  int class_index = 0;
  PromptInstruction instruction = PromptInstruction::Uninstructed;
};

// One sampled trajectory. `tokens` / `old_logprobs` may be empty for
// shaping-only records (offline logs without the full trace); when present
// they must have exactly `length` entries.
struct RolloutResponse {
  std::string prompt_id;
  ReasoningMode mode = ReasoningMode::Short;
  std::vector<int> tokens;
  long length = 0;
  bool correct = false;
  bool format_ok = true;
  std::vector<double> old_logprobs;
  std::optional<double> shaped_reward;
};

// Validates per-response invariants (length >= 1, token/logprob alignment,
// finite shaped reward). Throws std::invalid_argument with `where` in the
// message on violation.
void validate_response(const RolloutResponse& response, const std::string& where);

// The sampled set for one prompt: first half Long, second half Short.
struct RolloutGroup {
  PromptRecord prompt;
  std::vector<RolloutResponse> responses;

  std::size_t size() const { return responses.size(); }
  std::size_t half() const { return responses.size() / 2; }
};

struct MetricsRow {
  double accuracy = 0.0;
  double thinking_rate = 0.0;
  double avg_tokens = 0.0;
};

// Builds a group from its mode halves, long responses first. Rejects
// mismatched lengths, inconsistent modes, and mixed prompt ids.
RolloutGroup make_group(const PromptRecord& prompt,
                        std::vector<RolloutResponse> long_half,
                        std::vector<RolloutResponse> short_half);
RolloutGroup make_group(std::vector<RolloutResponse> long_half,
                        std::vector<RolloutResponse> short_half);

// Checks the half-and-half layout of an already-built group.
void validate_group(const RolloutGroup& group);

// Fraction of correct responses in the Short half.
double short_accuracy(const RolloutGroup& group);

MetricsRow compute_metrics(std::span<const RolloutResponse> responses);

}  // namespace adacot
