#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adacot/types.hpp"

namespace adacot {

// Which long responses the soft length penalty applies to.
enum class LengthPenaltyScope { CorrectLongOnly, AllLong };

// How a failed format check feeds into rewards.
enum class FormatPolicy { TreatAsIncorrect, NoCheck };

// Every tunable of the shaped reward: the short-accuracy threshold theta,
// the reward magnitudes, the warmup horizon, and the length-penalty knobs.
struct ShapingConfig {
  double theta = 0.5;
  double r_incorrect = -1.0;
  double r_base = 1.0;
  double r_bonus = 1.5;
  long warmup_steps = 0;
  // When set, the schedule drops back to r_base once warmup completes
  // instead of holding r_bonus. Off by default; the ramp-to-target schedule
  // is the one used for training.
  bool warmup_literal_tail = false;
  bool length_penalty_enabled = false;
  LengthPenaltyScope length_penalty_scope = LengthPenaltyScope::CorrectLongOnly;
  FormatPolicy format_policy = FormatPolicy::TreatAsIncorrect;
  // Optional hard generation cap; lengths beyond it are penalized -1.
  std::optional<long> hard_length_cap;
};

void validate(const ShapingConfig& cfg);

// Per-group length statistics feeding the soft length penalty:
// l_max is the maximum length over the whole group, l_min the average
// length of the Short half, l_delta their difference.
struct LengthStats {
  double l_max = 0.0;
  double l_min = 0.0;
  double l_delta = 0.0;
};

LengthStats group_length_stats(const RolloutGroup& group);

// Shaped reward split into its additive components.
struct ShapedReward {
  double total = 0.0;
  double base = 0.0;
  double length_penalty = 0.0;
};

// Minimal per-response inputs to shaping; shared by the in-memory and the
// streaming (rollout log) paths.
struct ResponseSignal {
  ReasoningMode mode = ReasoningMode::Short;
  bool correct = false;
  bool format_ok = true;
  long length = 0;
};

// Deterministic answer oracle: trims whitespace, compares numerically
// (relative tolerance 1e-9) when both sides parse as numbers, otherwise
// falls back to exact string comparison.
bool judge_correct(std::string_view answer_text, std::string_view reference);

// Long responses must open with a long marker and close it later; Short
// responses always pass. Empty token sequences fail.
bool check_format(const RolloutResponse& response,
                  std::span<const int> long_marker_ids,
                  std::span<const int> end_marker_ids);

// The adaptive group-wise reward. alpha is the group's short accuracy;
// short_bonus_now is the warmup-scheduled short bonus (r_base..r_bonus).
//   incorrect                 -> r_incorrect
//   correct, alpha >  theta   -> short_bonus_now (Short) / r_base  (Long)
//   correct, alpha <= theta   -> r_base          (Short) / r_bonus (Long)
double adaptive_reward(ReasoningMode mode, bool correct, double alpha,
                       const ShapingConfig& cfg, double short_bonus_now);

// Short-bonus warmup schedule: linear ramp from r_base to r_bonus over
// warmup_steps, then constant r_bonus (r_base with warmup_literal_tail).
double warmup_bonus(long current_step, const ShapingConfig& cfg);

// Soft length penalty in [-1, 0]: zero up to l_min, linear down to -1 at
// l_max, -1 beyond the hard cap when one is configured. Degenerate groups
// (l_delta == 0) are not penalized. Callers return 0 for Short responses.
double length_penalty(double response_length, const LengthStats& stats,
                      std::optional<long> hard_cap);

// Applies the full shaping pipeline to one group: format gating, adaptive
// reward with the warmup bonus for the given step, then the length penalty
// per the configured scope. Output order matches group order.
std::vector<ShapedReward> shape_group(const RolloutGroup& group,
                                      const ShapingConfig& cfg,
                                      long current_step);

// Same computation on bare signals laid out like a group (Long half first).
std::vector<ShapedReward> shape_signals(std::span<const ResponseSignal> signals,
                                        const ShapingConfig& cfg,
                                        long current_step);

}  // namespace adacot
