#include "adacot/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace adacot {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

bool contains(std::span<const int> ids, int token) {
  return std::find(ids.begin(), ids.end(), token) != ids.end();
}

}  // namespace

void validate(const ShapingConfig& cfg) {
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw std::invalid_argument("shaping: theta must lie in [0, 1]");
  }
  if (!(cfg.r_incorrect < cfg.r_base && cfg.r_base < cfg.r_bonus)) {
    throw std::invalid_argument(
        "shaping: reward magnitudes must satisfy r_incorrect < r_base < r_bonus");
  }
  if (cfg.warmup_steps < 0) {
    throw std::invalid_argument("shaping: warmup_steps must be >= 0");
  }
  if (cfg.hard_length_cap && *cfg.hard_length_cap < 1) {
    throw std::invalid_argument("shaping: hard_length_cap must be >= 1");
  }
}

bool judge_correct(std::string_view answer_text, std::string_view reference) {
  const std::string_view a = trim(answer_text);
  const std::string_view b = trim(reference);
  double av = 0.0;
  double bv = 0.0;
  if (parse_number(a, av) && parse_number(b, bv)) {
    return std::fabs(av - bv) <= 1e-9 * std::max(std::fabs(av), std::fabs(bv));
  }
  return a == b;
}

bool check_format(const RolloutResponse& response,
                  std::span<const int> long_marker_ids,
                  std::span<const int> end_marker_ids) {
  if (response.tokens.empty()) return false;
  if (response.mode == ReasoningMode::Short) return true;
  if (!contains(long_marker_ids, response.tokens.front())) return false;
  for (std::size_t i = 1; i < response.tokens.size(); ++i) {
    if (contains(end_marker_ids, response.tokens[i])) return true;
  }
  return false;
}

double adaptive_reward(ReasoningMode mode, bool correct, double alpha,
                       const ShapingConfig& cfg, double short_bonus_now) {
  if (!correct) return cfg.r_incorrect;
  if (alpha > cfg.theta) {
    return mode == ReasoningMode::Short ? short_bonus_now : cfg.r_base;
  }
  return mode == ReasoningMode::Short ? cfg.r_base : cfg.r_bonus;
}

double warmup_bonus(long current_step, const ShapingConfig& cfg) {
  if (current_step < cfg.warmup_steps) {
    const double frac =
        static_cast<double>(current_step) / static_cast<double>(cfg.warmup_steps);
    return frac * (cfg.r_bonus - cfg.r_base) + cfg.r_base;
  }
  return cfg.warmup_literal_tail ? cfg.r_base : cfg.r_bonus;
}

double length_penalty(double response_length, const LengthStats& stats,
                      std::optional<long> hard_cap) {
  if (hard_cap && response_length > static_cast<double>(*hard_cap)) return -1.0;
  if (stats.l_delta <= 0.0) return 0.0;
  const double threshold = stats.l_max - stats.l_delta;  // == l_min
  if (response_length <= threshold) return 0.0;
  const double p = (threshold - response_length) / stats.l_delta;
  return std::clamp(p, -1.0, 0.0);
}

LengthStats group_length_stats(const RolloutGroup& group) {
  validate_group(group);
  LengthStats stats;
  double short_sum = 0.0;
  const std::size_t half = group.half();
  for (std::size_t i = 0; i < group.responses.size(); ++i) {
    const double len = static_cast<double>(group.responses[i].length);
    stats.l_max = std::max(stats.l_max, len);
    if (i >= half) short_sum += len;
  }
  stats.l_min = short_sum / static_cast<double>(half);
  stats.l_delta = stats.l_max - stats.l_min;
  return stats;
}

std::vector<ShapedReward> shape_signals(std::span<const ResponseSignal> signals,
                                        const ShapingConfig& cfg,
                                        long current_step) {
  validate(cfg);
  const std::size_t n = signals.size();
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("shape: group size must be even and >= 2, got " +
                                std::to_string(n));
  }
  const std::size_t half = n / 2;
  LengthStats stats;
  std::size_t short_correct = 0;
  double short_len_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ResponseSignal& s = signals[i];
    if (s.length < 1) {
      throw std::invalid_argument("shape: response " + std::to_string(i) +
                                  " has length < 1");
    }
    const ReasoningMode expected =
        i < half ? ReasoningMode::Long : ReasoningMode::Short;
    if (s.mode != expected) {
      throw std::invalid_argument("shape: response " + std::to_string(i) +
                                  " mode mismatch, expected " + to_string(expected));
    }
    stats.l_max = std::max(stats.l_max, static_cast<double>(s.length));
    if (i >= half) {
      short_len_sum += static_cast<double>(s.length);
      if (s.correct) ++short_correct;
    }
  }
  stats.l_min = short_len_sum / static_cast<double>(half);
  stats.l_delta = stats.l_max - stats.l_min;

  const double alpha =
      static_cast<double>(short_correct) / static_cast<double>(half);
  const double bonus_now = warmup_bonus(current_step, cfg);

  std::vector<ShapedReward> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ResponseSignal& s = signals[i];
    const bool effective_correct =
        s.correct &&
        !(cfg.format_policy == FormatPolicy::TreatAsIncorrect && !s.format_ok);
    ShapedReward r;
    r.base = adaptive_reward(s.mode, effective_correct, alpha, cfg, bonus_now);
    if (cfg.length_penalty_enabled && s.mode == ReasoningMode::Long) {
      const bool eligible =
          cfg.length_penalty_scope == LengthPenaltyScope::AllLong ||
          effective_correct;
      if (eligible) {
        r.length_penalty = length_penalty(static_cast<double>(s.length), stats,
                                          cfg.hard_length_cap);
      }
    }
    r.total = r.base + r.length_penalty;
    out[i] = r;
  }
  return out;
}

std::vector<ShapedReward> shape_group(const RolloutGroup& group,
                                      const ShapingConfig& cfg,
                                      long current_step) {
  validate_group(group);
  std::vector<ResponseSignal> signals(group.responses.size());
  for (std::size_t i = 0; i < group.responses.size(); ++i) {
    const RolloutResponse& r = group.responses[i];
    signals[i] = ResponseSignal{r.mode, r.correct, r.format_ok, r.length};
  }
  return shape_signals(signals, cfg, current_step);
}

}  // namespace adacot
