#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace wisig {

/// How partial decision scores (one per reference) are combined.
enum class FusionRule { max, mean, median, min };

inline constexpr std::array<FusionRule, 4> kAllFusionRules = {
    FusionRule::max, FusionRule::mean, FusionRule::median, FusionRule::min};

std::string_view to_string(FusionRule rule) noexcept;
std::optional<FusionRule> parse_fusion_rule(std::string_view text) noexcept;

/// Combines per-reference scores into one. The median of an even-length list
/// is the mean of the two central order statistics.
/// Throws InvalidInput on an empty list or non-finite scores.
double fuse(std::span<const double> scores, FusionRule rule);

}  // namespace wisig
