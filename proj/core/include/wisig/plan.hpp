#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wisig/protocol.hpp"
#include "wisig/synthetic.hpp"

namespace wisig {

/// A sweep plan file: `key = value` lines, `#` comments. Keys mirror
/// ProtocolConfig:
///
///   dataset = brazilian | gpds160 | gpds300 | synthetic
///   features = path/to/features.csv      (relative to the plan file)
///   seed, replications, gamma, c, tolerance, max_iterations, normalize_features
///   fusion = max,mean,median,min
///   n_reference = 1,5,10
///   development = 61-168, exploitation = 1-60
///   m_genuine_for_within, refs_for_between, impostors_per_writer,
///   reference_size, questioned_genuine, questioned_simple,
///   questioned_skilled, questioned_random
///   synthetic_development_writers, synthetic_exploitation_writers,
///   synthetic_dim, synthetic_separation, synthetic_noise,
///   synthetic_skilled_offset, synthetic_seed
///
/// Without `features` the data is generated: shaped like the real corpus for the
/// published protocols, from the synthetic_* settings otherwise.
struct SweepPlan {
  ProtocolConfig config = ProtocolConfig::synthetic();
  std::optional<std::filesystem::path> features;
  SyntheticSpec synthetic;
};

/// Throws ParseError (1-based line) on malformed lines, unknown or repeated
/// keys and bad values, and InvalidInput if the resulting config is invalid.
SweepPlan parse_plan(std::string_view text, const std::filesystem::path& base_dir = {});
SweepPlan load_plan(const std::filesystem::path& path);

/// Resolved settings as `key = value` lines, in parse_plan syntax.
std::string describe_config(const ProtocolConfig& config);

std::string format_size_list(const std::vector<std::size_t>& values);

}  // namespace wisig
