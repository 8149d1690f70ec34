#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace wisig {

/// Identifies what a random substream is used for.
enum class StreamPurpose : std::uint64_t {
  learning_set = 1,
  enrollment = 2,
  reference_subset = 3,
  synthetic_centroid = 4,
  synthetic_samples = 5,
};

/// Counter-style substream id: a SplitMix64 hash chain over the root seed and
/// the coordinates. Streams for different coordinates are unrelated, so adding
/// a coordinate value never perturbs existing streams.
std::uint64_t derive_stream(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;

/// Deterministic random source. Distributions are implemented here rather
/// than taken from <random>, whose distribution algorithms are
/// implementation-defined, so sequences are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal (Box-Muller).
  double normal();

  /// k distinct indices from [0, n) in selection order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wisig
