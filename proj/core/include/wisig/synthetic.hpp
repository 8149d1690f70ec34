#pragma once

#include <cstddef>
#include <cstdint>

#include "wisig/dataset.hpp"
#include "wisig/protocol.hpp"

namespace wisig {

/// Desk-scale stand-in for CNN signature features.
///
/// Each writer gets a centroid drawn uniformly from [0, separation]^dim.
/// Genuine samples are centroid + N(0, noise^2) per coordinate. Skilled
/// forgeries add a further N(0, skilled_offset^2) displacement, so with
/// skilled_offset = 0 they are distributed exactly like genuine samples.
/// Simple forgeries start from another writer's centroid moved halfway
/// toward the target's centroid, plus genuine-level noise.
///
/// Writers are numbered 1..n_writers; sample ids are "g01", "s01", "k01".
struct SyntheticSpec {
  std::size_t n_writers = 30;
  std::size_t genuine_per_writer = 24;
  std::size_t simple_per_writer = 10;
  std::size_t skilled_per_writer = 10;
  std::size_t dim = 32;
  double separation = 20.0;
  double noise = 1.0;
  double skilled_offset = 4.0;
  std::uint64_t seed = 0;

  /// Sample counts of the real corpora: Brazilian PUC-PR has 168 writers with
  /// 40 genuine, 10 simple and 10 skilled samples; GPDS has 881 writers with
  /// 24 genuine and 30 skilled samples.
  static SyntheticSpec shaped_like(DatasetKind kind);
};

/// Throws InvalidInput when a count, dim, separation or noise is not
/// positive, or skilled_offset is negative.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace wisig
