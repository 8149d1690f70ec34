#pragma once

#include <span>
#include <vector>

#include "wisig/types.hpp"

namespace wisig {

/// Maps a pair of feature vectors into the dissimilarity space:
/// result[k] = |a[k] - b[k]|. Symmetric; a vector against itself gives the
/// origin. Throws InvalidInput on dimension mismatch.
FeatureVector dichotomy_transform(const FeatureVector& a, const FeatureVector& b);

/// All unordered pairs (j < k) of one writer's genuine samples, labelled
/// within. Output order is (j, k) lexicographic over the input order.
///
/// Throws EmptyResult for fewer than two samples and InvalidInput for mixed
/// writers or non-genuine samples.
std::vector<DissimilarityVector> within_pairs(std::span<const SignatureSample> samples);

/// Every reference against every impostor, labelled between. Output is
/// reference-major. Throws InvalidInput if a writer appears on both sides.
std::vector<DissimilarityVector> between_pairs(std::span<const SignatureSample> references,
                                               std::span<const SignatureSample> impostors);

/// L2-normalised copy of `v`; the zero vector is returned unchanged.
FeatureVector l2_normalized(const FeatureVector& v);

}  // namespace wisig
