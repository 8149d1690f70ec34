#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wisig {

/// Dense real-valued feature vector. Always non-empty and finite.
class FeatureVector {
 public:
  /// Throws InvalidInput if `values` is empty or holds NaN/Inf.
  explicit FeatureVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<double> values_;
};

enum class SampleLabel { genuine, simple_forgery, skilled_forgery };

/// "genuine", "simple", "skilled" (the feature-file spelling).
std::string_view to_string(SampleLabel label) noexcept;
std::optional<SampleLabel> parse_sample_label(std::string_view text) noexcept;

struct SampleRef {
  std::string writer_id;
  std::string sample_id;

  bool operator==(const SampleRef&) const = default;
};

struct SignatureSample {
  std::string writer_id;
  std::string sample_id;
  SampleLabel label = SampleLabel::genuine;
  FeatureVector features;

  SampleRef ref() const { return {writer_id, sample_id}; }
};

enum class PairClass { within, between };

std::string_view to_string(PairClass klass) noexcept;

/// A point of the dissimilarity space together with the two samples it came
/// from. `first` is the reference side, `second` the questioned/impostor side.
struct DissimilarityVector {
  FeatureVector values;
  PairClass klass = PairClass::within;
  SampleRef first;
  SampleRef second;
};

/// Orders writer identifiers numerically when both are unsigned integers,
/// lexicographically otherwise (numeric ids sort before non-numeric ones).
bool writer_less(std::string_view a, std::string_view b) noexcept;

/// Parses an unsigned decimal writer id; nullopt for anything else.
std::optional<long long> writer_number(std::string_view id) noexcept;

}  // namespace wisig
