#include "wisig/dichotomy.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "wisig/error.hpp"

namespace wisig {

FeatureVector dichotomy_transform(const FeatureVector& a, const FeatureVector& b) {
  if (a.dim() != b.dim()) {
    throw InvalidInput("dichotomy_transform: dimension mismatch (" + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()) + ")");
  }
  std::vector<double> out(a.dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::fabs(a[k] - b[k]);
  return FeatureVector(std::move(out));
}

std::vector<DissimilarityVector> within_pairs(std::span<const SignatureSample> samples) {
  if (samples.size() < 2) {
    throw EmptyResult("within_pairs: need at least 2 samples, got " +
                      std::to_string(samples.size()));
  }
  const std::string& writer = samples.front().writer_id;
  for (const auto& s : samples) {
    if (s.writer_id != writer) {
      throw InvalidInput("within_pairs: mixed writers '" + writer + "' and '" + s.writer_id + "'");
    }
    if (s.label != SampleLabel::genuine) {
      throw InvalidInput("within_pairs: sample '" + s.sample_id + "' of writer '" + writer +
                         "' is not genuine");
    }
  }

  const std::size_t m = samples.size();
  std::vector<DissimilarityVector> out;
  out.reserve(m * (m - 1) / 2);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      out.push_back({dichotomy_transform(samples[j].features, samples[k].features),
                     PairClass::within, samples[j].ref(), samples[k].ref()});
    }
  }
  return out;
}

std::vector<DissimilarityVector> between_pairs(std::span<const SignatureSample> references,
                                               std::span<const SignatureSample> impostors) {
  std::unordered_set<std::string> ref_writers;
  for (const auto& r : references) ref_writers.insert(r.writer_id);
  for (const auto& i : impostors) {
    if (ref_writers.contains(i.writer_id)) {
      throw InvalidInput("between_pairs: writer '" + i.writer_id +
                         "' appears among both references and impostors");
    }
  }

  std::vector<DissimilarityVector> out;
  out.reserve(references.size() * impostors.size());
  for (const auto& r : references) {
    for (const auto& i : impostors) {
      out.push_back(
          {dichotomy_transform(r.features, i.features), PairClass::between, r.ref(), i.ref()});
    }
  }
  return out;
}

FeatureVector l2_normalized(const FeatureVector& v) {
  double norm = 0.0;
  for (double x : v.values()) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return v;
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= norm;
  return FeatureVector(std::move(out));
}

}  // namespace wisig
