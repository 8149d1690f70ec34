#include "wisig/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wisig/error.hpp"
#include "wisig/rng.hpp"

namespace wisig {

namespace {

std::string sample_id(char prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%02zu", prefix, k + 1);
  return buf;
}

}  // namespace

SyntheticSpec SyntheticSpec::shaped_like(DatasetKind kind) {
  SyntheticSpec s;
  switch (kind) {
    case DatasetKind::brazilian:
      s.n_writers = 168;
      s.genuine_per_writer = 40;
      s.simple_per_writer = 10;
      s.skilled_per_writer = 10;
      break;
    case DatasetKind::gpds160:
    case DatasetKind::gpds300:
      s.n_writers = 881;
      s.genuine_per_writer = 24;
      s.simple_per_writer = 0;
      s.skilled_per_writer = 30;
      break;
    case DatasetKind::synthetic:
      break;
  }
  return s;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_writers < 2) throw InvalidInput("synthetic: need at least 2 writers");
  if (spec.genuine_per_writer < 1) throw InvalidInput("synthetic: genuine_per_writer must be >= 1");
  if (spec.dim < 1) throw InvalidInput("synthetic: dim must be >= 1");
  if (!(spec.separation > 0.0) || !std::isfinite(spec.separation)) {
    throw InvalidInput("synthetic: separation must be positive");
  }
  if (!(spec.noise > 0.0) || !std::isfinite(spec.noise)) {
    throw InvalidInput("synthetic: noise must be positive");
  }
  if (!(spec.skilled_offset >= 0.0) || !std::isfinite(spec.skilled_offset)) {
    throw InvalidInput("synthetic: skilled_offset must be non-negative");
  }

  const std::size_t n = spec.n_writers;
  const std::size_t d = spec.dim;
  std::vector<std::vector<double>> centroids(n, std::vector<double>(d));
  for (std::size_t w = 0; w < n; ++w) {
    Rng rng(derive_stream(spec.seed, {static_cast<std::uint64_t>(StreamPurpose::synthetic_centroid), w + 1}));
    for (double& x : centroids[w]) x = rng.uniform(0.0, spec.separation);
  }

  std::vector<SignatureSample> samples;
  samples.reserve(n * (spec.genuine_per_writer + spec.simple_per_writer + spec.skilled_per_writer));
  for (std::size_t w = 0; w < n; ++w) {
    Rng rng(derive_stream(spec.seed, {static_cast<std::uint64_t>(StreamPurpose::synthetic_samples), w + 1}));
    const std::string writer = std::to_string(w + 1);
    const auto& c = centroids[w];

    auto emit = [&](char prefix, std::size_t k, SampleLabel label, const std::vector<double>& base,
                    double extra) {
      std::vector<double> v(d);
      for (std::size_t j = 0; j < d; ++j) {
        v[j] = base[j] + spec.noise * rng.normal();
        if (extra > 0.0) v[j] += extra * rng.normal();
      }
      samples.push_back({writer, sample_id(prefix, k), label, FeatureVector(std::move(v))});
    };

    for (std::size_t k = 0; k < spec.genuine_per_writer; ++k) {
      emit('g', k, SampleLabel::genuine, c, 0.0);
    }
    for (std::size_t k = 0; k < spec.simple_per_writer; ++k) {
      std::size_t other = rng.uniform_index(n - 1);
      if (other >= w) ++other;
      std::vector<double> base(d);
      for (std::size_t j = 0; j < d; ++j) base[j] = centroids[other][j] + 0.5 * (c[j] - centroids[other][j]);
      emit('s', k, SampleLabel::simple_forgery, base, 0.0);
    }
    for (std::size_t k = 0; k < spec.skilled_per_writer; ++k) {
      emit('k', k, SampleLabel::skilled_forgery, c, spec.skilled_offset);
    }
  }
  return Dataset(std::move(samples));
}

}  // namespace wisig
