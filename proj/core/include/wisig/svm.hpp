#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wisig/types.hpp"

namespace wisig {

/// exp(-gamma * ||a - b||^2). Throws InvalidInput on dimension mismatch or
/// non-positive gamma.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma);

struct SvmConfig {
  double gamma = 1.0 / 2048.0;  // 2^-11
  double c = 1.0;
  /// Stopping threshold on the maximal KKT violation (m(alpha) - M(alpha)).
  double tolerance = 1e-3;
  /// Cap on pair updates. 0 selects 10 sweeps per sample, i.e. 10 * n * n.
  std::uint64_t max_iterations = 0;
  /// Above this many rows the Gram matrix is not materialised and kernel rows
  /// go through an LRU cache instead.
  std::size_t full_gram_limit = 20000;
  /// LRU capacity in bytes when the row cache is in use.
  std::size_t cache_bytes = std::size_t{1} << 30;
  /// Worker threads for kernel-row evaluation; 0 uses the hardware count.
  unsigned threads = 0;
  /// Record the dual objective after every update and fail if it decreases.
  bool trace = false;

  /// Throws InvalidInput when gamma, c or tolerance is not a positive finite value.
  void validate() const;
};

/// Row-major labelled points. Labels are +1 (within) and -1 (between).
struct TrainingSet {
  std::size_t dim = 0;
  std::vector<double> rows;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {rows.data() + i * dim, dim};
  }
  void add(std::span<const double> x, int label);
};

/// within -> +1, between -> -1.
TrainingSet make_training_set(std::span<const DissimilarityVector> learning_set);

/// Trained kernel machine. Support vectors are held in single precision, the
/// same representation as the model file, so a loaded model scores
/// bit-identically to the one that was saved.
class SvmModel {
 public:
  SvmModel(std::size_t dim, std::vector<float> support_vectors,
           std::vector<double> dual_coefficients, double bias, double gamma, double c);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t support_vector_count() const noexcept { return dual_coefficients_.size(); }
  std::span<const float> support_vector(std::size_t i) const noexcept {
    return {support_vectors_.data() + i * dim_, dim_};
  }
  std::span<const float> support_vectors() const noexcept { return support_vectors_; }
  /// alpha_i * y_i for each support vector.
  std::span<const double> dual_coefficients() const noexcept { return dual_coefficients_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }
  double c() const noexcept { return c_; }

  /// sum_i alpha_i y_i K(s_i, x) + b. Positive means within-class.
  double decision_score(std::span<const double> x) const;
  double decision_score(const FeatureVector& x) const { return decision_score(x.values()); }

 private:
  std::size_t dim_;
  std::vector<float> support_vectors_;
  std::vector<double> dual_coefficients_;
  double bias_;
  double gamma_;
  double c_;
};

struct TrainResult {
  SvmModel model;
  std::uint64_t iterations = 0;
  /// Maximal KKT violation at exit (<= tolerance).
  double kkt_gap = 0.0;
  double training_accuracy = 0.0;
  /// Full dual solution, one entry per training point.
  std::vector<double> alphas;
  /// Dual objective after each update; only filled in trace mode.
  std::vector<double> objective_trace;
};

/// Soft-margin RBF SVM solved with pairwise (SMO) updates using maximal
/// violating pair selection, lowest index on ties. Deterministic.
///
/// Throws InvalidInput for an empty or single-class set, and TrainingFailure
/// when the iteration cap is reached.
TrainResult train(const TrainingSet& data, const SvmConfig& config);
TrainResult train(std::span<const DissimilarityVector> learning_set, const SvmConfig& config);

// Model file: "WISVM1", then little-endian dim (u32), n_sv (u32), gamma,
// c, bias (f64), n_sv coefficients (f64), n_sv * dim support values (f32).
std::string serialize_model(const SvmModel& model);
/// Throws ParseError (with byte offset) or VersionError.
SvmModel deserialize_model(std::string_view bytes);

void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace wisig
