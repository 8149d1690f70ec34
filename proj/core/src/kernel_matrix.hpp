#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "wisig/svm.hpp"

namespace wisig::detail {

/// Source of RBF kernel rows for the solver.
class KernelRows {
 public:
  virtual ~KernelRows() = default;
  /// Row i of the Gram matrix. The span stays valid until the next call for a
  /// row other than the two most recently requested.
  virtual std::span<const double> row(std::size_t i) = 0;
  std::size_t size() const noexcept { return data_.size(); }

 protected:
  KernelRows(const TrainingSet& data, double gamma, unsigned threads)
      : data_(data), gamma_(gamma), threads_(threads) {}

  /// Fills out[j] = K(i, j) for j in [first, size()).
  void compute_row(std::size_t i, std::size_t first, double* out) const;

  const TrainingSet& data_;
  double gamma_;
  unsigned threads_;
};

class FullGram final : public KernelRows {
 public:
  FullGram(const TrainingSet& data, double gamma, unsigned threads);
  std::span<const double> row(std::size_t i) override;

 private:
  std::vector<double> gram_;
};

class LruRowCache final : public KernelRows {
 public:
  LruRowCache(const TrainingSet& data, double gamma, unsigned threads, std::size_t capacity_rows);
  std::span<const double> row(std::size_t i) override;

  std::size_t misses() const noexcept { return misses_; }

 private:
  struct Entry {
    std::size_t index;
    std::vector<double> values;
  };
  std::size_t capacity_;
  std::list<Entry> lru_;  // front = most recent
  std::unordered_map<std::size_t, std::list<Entry>::iterator> where_;
  std::size_t misses_ = 0;
};

std::unique_ptr<KernelRows> make_kernel_rows(const TrainingSet& data, const SvmConfig& config);

unsigned resolve_threads(unsigned requested) noexcept;

}  // namespace wisig::detail
