#include "kernel_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace wisig::detail {

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

// Runs fn(begin, end) over [0, n) split into contiguous chunks. Every output
// cell is written by exactly one worker, so results do not depend on the
// thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(threads, n / 64 + 1);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=] { fn(begin, end); });
  }
}

}  // namespace

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 16u);
}

void KernelRows::compute_row(std::size_t i, std::size_t first, double* out) const {
  const auto xi = data_.row(i);
  const std::size_t n = data_.size();
  parallel_for(n - first, threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = first + begin; j < first + end; ++j) out[j] = rbf(xi, data_.row(j), gamma_);
  });
}

FullGram::FullGram(const TrainingSet& data, double gamma, unsigned threads)
    : KernelRows(data, gamma, threads), gram_(data.size() * data.size()) {
  const std::size_t n = data.size();
  // Rows are interleaved across workers to balance the triangular workload.
  const std::size_t workers = std::min<std::size_t>(threads_, n / 64 + 1);
  auto fill = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      const auto xi = data_.row(i);
      double* row = gram_.data() + i * n;
      for (std::size_t j = i; j < n; ++j) row[j] = rbf(xi, data_.row(j), gamma_);
    }
  };
  if (workers <= 1) {
    fill(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fill, w);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) gram_[i * n + j] = gram_[j * n + i];
  }
}

std::span<const double> FullGram::row(std::size_t i) {
  const std::size_t n = size();
  return {gram_.data() + i * n, n};
}

LruRowCache::LruRowCache(const TrainingSet& data, double gamma, unsigned threads,
                         std::size_t capacity_rows)
    : KernelRows(data, gamma, threads), capacity_(std::max<std::size_t>(capacity_rows, 2)) {}

std::span<const double> LruRowCache::row(std::size_t i) {
  if (auto it = where_.find(i); it != where_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return lru_.front().values;
  }
  ++misses_;
  std::vector<double> values;
  if (lru_.size() >= capacity_) {
    values = std::move(lru_.back().values);
    where_.erase(lru_.back().index);
    lru_.pop_back();
  }
  values.resize(size());
  compute_row(i, 0, values.data());
  lru_.push_front({i, std::move(values)});
  where_[i] = lru_.begin();
  return lru_.front().values;
}

std::unique_ptr<KernelRows> make_kernel_rows(const TrainingSet& data, const SvmConfig& config) {
  const unsigned threads = resolve_threads(config.threads);
  if (data.size() <= config.full_gram_limit) {
    return std::make_unique<FullGram>(data, config.gamma, threads);
  }
  const std::size_t row_bytes = std::max<std::size_t>(data.size() * sizeof(double), 1);
  return std::make_unique<LruRowCache>(data, config.gamma, threads, config.cache_bytes / row_bytes);
}

}  // namespace wisig::detail
