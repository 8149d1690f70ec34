#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wisig/types.hpp"

namespace wisig {

/// Samples of one writer, as indices into Dataset::samples().
struct WriterEntry {
  std::string id;
  /// Position in the protocol's writer numbering: the id itself when every
  /// writer id is an unsigned integer, else the 1-based rank in sorted order.
  long long number = 0;
  std::vector<std::size_t> genuine;
  std::vector<std::size_t> simple;
  std::vector<std::size_t> skilled;
};

/// Immutable collection of signature samples grouped by writer.
class Dataset {
 public:
  /// Throws InvalidInput on an empty list, mixed feature dims or a duplicate
  /// (writer_id, sample_id).
  explicit Dataset(std::vector<SignatureSample> samples);

  std::size_t dim() const noexcept { return dim_; }
  /// Samples in their original order.
  std::span<const SignatureSample> samples() const noexcept { return samples_; }
  const SignatureSample& sample(std::size_t index) const { return samples_[index]; }
  /// Writers sorted with writer_less.
  std::span<const WriterEntry> writers() const noexcept { return writers_; }
  /// nullptr when absent.
  const WriterEntry* find_writer(std::string_view id) const noexcept;
  const WriterEntry* find_writer_number(long long number) const noexcept;

  /// Copy with every feature vector L2-normalised.
  Dataset l2_normalized() const;

 private:
  std::size_t dim_ = 0;
  std::vector<SignatureSample> samples_;
  std::vector<WriterEntry> writers_;
};

}  // namespace wisig
