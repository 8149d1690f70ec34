#include "wisig/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wisig/dichotomy.hpp"
#include "wisig/error.hpp"

namespace wisig {

Dataset::Dataset(std::vector<SignatureSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw InvalidInput("dataset: no samples");
  dim_ = samples_.front().features.dim();

  auto less = [](const std::string& a, const std::string& b) { return writer_less(a, b); };
  std::map<std::string, WriterEntry, decltype(less)> grouped(less);
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.features.dim() != dim_) {
      throw InvalidInput("dataset: sample '" + s.writer_id + "/" + s.sample_id + "' has dim " +
                         std::to_string(s.features.dim()) + ", expected " + std::to_string(dim_));
    }
    if (!seen.emplace(s.writer_id, s.sample_id).second) {
      throw InvalidInput("dataset: duplicate sample '" + s.writer_id + "/" + s.sample_id + "'");
    }
    auto& w = grouped[s.writer_id];
    w.id = s.writer_id;
    switch (s.label) {
      case SampleLabel::genuine: w.genuine.push_back(i); break;
      case SampleLabel::simple_forgery: w.simple.push_back(i); break;
      case SampleLabel::skilled_forgery: w.skilled.push_back(i); break;
    }
  }

  const bool all_numeric = std::all_of(grouped.begin(), grouped.end(), [](const auto& kv) {
    return writer_number(kv.first).has_value();
  });
  long long rank = 0;
  for (auto& [id, entry] : grouped) {
    ++rank;
    entry.number = all_numeric ? *writer_number(id) : rank;
    writers_.push_back(std::move(entry));
  }
  for (std::size_t k = 1; k < writers_.size(); ++k) {
    if (writers_[k].number == writers_[k - 1].number) {
      throw InvalidInput("dataset: writer ids '" + writers_[k - 1].id + "' and '" + writers_[k].id +
                         "' map to the same writer number");
    }
  }
}

const WriterEntry* Dataset::find_writer(std::string_view id) const noexcept {
  for (const auto& w : writers_) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

const WriterEntry* Dataset::find_writer_number(long long number) const noexcept {
  auto it = std::lower_bound(writers_.begin(), writers_.end(), number,
                             [](const WriterEntry& w, long long n) { return w.number < n; });
  return it != writers_.end() && it->number == number ? &*it : nullptr;
}

Dataset Dataset::l2_normalized() const {
  std::vector<SignatureSample> out = samples_;
  for (auto& s : out) s.features = wisig::l2_normalized(s.features);
  return Dataset(std::move(out));
}

}  // namespace wisig
