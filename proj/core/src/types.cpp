#include "wisig/types.hpp"

#include <charconv>
#include <cmath>

#include "wisig/error.hpp"

namespace wisig {

FeatureVector::FeatureVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("feature vector must have dim >= 1");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw InvalidInput("non-finite feature value at index " + std::to_string(k));
    }
  }
}

std::string_view to_string(SampleLabel label) noexcept {
  switch (label) {
    case SampleLabel::genuine: return "genuine";
    case SampleLabel::simple_forgery: return "simple";
    case SampleLabel::skilled_forgery: return "skilled";
  }
  return "?";
}

std::optional<SampleLabel> parse_sample_label(std::string_view text) noexcept {
  if (text == "genuine") return SampleLabel::genuine;
  if (text == "simple") return SampleLabel::simple_forgery;
  if (text == "skilled") return SampleLabel::skilled_forgery;
  return std::nullopt;
}

std::string_view to_string(PairClass klass) noexcept {
  return klass == PairClass::within ? "within" : "between";
}

std::optional<long long> writer_number(std::string_view id) noexcept {
  if (id.empty() || id.front() == '-' || id.front() == '+') return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), value);
  if (ec != std::errc{} || ptr != id.data() + id.size()) return std::nullopt;
  return value;
}

bool writer_less(std::string_view a, std::string_view b) noexcept {
  const auto na = writer_number(a);
  const auto nb = writer_number(b);
  if (na && nb) {
    if (*na != *nb) return *na < *nb;
    return a < b;  // "007" vs "7"
  }
  if (na != nb) return na.has_value();
  return a < b;
}

}  // namespace wisig
