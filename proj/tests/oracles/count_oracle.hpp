#pragma once

#include <cstddef>

namespace wisig::oracle {

/// Number of unordered pairs among m items, by enumeration.
inline std::size_t count_unordered_pairs(std::size_t m) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = j + 1; k < m; ++k) ++n;
  return n;
}

/// Within and between counts of a learning set over `writers` development
/// writers, by enumerating every (writer, pair) and (writer, ref, impostor).
struct LearningSetCount {
  std::size_t within = 0;
  std::size_t between = 0;
};

inline LearningSetCount count_learning_set(std::size_t writers, std::size_t m_within,
                                           std::size_t refs, std::size_t impostors) {
  LearningSetCount c;
  for (std::size_t w = 0; w < writers; ++w) {
    c.within += count_unordered_pairs(m_within);
    for (std::size_t r = 0; r < refs; ++r)
      for (std::size_t i = 0; i < impostors; ++i) ++c.between;
  }
  return c;
}

}  // namespace wisig::oracle
