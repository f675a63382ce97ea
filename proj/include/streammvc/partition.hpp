#pragma once

#include <cstddef>
#include <vector>

namespace smvc {

/// Hard cluster assignment: labels[i] in [0, k) for every sample i.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  std::size_t size() const { return labels.size(); }
  /// Throws ValidationError if k < 1 or a label falls outside [0, k).
  void validate() const;
};

}  // namespace smvc
