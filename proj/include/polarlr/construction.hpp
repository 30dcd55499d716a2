// Information/frozen set selection from synthetic-channel records and
// comparison of constructions across kernels.

#pragma once

#include <string>
#include <vector>

#include "polarlr/polarization.hpp"

namespace polarlr {

enum class ConstructionMetric { kPe, kZ, kQ };

std::string to_string(ConstructionMetric m);
ConstructionMetric parse_construction_metric(const std::string& text);

struct CodeSpec {
  int n = 0;
  int block_length = 1;
  std::vector<int> info_set;    // sorted leaf indices
  std::vector<int> frozen_set;  // complement, sorted
  ConstructionMetric metric_used = ConstructionMetric::kPe;
  double union_bound = 0.0;  // sum of pe over the information set

  int k() const { return static_cast<int>(info_set.size()); }
  bool is_frozen(int i) const;
};

// Picks the k best indices (smallest pe or z, largest q; ties broken by the
// smaller leaf index). The union bound is always accumulated from pe, whatever
// metric ranked the channels. The records must be the complete leaf level of
// one tree.
CodeSpec select_frozen(const std::vector<SyntheticChannelRecord>& records, int k,
                       ConstructionMetric metric);

struct ConstructionDiff {
  int overlap = 0;
  std::vector<int> only_a;
  std::vector<int> only_b;
  double union_bound_a = 0.0;
  double union_bound_b = 0.0;
};

// Requires equal n and k.
ConstructionDiff compare_constructions(const CodeSpec& a, const CodeSpec& b);

}  // namespace polarlr
