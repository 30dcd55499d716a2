#include "polarlr/construction.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <stdexcept>

namespace polarlr {

std::string to_string(ConstructionMetric m) {
  switch (m) {
    case ConstructionMetric::kPe:
      return "pe";
    case ConstructionMetric::kZ:
      return "z";
    case ConstructionMetric::kQ:
      return "q";
  }
  return "pe";
}

ConstructionMetric parse_construction_metric(const std::string& text) {
  if (text == "pe") return ConstructionMetric::kPe;
  if (text == "z") return ConstructionMetric::kZ;
  if (text == "q") return ConstructionMetric::kQ;
  throw std::invalid_argument("parse_construction_metric: expected pe, z or q");
}

bool CodeSpec::is_frozen(int i) const {
  return !std::binary_search(info_set.begin(), info_set.end(), i);
}

CodeSpec select_frozen(const std::vector<SyntheticChannelRecord>& records, int k,
                       ConstructionMetric metric) {
  const std::size_t count = records.size();
  if (count == 0 || (count & (count - 1)) != 0)
    throw std::invalid_argument("select_frozen: records must cover 2^n leaves");
  if (k < 0 || static_cast<std::size_t>(k) > count)
    throw std::domain_error("select_frozen: k out of range");

  int n = 0;
  while ((1ull << n) < count) ++n;

  // Records keyed by leaf index regardless of input order.
  std::vector<const SyntheticChannelRecord*> by_index(count, nullptr);
  for (const auto& r : records) {
    if (r.path.depth != n || r.path.index >= count || by_index[r.path.index])
      throw std::invalid_argument("select_frozen: records are not one complete leaf level");
    by_index[r.path.index] = &r;
  }

  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  const auto score = [&](int i) {
    const auto& m = by_index[static_cast<std::size_t>(i)]->metrics;
    switch (metric) {
      case ConstructionMetric::kPe:
        return m.pe;
      case ConstructionMetric::kZ:
        return m.z;
      case ConstructionMetric::kQ:
        return -m.q;
    }
    return m.pe;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = score(a), sb = score(b);
    if (sa != sb) return sa < sb;
    return a < b;
  });

  CodeSpec code;
  code.n = n;
  code.block_length = static_cast<int>(count);
  code.metric_used = metric;
  code.info_set.assign(order.begin(), order.begin() + k);
  code.frozen_set.assign(order.begin() + k, order.end());
  std::sort(code.info_set.begin(), code.info_set.end());
  std::sort(code.frozen_set.begin(), code.frozen_set.end());
  for (int i : code.info_set)
    code.union_bound += by_index[static_cast<std::size_t>(i)]->metrics.pe;
  return code;
}

ConstructionDiff compare_constructions(const CodeSpec& a, const CodeSpec& b) {
  if (a.n != b.n || a.k() != b.k())
    throw std::invalid_argument("compare_constructions: mismatched n or k");
  ConstructionDiff diff;
  diff.union_bound_a = a.union_bound;
  diff.union_bound_b = b.union_bound;
  std::set_difference(a.info_set.begin(), a.info_set.end(), b.info_set.begin(),
                      b.info_set.end(), std::back_inserter(diff.only_a));
  std::set_difference(b.info_set.begin(), b.info_set.end(), a.info_set.begin(),
                      a.info_set.end(), std::back_inserter(diff.only_b));
  diff.overlap = a.k() - static_cast<int>(diff.only_a.size());
  return diff;
}

}  // namespace polarlr
