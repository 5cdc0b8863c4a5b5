#pragma once

// Class-frequency data: boundaries r0 < r1 < ... < rm and per-class counts.

#include <algorithm>
#include <cmath>
#include <vector>

#include "difit/common.hpp"

namespace difit {

struct GroupedSample {
  std::vector<double> boundaries;  // length m + 1
  std::vector<double> frequencies; // length m

  std::size_t class_count() const { return frequencies.size(); }

  double total() const {
    double n = 0.0;
    for (double f : frequencies) n += f;
    return n;
  }

  double midpoint(std::size_t i) const {
    return 0.5 * (boundaries[i] + boundaries[i + 1]);
  }

  void validate() const {
    require(boundaries.size() >= 3, "grouped sample: need at least 2 classes");
    require(boundaries.size() == frequencies.size() + 1,
            "grouped sample: boundaries must be one longer than frequencies");
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
      require(boundaries[i] < boundaries[i + 1],
              "grouped sample: boundaries must be strictly increasing");
    for (double f : frequencies)
      require(f >= 0.0, "grouped sample: frequencies must be nonnegative");
    require(total() > 0.0, "grouped sample: total frequency must be > 0");
  }
};

/// Bin raw data into m equal-width classes spanning [min, max]. Counts use
/// half-open classes (r_{i-1}, r_i], with the minimum assigned to class 1.
inline GroupedSample group(const Sample& data, std::size_t m) {
  require(m >= 2, "group: class count must be >= 2");
  require(!data.empty(), "group: data must be nonempty");
  double lo = *std::min_element(data.begin(), data.end());
  double hi = *std::max_element(data.begin(), data.end());
  require(hi > lo, "group: degenerate range (all data equal)");
  GroupedSample g;
  g.boundaries.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    g.boundaries[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(m);
  g.boundaries[m] = hi;  // guard against rounding past the max
  g.frequencies.assign(m, 0.0);
  for (double x : data) {
    if (x <= g.boundaries[1]) {
      g.frequencies[0] += 1.0;
      continue;
    }
    auto it = std::lower_bound(g.boundaries.begin(), g.boundaries.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - g.boundaries.begin());
    g.frequencies[std::min(idx - 1, m - 1)] += 1.0;
  }
  return g;
}

}  // namespace difit
