#pragma once

#include <cstddef>
#include <span>

namespace qgen {

/// Descriptive summary of a sample. Standard deviation is the population one.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// All-zero record for an empty sample.
Summary describe(std::span<const double> values);

}  // namespace qgen
