#include "qgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qgen {

Summary describe(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  s.count = n;
  long double sum = 0;
  for (double v : sorted) sum += v;
  s.mean = static_cast<double>(sum / static_cast<long double>(n));
  long double sq = 0;
  for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
  s.stddev = static_cast<double>(std::sqrt(sq / static_cast<long double>(n)));
  s.median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

}  // namespace qgen
