#pragma once

#include <cstddef>
#include <vector>

namespace rrk {

/// Least-squares fit of log(error) against log(dt) over the asymptotic window.
struct SlopeFit {
  double slope = 0;
  /// Inclusive index range [first, last] of the points used.
  std::size_t first = 0;
  std::size_t last = 0;
  bool valid = false;
};

/// Local slopes log(e_{k+1}/e_k) / log(dt_{k+1}/dt_k) between neighbours.
std::vector<double> local_slopes(const std::vector<double>& dts, const std::vector<double>& errors);

/// Least-squares slope of log(errors) against log(dts) over [first, last].
double least_squares_slope(const std::vector<double>& dts, const std::vector<double>& errors, std::size_t first,
                           std::size_t last);

/// Fits the slope on the largest contiguous run of points whose successive
/// local slopes differ by less than `max_variation`; ties go to the window at
/// smaller dt. Points with errors at or below `floor` or non-finite are cut,
/// and the ladder is truncated at the first such point (dts must be sorted
/// from coarse to fine).
SlopeFit fit_asymptotic_slope(const std::vector<double>& dts, const std::vector<double>& errors,
                              double max_variation = 0.3, double floor = 0.0);

}  // namespace rrk
