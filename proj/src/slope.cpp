#include "rrk/slope.hpp"

#include <cmath>
#include <stdexcept>

namespace rrk {

std::vector<double> local_slopes(const std::vector<double>& dts, const std::vector<double>& errors) {
  if (dts.size() != errors.size()) throw std::invalid_argument("local_slopes: size mismatch");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < dts.size(); ++k)
    out.push_back(std::log(errors[k + 1] / errors[k]) / std::log(dts[k + 1] / dts[k]));
  return out;
}

double least_squares_slope(const std::vector<double>& dts, const std::vector<double>& errors, std::size_t first,
                           std::size_t last) {
  if (last >= dts.size() || last >= errors.size() || first >= last)
    throw std::invalid_argument("least_squares_slope: need at least two points");
  const double n = static_cast<double>(last - first + 1);
  double sx = 0, sy = 0;
  for (std::size_t i = first; i <= last; ++i) {
    sx += std::log(dts[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dx = std::log(dts[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

SlopeFit fit_asymptotic_slope(const std::vector<double>& dts, const std::vector<double>& errors,
                              double max_variation, double floor) {
  if (dts.size() != errors.size()) throw std::invalid_argument("fit_asymptotic_slope: size mismatch");
  std::size_t usable = 0;
  while (usable < dts.size() && std::isfinite(errors[usable]) && errors[usable] > floor && dts[usable] > 0) ++usable;

  SlopeFit fit;
  if (usable < 2) return fit;
  const std::vector<double> d(dts.begin(), dts.begin() + usable);
  const std::vector<double> e(errors.begin(), errors.begin() + usable);
  const auto s = local_slopes(d, e);

  // Windows over local slopes [i, j]; a window covers points i..j+1.
  std::size_t best_i = 0, best_j = 0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j > i && !(std::abs(s[j] - s[j - 1]) < max_variation)) i = j;
    if (j - i >= best_j - best_i) {
      best_i = i;
      best_j = j;
    }
  }
  fit.first = best_i;
  fit.last = best_j + 1;
  fit.slope = least_squares_slope(d, e, fit.first, fit.last);
  fit.valid = std::isfinite(fit.slope);
  return fit;
}

}  // namespace rrk
