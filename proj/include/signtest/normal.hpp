#pragma once

#include <cmath>
#include <numbers>

namespace signtest {

// Standard normal cdf through erfc so both tails keep full relative accuracy.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// 1 - Phi(x), evaluated without cancellation.
inline double normal_sf(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi *
                                   std::numbers::sqrt2);
}

}  // namespace signtest
