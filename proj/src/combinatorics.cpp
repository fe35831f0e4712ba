#include "signtest/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "signtest/errors.hpp"

namespace signtest {

std::uint64_t binomial_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  // c * (n - k + i) / i stays integral at every step.
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "binomial coefficient C(" + std::to_string(n) + ", " +
                      std::to_string(k) + ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

long double binomial_real(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0L;
  if (n <= 62) return static_cast<long double>(binomial_exact(n, k));
  return std::exp(std::lgamma(static_cast<long double>(n) + 1) -
                  std::lgamma(static_cast<long double>(k) + 1) -
                  std::lgamma(static_cast<long double>(n - k) + 1));
}

long double fair_binomial_pmf(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0L;
  if (n <= 62) return std::ldexp(binomial_real(n, k), -n);
  return std::exp(std::lgamma(static_cast<long double>(n) + 1) -
                  std::lgamma(static_cast<long double>(k) + 1) -
                  std::lgamma(static_cast<long double>(n - k) + 1) -
                  n * std::log(2.0L));
}

}  // namespace signtest
