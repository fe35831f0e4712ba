#pragma once

#include <cstdint>

namespace signtest {

// Exact binomial coefficient; 0 when k < 0 or k > n. Throws
// Error{kInvalidArgument} if the result does not fit in 64 bits.
std::uint64_t binomial_exact(int n, int k);

// C(n, k) as a floating value. Exact for n <= 62, lgamma-based above.
long double binomial_real(int n, int k);

// C(n, k) / 2^n, i.e. the Binomial(n, 1/2) pmf at k.
long double fair_binomial_pmf(int n, int k);

}  // namespace signtest
