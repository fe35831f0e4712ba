#pragma once

// Gauss-Hermite rules for expectations under the standard normal density:
//
//   E[f(Z)] = integral phi(z) f(z) dz ~= sum_i w_i f(z_i),  sum_i w_i = 1.

#include <cmath>
#include <string>
#include <vector>

#include "signtest/errors.hpp"

namespace signtest {

inline constexpr int kMaxQuadratureOrder = 2000;
inline constexpr int kDefaultQuadratureOrder = 1000;

struct QuadratureRule {
  int order = 0;
  // Strictly increasing, symmetric about zero.
  std::vector<double> nodes;
  // Outer weights fall far below the double range for large orders
  // (about 1e-870 at n = 1000), so they are kept in extended precision.
  std::vector<long double> weights;
};

// n-point rule, exact for polynomials of degree <= 2n - 1 against phi.
// Throws Error{kOrderTooLarge} when n > kMaxQuadratureOrder and
// Error{kInvalidArgument} when n < 1.
QuadratureRule gauss_hermite(int n);

// sum_i w_i f(z_i). Throws Error{kNonFiniteEvaluation} when f returns a
// non-finite value at some node.
template <class F>
double integrate(F&& f, const QuadratureRule& rule) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNonFiniteEvaluation,
                  "integrand is not finite at node " +
                      std::to_string(rule.nodes[i]),
                  i);
    }
    sum += rule.weights[i] * v;
  }
  return static_cast<double>(sum);
}

// Exact E[Z^k] for the standard normal: 0 for odd k, (k-1)!! for even k.
long double normal_moment(int k);

struct QuadratureCheck {
  int order = 0;
  int max_degree = 0;
  double max_relative_error = 0.0;  // over moments of degree 0 .. max_degree
  double weight_sum_error = 0.0;
  bool symmetric = false;
  bool increasing = false;
  bool positive = false;
  bool passed = false;
};

// Moment exactness and structural invariants of gauss_hermite(n), checked
// up to degree min(2n - 1, max_degree).
QuadratureCheck check_rule(const QuadratureRule& rule, int max_degree,
                           double tolerance);

}  // namespace signtest
