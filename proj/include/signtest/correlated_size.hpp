#pragma once

// Null rejection rate of the sign test when the observations are
// correlated normals that the test treats as independent.
//
// Equicorrelated model: Y ~ N(0, (1 - rho) I + rho 11'). Conditioning on the
// common factor gives a one-dimensional integral against phi, evaluated by
// Gauss-Hermite quadrature.
//
// Minimal-pair model: only Y_1 and Y_2 are correlated. The bivariate orthant
// probability 1/4 (1 + (2/pi) asin rho) makes every tail pair closed form.

#include <cstdint>
#include <span>
#include <vector>

#include "signtest/quadrature.hpp"

namespace signtest {

inline constexpr double kMaxEquicorrelation = 0.9999;

struct EquicorrelatedModel {
  int q = 1;
  double rho = 0.0;

  // Throws Error{kInvalidArgument} for q < 1 and Error{kInvalidRho} unless
  // 0 <= rho <= kMaxEquicorrelation.
  void validate() const;
  // sqrt(rho / (1 - rho)): slope of the conditional sign probabilities in
  // the common factor.
  double factor_slope() const;
};

struct MinimalPairModel {
  int q = 2;
  double rho = 0.0;

  // Throws Error{kInvalidArgument} for q < 2 and Error{kInvalidRho} unless
  // |rho| <= 1.
  void validate() const;
};

struct SizeRow {
  int q = 0;
  double rho = 0.0;
  double size = 0.0;
};

struct SizeCurve {
  double alpha = 0.0;
  std::vector<SizeRow> rows;
};

// P(both coordinates of a standard bivariate normal with correlation rho
// share a sign) = 1/2 (1 + (2/pi) asin rho).
double same_sign_probability(double rho);

// P_{q,rho}(r): exactly r positive or exactly r negative signs, with the
// central event (2r == q) counted once. Throws Error{kInvalidR} unless
// 0 <= r <= q/2.
double equicorrelated_tail_prob(const EquicorrelatedModel& model, int r,
                                const QuadratureRule& rule);

// All P_{q,rho}(r), r = 0..q/2, in a single pass over the nodes.
std::vector<double> equicorrelated_tail_table(const EquicorrelatedModel& model,
                                              const QuadratureRule& rule);

double equicorrelated_size(const EquicorrelatedModel& model, double alpha,
                           const QuadratureRule& rule);

double minimal_pair_tail_prob(const MinimalPairModel& model, int r);

std::vector<double> minimal_pair_tail_table(const MinimalPairModel& model);

double minimal_pair_size(const MinimalPairModel& model, double alpha);

// Equicorrelated size over the (q, rho) grid, rows ordered q-major.
SizeCurve size_surface(std::span<const int> q_values,
                       std::span<const double> rho_values, double alpha,
                       const QuadratureRule& rule);

// Checks of the algebraic identities behind the monotonicity arguments:
//  f(theta) = sum_{r<=m} (-1)^{m-r} C(m,r) theta^{q-r} / (q-r) has
//    f'(theta) = theta^{q-m-1} (1-theta)^m;
//  sum_{k=r}^{m} C(q,k) C(k,k-r) (-1)^{k-r}
//    = (-1)^{m-r} (m-r+1) C(q,m+1) C(m+1,m-r+1) / (q-r)
//    = (-1)^{m-r} (m+1) C(q,m+1) C(m,r) / (q-r);
//  W(m) = 1 + C(q-2,1) - 2 + sum_{r=2}^{m} (C(q,r) - 4 C(q-2,r-1))
//       = C(q-2,m) - C(q-2,m-1).
struct IdentityReport {
  int q = 0;
  int m = 0;
  double derivative_max_error = 0.0;
  bool derivative_ok = false;
  // Largest |lhs (q - r) - rhs numerator| over r = 0..m, over both closed
  // forms; zero when the identity holds exactly.
  std::int64_t alternating_max_deviation = 0;
  bool alternating_ok = false;
  // W(m) sum and closed form; telescoping_checked is false when q < 2.
  bool telescoping_checked = false;
  std::int64_t telescoping_sum = 0;
  std::int64_t telescoping_closed = 0;
  bool telescoping_ok = false;
  bool passed = false;
};

inline constexpr double kDerivativeStep = 1e-5;
inline constexpr double kDerivativeTolerance = 1e-6;

// Throws Error{kInvalidArgument} unless q >= 1 and 0 <= m <= q/2.
IdentityReport identity_suite(int q, int m);

// f(theta) and its claimed derivative, exposed for testing.
double identity_f(int q, int m, double theta);
double identity_f_prime(int q, int m, double theta);

}  // namespace signtest
