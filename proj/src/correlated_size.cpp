#include "signtest/correlated_size.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "signtest/combinatorics.hpp"
#include "signtest/exact_test.hpp"
#include "signtest/normal.hpp"
#include "signtest/power.hpp"

namespace signtest {

void EquicorrelatedModel::validate() const {
  if (q < 1) throw Error(ErrorKind::kInvalidArgument, "q must be >= 1");
  if (!(rho >= 0.0 && rho <= kMaxEquicorrelation)) {
    throw Error(ErrorKind::kInvalidRho,
                "equicorrelation rho must lie in [0, " +
                    std::to_string(kMaxEquicorrelation) + "], got " +
                    std::to_string(rho));
  }
}

double EquicorrelatedModel::factor_slope() const {
  return std::sqrt(rho / (1.0 - rho));
}

void MinimalPairModel::validate() const {
  if (q < 2) throw Error(ErrorKind::kInvalidArgument, "q must be >= 2");
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw Error(ErrorKind::kInvalidRho,
                "correlation must lie in [-1, 1], got " + std::to_string(rho));
  }
}

double same_sign_probability(double rho) {
  return 0.5 * (1.0 + 2.0 / std::numbers::pi * std::asin(rho));
}

namespace {

void check_r(int q, int r) {
  if (r < 0 || 2 * r > q) {
    throw Error(ErrorKind::kInvalidR,
                "r must lie in [0, " + std::to_string(q / 2) + "], got " +
                    std::to_string(r));
  }
}

}  // namespace

std::vector<double> equicorrelated_tail_table(const EquicorrelatedModel& model,
                                              const QuadratureRule& rule) {
  model.validate();
  const int q = model.q;
  const int half = q / 2;
  const double slope = model.factor_slope();

  // Conditional on the common factor z, signs are independent with
  // P(Y_i < 0 | z) = Phi(slope z).
  std::vector<long double> acc(half + 1, 0.0L);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double neg = normal_cdf(slope * rule.nodes[i]);
    const double pos = normal_sf(slope * rule.nodes[i]);
    for (int r = 0; r <= half; ++r) {
      acc[r] += rule.weights[i] * (std::pow(pos, r) * std::pow(neg, q - r));
    }
  }
  std::vector<double> table(half + 1);
  for (int r = 0; r <= half; ++r) {
    const long double mult = (2 * r == q ? 1.0L : 2.0L) * binomial_real(q, r);
    table[r] = static_cast<double>(mult * acc[r]);
  }
  return table;
}

double equicorrelated_tail_prob(const EquicorrelatedModel& model, int r,
                                const QuadratureRule& rule) {
  model.validate();
  check_r(model.q, r);
  const int q = model.q;
  const double slope = model.factor_slope();
  const double integral = integrate(
      [&](double z) {
        return std::pow(normal_sf(slope * z), r) *
               std::pow(normal_cdf(slope * z), q - r);
      },
      rule);
  return static_cast<double>((2 * r == q ? 1.0L : 2.0L) * binomial_real(q, r)) *
         integral;
}

double equicorrelated_size(const EquicorrelatedModel& model, double alpha,
                           const QuadratureRule& rule) {
  const CriticalConstants cc =
      critical_constants(model.q, alpha, Side::kTwoSided);
  return combine_tail_pairs(equicorrelated_tail_table(model, rule), cc);
}

double minimal_pair_tail_prob(const MinimalPairModel& model, int r) {
  model.validate();
  check_r(model.q, r);
  const int q = model.q;
  if (q == 2) {
    // Two coordinates: the minimal-pair and equicorrelated models coincide.
    const double same = same_sign_probability(model.rho);
    return r == 0 ? same : 1.0 - same;
  }

  // P(exactly r positive) = 2^{-q} [C(q,r) + d_r (2/pi) asin rho], with d_r
  // from conditioning on how many of the correlated pair are positive.
  const long double s = 2.0L / std::numbers::pi_v<long double> *
                        std::asin(static_cast<long double>(model.rho));
  long double d = 0.0L;
  if (r == 0) {
    d = binomial_real(q - 2, 0);
  } else if (r == 1) {
    d = binomial_real(q - 2, 1) - binomial_real(q - 2, 0) * 2;
  } else {
    d = binomial_real(q - 2, r) - 2 * binomial_real(q - 2, r - 1) +
        binomial_real(q - 2, r - 2);
  }
  const long double exactly_r =
      std::ldexp(binomial_real(q, r) + d * s, -q);
  return static_cast<double>(2 * r == q ? exactly_r : 2 * exactly_r);
}

std::vector<double> minimal_pair_tail_table(const MinimalPairModel& model) {
  model.validate();
  std::vector<double> table(model.q / 2 + 1);
  for (int r = 0; r <= model.q / 2; ++r) {
    table[r] = minimal_pair_tail_prob(model, r);
  }
  return table;
}

double minimal_pair_size(const MinimalPairModel& model, double alpha) {
  const CriticalConstants cc =
      critical_constants(model.q, alpha, Side::kTwoSided);
  return combine_tail_pairs(minimal_pair_tail_table(model), cc);
}

SizeCurve size_surface(std::span<const int> q_values,
                       std::span<const double> rho_values, double alpha,
                       const QuadratureRule& rule) {
  if (q_values.empty() || rho_values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "size grid must be nonempty");
  }
  SizeCurve curve{alpha, {}};
  curve.rows.reserve(q_values.size() * rho_values.size());
  for (const int q : q_values) {
    for (const double rho : rho_values) {
      curve.rows.push_back(
          {q, rho, equicorrelated_size({q, rho}, alpha, rule)});
    }
  }
  return curve;
}

double identity_f(int q, int m, double theta) {
  long double sum = 0.0L;
  for (int r = 0; r <= m; ++r) {
    const long double sign = ((m - r) % 2 == 0) ? 1.0L : -1.0L;
    sum += sign * binomial_real(m, r) / (q - r) *
           std::pow(static_cast<long double>(theta), q - r);
  }
  return static_cast<double>(sum);
}

double identity_f_prime(int q, int m, double theta) {
  return std::pow(theta, q - m - 1) * std::pow(1.0 - theta, m);
}

namespace {

using Wide = __int128;

Wide choose(int n, int k) { return static_cast<Wide>(binomial_exact(n, k)); }

Wide abs_wide(Wide v) { return v < 0 ? -v : v; }

std::int64_t narrow(Wide v) {
  constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::min(abs_wide(v), kMax)) *
         (v < 0 ? -1 : 1);
}

}  // namespace

IdentityReport identity_suite(int q, int m) {
  if (q < 1 || m < 0 || 2 * m > q) {
    throw Error(ErrorKind::kInvalidArgument,
                "identity suite needs q >= 1 and 0 <= m <= q/2");
  }
  IdentityReport rep;
  rep.q = q;
  rep.m = m;

  // (i) derivative of f against central differences on a theta grid.
  constexpr int kGrid = 100;
  for (int i = 0; i <= kGrid; ++i) {
    const double theta = static_cast<double>(i) / kGrid;
    const double fd = (identity_f(q, m, theta + kDerivativeStep) -
                       identity_f(q, m, theta - kDerivativeStep)) /
                      (2.0 * kDerivativeStep);
    rep.derivative_max_error = std::max(
        rep.derivative_max_error, std::fabs(fd - identity_f_prime(q, m, theta)));
  }
  rep.derivative_ok = rep.derivative_max_error <= kDerivativeTolerance;

  // (ii) alternating binomial sum, cross-multiplied by (q - r) so both
  // sides are integers.
  Wide worst = 0;
  for (int r = 0; r <= m; ++r) {
    Wide lhs = 0;
    for (int k = r; k <= m; ++k) {
      const Wide term = choose(q, k) * choose(k, k - r);
      lhs += ((k - r) % 2 == 0) ? term : -term;
    }
    const Wide sign = ((m - r) % 2 == 0) ? 1 : -1;
    const Wide first =
        sign * (m - r + 1) * choose(q, m + 1) * choose(m + 1, m - r + 1);
    const Wide second = sign * (m + 1) * choose(q, m + 1) * choose(m, r);
    const Wide scaled = lhs * (q - r);
    worst = std::max({worst, abs_wide(scaled - first),
                      abs_wide(scaled - second)});
  }
  rep.alternating_max_deviation = narrow(worst);
  rep.alternating_ok = worst == 0;

  // (iii) W(m) telescoping.
  if (q >= 2) {
    rep.telescoping_checked = true;
    Wide sum = 1;
    if (m >= 1) sum += choose(q - 2, 1) - 2;
    for (int r = 2; r <= m; ++r) sum += choose(q, r) - 4 * choose(q - 2, r - 1);
    const Wide closed = choose(q - 2, m) - choose(q - 2, m - 1);
    rep.telescoping_sum = narrow(sum);
    rep.telescoping_closed = narrow(closed);
    rep.telescoping_ok = sum == closed;
  } else {
    rep.telescoping_ok = true;
  }

  rep.passed = rep.derivative_ok && rep.alternating_ok && rep.telescoping_ok;
  return rep;
}

}  // namespace signtest
