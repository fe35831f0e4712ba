#pragma once

// Analytic power of the sign test for independent, not necessarily
// identically distributed observations.
//
// With p_i = P(Y_i > 0) under the true median, the number of positive signs
// is Poisson-binomial. P_Y(r), the probability of exactly r positive or
// exactly r negative signs, feeds the rejection probability
//
//   E[phi] = sum_{r < m} P_Y(r) + gamma * P_Y(m).

#include <span>
#include <utility>
#include <vector>

#include "signtest/exact_test.hpp"

namespace signtest {

class MarginalProbabilities {
 public:
  // Throws Error{kInvalidArgument} if p is empty or some p_i is outside
  // [0, 1].
  explicit MarginalProbabilities(std::vector<double> p);

  std::span<const double> values() const noexcept { return p_; }
  int q() const noexcept { return static_cast<int>(p_.size()); }

 private:
  std::vector<double> p_;
};

struct TailPairTable {
  int q = 0;
  // values[r] = P_Y(r), r = 0 .. floor(q/2). For even q the central entry
  // counts the r == q - r event once.
  std::vector<double> values;
};

// pmf[j] = P(exactly j positive), j = 0..q, by iterated convolution.
std::vector<double> poisson_binomial_pmf(const MarginalProbabilities& p);

TailPairTable tail_pair_probability(const MarginalProbabilities& p);

// sum_{r < cc.m} tail[r] + cc.gamma * tail[cc.m]; shared by every model
// that reduces to a table of tail-pair probabilities.
double combine_tail_pairs(std::span<const double> tail,
                          const CriticalConstants& cc);

// Rejection probability of the two-sided test at level alpha.
double power_from_proposition(const MarginalProbabilities& p, double alpha);

// Rejection probability of the test with the given sidedness. For
// Side::kOneSidedGreater this is sum_{r < m} pmf[q - r] + gamma pmf[q - m].
double rejection_rate(const MarginalProbabilities& p, double alpha, Side side);

struct PowerPoint {
  double mu = 0.0;
  double power = 0.0;
};

// Normal marginals: p_i = Phi((mu - mu0) / sigma_i). Throws
// Error{kInvalidSigma} unless every sigma_i is finite and positive.
std::vector<PowerPoint> power_curve(std::span<const double> sigma, double mu0,
                                    std::span<const double> mu_grid,
                                    double alpha,
                                    Side side = Side::kTwoSided);

}  // namespace signtest
