#include "signtest/power.hpp"

#include <cmath>
#include <string>

#include "signtest/errors.hpp"
#include "signtest/normal.hpp"

namespace signtest {

MarginalProbabilities::MarginalProbabilities(std::vector<double> p)
    : p_(std::move(p)) {
  if (p_.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "marginal probabilities must be nonempty");
  }
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "p[" + std::to_string(i) + "] outside [0, 1]", i);
    }
  }
}

std::vector<double> poisson_binomial_pmf(const MarginalProbabilities& p) {
  const auto probs = p.values();
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double success = probs[i];
    const double failure = 1.0 - success;
    for (std::size_t j = i + 1; j > 0; --j) {
      pmf[j] = pmf[j] * failure + pmf[j - 1] * success;
    }
    pmf[0] *= failure;
  }
  return pmf;
}

TailPairTable tail_pair_probability(const MarginalProbabilities& p) {
  const std::vector<double> pmf = poisson_binomial_pmf(p);
  const int q = p.q();
  TailPairTable table{q, std::vector<double>(q / 2 + 1, 0.0)};
  for (int r = 0; r <= q / 2; ++r) {
    table.values[r] = (2 * r == q) ? pmf[r] : pmf[r] + pmf[q - r];
  }
  return table;
}

double combine_tail_pairs(std::span<const double> tail,
                          const CriticalConstants& cc) {
  if (cc.m < 0 || static_cast<std::size_t>(cc.m) >= tail.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "critical constants do not index the tail table");
  }
  double sum = 0.0;
  for (int r = 0; r < cc.m; ++r) sum += tail[r];
  return sum + cc.gamma * tail[cc.m];
}

double power_from_proposition(const MarginalProbabilities& p, double alpha) {
  const CriticalConstants cc = critical_constants(p.q(), alpha, Side::kTwoSided);
  return combine_tail_pairs(tail_pair_probability(p).values, cc);
}

double rejection_rate(const MarginalProbabilities& p, double alpha,
                      Side side) {
  if (side == Side::kTwoSided) return power_from_proposition(p, alpha);
  const CriticalConstants cc = critical_constants(p.q(), alpha, side);
  const std::vector<double> pmf = poisson_binomial_pmf(p);
  const int q = p.q();
  // r negative signs <=> q - r positive signs.
  std::vector<double> by_negatives(q + 1);
  for (int r = 0; r <= q; ++r) by_negatives[r] = pmf[q - r];
  return combine_tail_pairs(by_negatives, cc);
}

std::vector<PowerPoint> power_curve(std::span<const double> sigma, double mu0,
                                    std::span<const double> mu_grid,
                                    double alpha, Side side) {
  if (sigma.empty()) {
    throw Error(ErrorKind::kInvalidSigma, "sigma must be nonempty");
  }
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(std::isfinite(sigma[i]) && sigma[i] > 0.0)) {
      throw Error(ErrorKind::kInvalidSigma,
                  "sigma[" + std::to_string(i) + "] must be positive", i);
    }
  }
  std::vector<PowerPoint> curve;
  curve.reserve(mu_grid.size());
  std::vector<double> p(sigma.size());
  for (const double mu : mu_grid) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      p[i] = normal_cdf((mu - mu0) / sigma[i]);
    }
    curve.push_back({mu, rejection_rate(MarginalProbabilities(p), alpha, side)});
  }
  return curve;
}

}  // namespace signtest
