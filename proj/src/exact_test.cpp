#include "signtest/exact_test.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "signtest/combinatorics.hpp"
#include "signtest/errors.hpp"

namespace signtest {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kZeroEntry: return "ZeroEntry";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kOrderTooLarge: return "OrderTooLarge";
    case ErrorKind::kNonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorKind::kInvalidR: return "InvalidR";
    case ErrorKind::kInvalidRho: return "InvalidRho";
    case ErrorKind::kInvalidSigma: return "InvalidSigma";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* to_string(Side side) {
  return side == Side::kTwoSided ? "two" : "greater";
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "sample must be nonempty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "sample entry " + std::to_string(i) + " is not finite", i);
    }
  }
}

void TestSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::kInvalidSpec,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!std::isfinite(mu0)) {
    throw Error(ErrorKind::kInvalidSpec, "mu0 must be finite");
  }
}

namespace {

void require_nonempty(std::span<const double> y) {
  if (y.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "sample must be nonempty");
  }
}

int sign_of(double v, std::size_t index) {
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  throw Error(ErrorKind::kZeroEntry,
              "observation " + std::to_string(index) +
                  " equals the null median; ties are not allowed",
              index);
}

// Null probability that the two-sided statistic equals q - 2r, i.e. that
// the sample has exactly r positive or exactly r negative signs. The central
// value (2r == q) is a single event.
long double two_sided_mass(int q, int r) {
  const long double p = fair_binomial_pmf(q, r);
  return 2 * r == q ? p : 2 * p;
}

long double boundary_mass(int q, int m, Side side) {
  return side == Side::kTwoSided ? two_sided_mass(q, m)
                                 : fair_binomial_pmf(q, m);
}

}  // namespace

int two_sided_statistic(std::span<const double> y) {
  return std::abs(one_sided_statistic(y));
}

int one_sided_statistic(std::span<const double> y) {
  require_nonempty(y);
  int sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += sign_of(y[i], i);
  return sum;
}

int statistic(std::span<const double> y, Side side) {
  return side == Side::kTwoSided ? two_sided_statistic(y)
                                 : one_sided_statistic(y);
}

CriticalConstants critical_constants(int q, double alpha, Side side) {
  if (q < 1) {
    throw Error(ErrorKind::kInvalidArgument, "q must be positive");
  }
  TestSpec{0.0, alpha, side}.validate();

  // Walk the extreme statistic values from the most extreme inward until
  // the accumulated null mass reaches alpha.
  const int m_max = side == Side::kTwoSided ? q / 2 : q;
  const long double target = alpha;
  long double below = 0.0L;
  int m = 0;
  for (; m < m_max; ++m) {
    const long double upto = below + boundary_mass(q, m, side);
    if (target <= upto * (1.0L + 1e-14L)) break;
    below = upto;
  }
  const long double mass = boundary_mass(q, m, side);
  const double gamma =
      static_cast<double>(std::clamp((target - below) / mass, 0.0L, 1.0L));
  return CriticalConstants{q, m, gamma, q - 2 * m};
}

double null_probability_of_statistic(int q, int t, Side side) {
  if ((q - t) % 2 != 0 || t > q) return 0.0;
  if (side == Side::kTwoSided) {
    if (t < 0) return 0.0;
    return static_cast<double>(two_sided_mass(q, (q - t) / 2));
  }
  if (t < -q) return 0.0;
  return static_cast<double>(fair_binomial_pmf(q, (q - t) / 2));
}

double null_upper_tail(int q, int t, Side side) {
  long double tail = 0.0L;
  const int lowest = side == Side::kTwoSided ? (q % 2) : -q;
  for (int v = q; v >= std::max(t, lowest); v -= 2) {
    tail += null_probability_of_statistic(q, v, side);
  }
  return static_cast<double>(std::min(tail, 1.0L));
}

double rejection_probability(int statistic, const CriticalConstants& cc) {
  if (statistic > cc.critical_t) return 1.0;
  if (statistic == cc.critical_t) return cc.gamma;
  return 0.0;
}

TestOutcome run_test(std::span<const double> x, const TestSpec& spec) {
  spec.validate();
  require_nonempty(x);
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v -= spec.mu0;

  const int q = static_cast<int>(y.size());
  const CriticalConstants cc = critical_constants(q, spec.alpha, spec.side);

  TestOutcome out;
  out.statistic = statistic(y, spec.side);
  out.critical_t = cc.critical_t;
  out.phi = rejection_probability(out.statistic, cc);
  out.p_value = null_upper_tail(q, out.statistic, spec.side);
  return out;
}

TestOutcome run_test(const Sample& x, const TestSpec& spec) {
  return run_test(x.values(), spec);
}

std::vector<int> enumerate_group_statistics(std::span<const double> y,
                                            Side side) {
  require_nonempty(y);
  if (y.size() > static_cast<std::size_t>(kMaxEnumerationSize)) {
    throw Error(ErrorKind::kTooLarge,
                "enumeration limited to q <= " +
                    std::to_string(kMaxEnumerationSize));
  }
  const int q = static_cast<int>(y.size());
  std::uint32_t positive = 0;
  for (int i = 0; i < q; ++i) {
    if (sign_of(y[i], static_cast<std::size_t>(i)) > 0) positive |= 1u << i;
  }
  const std::uint32_t all = (q == 32) ? ~0u : ((1u << q) - 1u);
  const std::uint32_t negative = all & ~positive;

  std::vector<int> out(std::size_t{1} << q);
  for (std::uint32_t g = 0; g <= all; ++g) {
    // Coordinates whose sign survives the flip pattern g.
    const std::uint32_t pos_after = (positive & ~g) | (negative & g);
    const int t = 2 * std::popcount(pos_after) - q;
    out[g] = side == Side::kTwoSided ? std::abs(t) : t;
    if (g == all) break;
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

bool randomized_decision(const TestOutcome& outcome, std::uint64_t seed) {
  if (outcome.phi >= 1.0) return true;
  if (outcome.phi <= 0.0) return false;
  return unit_interval(splitmix64(seed)) < outcome.phi;
}

}  // namespace signtest
