#include "signtest/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace signtest {

namespace {

constexpr int kRescaleExponent = 512;
constexpr long double kRescaleThreshold = 0x1.0p512L;

struct HermiteEval {
  long double value = 0.0L;     // p_n(x), scaled
  long double previous = 0.0L;  // p_{n-1}(x), same scale
  int exponent = 0;             // true values = scaled * 2^exponent
};

// Orthonormal Hermite polynomials for the weight exp(-x^2):
//   p_0 = pi^{-1/4},  p_j = x sqrt(2/j) p_{j-1} - sqrt((j-1)/j) p_{j-2}.
// Values grow like exp(x^2 / 2) near the largest roots, so the pair is
// renormalized by a power of two whenever it gets large.
class HermiteRecurrence {
 public:
  explicit HermiteRecurrence(int n) : n_(n), a_(n + 1), b_(n + 1) {
    for (int j = 1; j <= n; ++j) {
      a_[j] = std::sqrt(2.0L / j);
      b_[j] = std::sqrt((j - 1.0L) / j);
    }
  }

  HermiteEval operator()(long double x) const {
    long double p1 =
        1.0L / std::sqrt(std::sqrt(std::numbers::pi_v<long double>));
    long double p2 = 0.0L;
    int exponent = 0;
    for (int j = 1; j <= n_; ++j) {
      const long double p3 = p2;
      p2 = p1;
      p1 = x * a_[j] * p2 - b_[j] * p3;
      if (std::fabs(p1) > kRescaleThreshold) {
        p1 = std::ldexp(p1, -kRescaleExponent);
        p2 = std::ldexp(p2, -kRescaleExponent);
        exponent += kRescaleExponent;
      }
    }
    return {p1, p2, exponent};
  }

  // p_n / p_n' with p_n' = sqrt(2n) p_{n-1}; the scale cancels.
  long double newton_step(const HermiteEval& e) const {
    return e.value / (std::sqrt(2.0L * n_) * e.previous);
  }

 private:
  int n_;
  std::vector<long double> a_;
  std::vector<long double> b_;
};

bool sign_differs(long double a, long double b) {
  return (a < 0.0L) != (b < 0.0L);
}

// Newton iteration safeguarded by bisection inside a sign-change bracket.
long double refine_root(const HermiteRecurrence& p, long double lo,
                        long double hi) {
  long double f_lo = p(lo).value;
  long double x = 0.5L * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const HermiteEval e = p(x);
    if (e.value == 0.0L) return x;
    if (sign_differs(f_lo, e.value)) {
      hi = x;
    } else {
      lo = x;
      f_lo = e.value;
    }
    const long double step = p.newton_step(e);
    long double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    const bool converged =
        std::fabs(next - x) <= 4e-19L * std::max(1.0L, std::fabs(x));
    x = next;
    if (converged) break;
  }
  return x;
}

// Positive roots of the degree-n physicists' Hermite polynomial, ascending.
// Marches outward with a stride well below the local root spacing
// pi / sqrt(2n + 1 - x^2), floored near the turning point where the roots
// follow Airy spacing.
std::vector<long double> positive_roots(const HermiteRecurrence& p, int n) {
  const std::size_t wanted = static_cast<std::size_t>(n / 2);
  std::vector<long double> roots;
  roots.reserve(wanted);
  const long double nu = 2.0L * n + 1.0L;
  const long double floor_sq = std::cbrt(nu);
  const long double limit = std::sqrt(nu) + 2.0L;

  long double x = 0.0L;
  if (n % 2 == 1) x = 0.05L * std::numbers::pi_v<long double> / std::sqrt(nu);
  long double fx = p(x).value;
  while (roots.size() < wanted && x < limit) {
    const long double local = std::max(nu - x * x, floor_sq);
    const long double next =
        x + 0.1L * std::numbers::pi_v<long double> / std::sqrt(local);
    const long double fn = p(next).value;
    if (fn == 0.0L) {
      roots.push_back(next);
    } else if (sign_differs(fx, fn)) {
      roots.push_back(refine_root(p, x, next));
    }
    x = next;
    fx = fn;
  }
  if (roots.size() != wanted) {
    throw std::logic_error("Gauss-Hermite root march found " +
                           std::to_string(roots.size()) + " of " +
                           std::to_string(wanted) + " positive roots");
  }
  return roots;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  if (n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "quadrature order must be >= 1");
  }
  if (n > kMaxQuadratureOrder) {
    throw Error(ErrorKind::kOrderTooLarge,
                "quadrature order " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxQuadratureOrder));
  }

  const HermiteRecurrence p(n);
  std::vector<long double> x = positive_roots(p, n);
  if (n % 2 == 1) x.insert(x.begin(), 0.0L);

  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double scale = std::numbers::sqrt2_v<long double>;
  const long double norm = 1.0L / std::sqrt(std::numbers::pi_v<long double>);
  const int center = n / 2;  // index of the smallest nonnegative node
  for (std::size_t k = 0; k < x.size(); ++k) {
    const HermiteEval e = p(x[k]);
    // w = 2 / p_n'(x)^2 = 1 / (n p_{n-1}(x)^2) for the weight exp(-x^2).
    const long double weight =
        norm * std::ldexp(1.0L / (n * e.previous * e.previous),
                          -2 * e.exponent);
    const double node = static_cast<double>(scale * x[k]);
    const std::size_t right = static_cast<std::size_t>(center) + k;
    const std::size_t left = static_cast<std::size_t>(n - 1) - right;
    rule.nodes[right] = node;
    rule.nodes[left] = node == 0.0 ? 0.0 : -node;
    rule.weights[right] = weight;
    rule.weights[left] = weight;
  }
  return rule;
}

long double normal_moment(int k) {
  if (k < 0) return 0.0L;
  if (k % 2 == 1) return 0.0L;
  long double m = 1.0L;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

QuadratureCheck check_rule(const QuadratureRule& rule, int max_degree,
                           double tolerance) {
  QuadratureCheck c;
  c.order = rule.order;
  c.max_degree = std::min(max_degree, 2 * rule.order - 1);

  const std::size_t n = rule.nodes.size();
  c.symmetric = n == static_cast<std::size_t>(rule.order) &&
                rule.weights.size() == n;
  c.increasing = true;
  c.positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (rule.nodes[i] != -rule.nodes[n - 1 - i] ||
        rule.weights[i] != rule.weights[n - 1 - i]) {
      c.symmetric = false;
    }
    if (!(rule.weights[i] > 0.0L)) c.positive = false;
    if (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1])) c.increasing = false;
  }

  long double total = 0.0L;
  for (const long double wi : rule.weights) total += wi;
  c.weight_sum_error = static_cast<double>(std::fabs(total - 1.0L));

  for (int k = 0; k <= c.max_degree; ++k) {
    // Symmetric pairs: odd moments cancel exactly.
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n / 2; ++i) {
      const long double zl = rule.nodes[i];
      const long double zr = rule.nodes[n - 1 - i];
      sum += rule.weights[i] * std::pow(zl, k) +
             rule.weights[n - 1 - i] * std::pow(zr, k);
    }
    if (n % 2 == 1) sum += rule.weights[n / 2] * (k == 0 ? 1.0L : 0.0L);
    const long double exact = normal_moment(k);
    const long double err = std::fabs(sum - exact) / std::max(1.0L, exact);
    c.max_relative_error =
        std::max(c.max_relative_error, static_cast<double>(err));
  }
  c.passed = c.symmetric && c.increasing && c.positive &&
             c.max_relative_error <= tolerance &&
             c.weight_sum_error <= tolerance;
  return c;
}

}  // namespace signtest
