#pragma once

// Monte Carlo estimate of the sign test's rejection rate.
//
// Replications are grouped into fixed-size blocks; block b draws from a
// generator seeded by splitmix64(seed, b), and block totals are reduced in
// block order. Results are therefore bit-identical for any thread count.

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "signtest/exact_test.hpp"

namespace signtest {

// Independent N(mu, sigma_i^2) coordinates.
struct IndependentNormalSampler {
  double mu = 0.0;
  std::vector<double> sigma;
};

// Y_i = mu + sqrt(rho) Z_0 + sqrt(1 - rho) Z_i.
struct EquicorrelatedSampler {
  int q = 1;
  double rho = 0.0;
  double mu = 0.0;
};

// Corr(Y_1, Y_2) = rho, every other pair independent, unit variances.
struct MinimalPairSampler {
  int q = 2;
  double rho = 0.0;
  double mu = 0.0;
};

using SamplerSpec = std::variant<IndependentNormalSampler,
                                 EquicorrelatedSampler, MinimalPairSampler>;

// Throws Error{kInvalidRho} / Error{kInvalidSigma} / Error{kInvalidArgument}
// for out-of-range parameters.
void validate(const SamplerSpec& sampler);
int dimension(const SamplerSpec& sampler);

inline constexpr std::size_t kReplicationsPerBlock = 4096;

// Draws i = 0..count-1; draw i is the same vector replication i of
// estimate_rejection sees for the same seed (before any tie redraw).
std::vector<Sample> sample(const SamplerSpec& sampler, std::size_t count,
                           std::uint64_t seed);

std::vector<Sample> sample_equicorrelated(int q, double rho, double mu,
                                          std::size_t count,
                                          std::uint64_t seed);
std::vector<Sample> sample_minimal_pair(int q, double rho, double mu,
                                        std::size_t count, std::uint64_t seed);

enum class Estimator {
  // Average of the rejection probability phi (default).
  kExpectedPhi,
  // Average of seeded coin flips with success probability phi.
  kCoinFlip,
};

struct SimulationOptions {
  Estimator estimator = Estimator::kExpectedPhi;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SimulationReport {
  std::uint64_t replications = 0;
  double mean_phi = 0.0;
  double std_error = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
  std::uint64_t seed = 0;
  // Replications redrawn because an observation tied mu0 exactly.
  std::uint64_t tie_redraws = 0;
  Estimator estimator = Estimator::kExpectedPhi;
};

// Throws Error{kInvalidArgument} when reps == 0, and propagates spec and
// sampler validation errors.
SimulationReport estimate_rejection(const SamplerSpec& sampler,
                                    const TestSpec& spec, std::uint64_t reps,
                                    std::uint64_t seed,
                                    const SimulationOptions& options = {});

}  // namespace signtest
