#include "signtest/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <thread>

#include "signtest/errors.hpp"

namespace signtest {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_rho(double rho, double lo, double hi) {
  if (!(rho >= lo && rho <= hi)) {
    throw Error(ErrorKind::kInvalidRho,
                "rho must lie in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "], got " + std::to_string(rho));
  }
}

void check_mu(double mu) {
  if (!std::isfinite(mu)) {
    throw Error(ErrorKind::kInvalidArgument, "mu must be finite");
  }
}

// Draws one observation vector into out (size == dimension).
class Drawer {
 public:
  explicit Drawer(const SamplerSpec& sampler) : sampler_(sampler) {}

  void operator()(std::mt19937_64& engine, std::span<double> out) {
    std::visit(
        Overloaded{
            [&](const IndependentNormalSampler& s) {
              for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = s.mu + s.sigma[i] * normal_(engine);
              }
            },
            [&](const EquicorrelatedSampler& s) {
              const double common = std::sqrt(s.rho) * normal_(engine);
              const double own = std::sqrt(1.0 - s.rho);
              for (double& v : out) v = s.mu + common + own * normal_(engine);
            },
            [&](const MinimalPairSampler& s) {
              const double z1 = normal_(engine);
              const double z2 = normal_(engine);
              out[0] = s.mu + z1;
              out[1] = s.mu + s.rho * z1 + std::sqrt(1.0 - s.rho * s.rho) * z2;
              for (std::size_t i = 2; i < out.size(); ++i) {
                out[i] = s.mu + normal_(engine);
              }
            },
        },
        sampler_);
  }

 private:
  const SamplerSpec& sampler_;
  std::normal_distribution<double> normal_;
};

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(block)));
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct BlockTotals {
  CompensatedSum phi;
  CompensatedSum phi_sq;
  std::uint64_t redraws = 0;
};

}  // namespace

void validate(const SamplerSpec& sampler) {
  std::visit(
      Overloaded{
          [](const IndependentNormalSampler& s) {
            check_mu(s.mu);
            if (s.sigma.empty()) {
              throw Error(ErrorKind::kInvalidSigma, "sigma must be nonempty");
            }
            for (std::size_t i = 0; i < s.sigma.size(); ++i) {
              if (!(std::isfinite(s.sigma[i]) && s.sigma[i] > 0.0)) {
                throw Error(ErrorKind::kInvalidSigma,
                            "sigma[" + std::to_string(i) + "] must be positive",
                            i);
              }
            }
          },
          [](const EquicorrelatedSampler& s) {
            check_mu(s.mu);
            if (s.q < 1) throw Error(ErrorKind::kInvalidArgument, "q must be >= 1");
            check_rho(s.rho, 0.0, 1.0);
          },
          [](const MinimalPairSampler& s) {
            check_mu(s.mu);
            if (s.q < 2) throw Error(ErrorKind::kInvalidArgument, "q must be >= 2");
            check_rho(s.rho, -1.0, 1.0);
          },
      },
      sampler);
}

int dimension(const SamplerSpec& sampler) {
  return std::visit(
      Overloaded{
          [](const IndependentNormalSampler& s) {
            return static_cast<int>(s.sigma.size());
          },
          [](const EquicorrelatedSampler& s) { return s.q; },
          [](const MinimalPairSampler& s) { return s.q; },
      },
      sampler);
}

std::vector<Sample> sample(const SamplerSpec& sampler, std::size_t count,
                           std::uint64_t seed) {
  validate(sampler);
  const std::size_t q = static_cast<std::size_t>(dimension(sampler));
  std::vector<Sample> out;
  out.reserve(count);
  std::vector<double> buffer(q);
  for (std::size_t begin = 0; begin < count; begin += kReplicationsPerBlock) {
    auto engine = block_engine(seed, begin / kReplicationsPerBlock);
    Drawer draw(sampler);
    const std::size_t end = std::min(count, begin + kReplicationsPerBlock);
    for (std::size_t i = begin; i < end; ++i) {
      draw(engine, buffer);
      out.emplace_back(buffer);
    }
  }
  return out;
}

std::vector<Sample> sample_equicorrelated(int q, double rho, double mu,
                                          std::size_t count,
                                          std::uint64_t seed) {
  return sample(EquicorrelatedSampler{q, rho, mu}, count, seed);
}

std::vector<Sample> sample_minimal_pair(int q, double rho, double mu,
                                        std::size_t count,
                                        std::uint64_t seed) {
  return sample(MinimalPairSampler{q, rho, mu}, count, seed);
}

SimulationReport estimate_rejection(const SamplerSpec& sampler,
                                    const TestSpec& spec, std::uint64_t reps,
                                    std::uint64_t seed,
                                    const SimulationOptions& options) {
  spec.validate();
  validate(sampler);
  if (reps == 0) {
    throw Error(ErrorKind::kInvalidArgument, "replications must be >= 1");
  }
  const int q = dimension(sampler);
  const CriticalConstants cc = critical_constants(q, spec.alpha, spec.side);

  const std::uint64_t blocks =
      (reps + kReplicationsPerBlock - 1) / kReplicationsPerBlock;
  std::vector<BlockTotals> totals(blocks);

  auto run_block = [&](std::uint64_t b) {
    auto engine = block_engine(seed, b);
    Drawer draw(sampler);
    std::vector<double> y(static_cast<std::size_t>(q));
    BlockTotals& t = totals[b];
    const std::uint64_t begin = b * kReplicationsPerBlock;
    const std::uint64_t end = std::min(reps, begin + kReplicationsPerBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      int stat = 0;
      for (;;) {
        draw(engine, y);
        for (double& v : y) v -= spec.mu0;
        try {
          stat = statistic(y, spec.side);
          break;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kZeroEntry) throw;
          ++t.redraws;
        }
      }
      double phi = rejection_probability(stat, cc);
      if (options.estimator == Estimator::kCoinFlip) {
        TestOutcome outcome;
        outcome.phi = phi;
        phi = randomized_decision(outcome, engine()) ? 1.0 : 0.0;
      }
      t.phi.add(phi);
      t.phi_sq.add(phi * phi);
    }
  };

  unsigned threads = options.threads != 0 ? options.threads
                                          : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads, 1, blocks));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  CompensatedSum sum;
  CompensatedSum sum_sq;
  SimulationReport report;
  for (const BlockTotals& t : totals) {
    sum.add(t.phi.value());
    sum_sq.add(t.phi_sq.value());
    report.tie_redraws += t.redraws;
  }
  const double n = static_cast<double>(reps);
  const double mean = sum.value() / n;
  double variance = 0.0;
  if (reps > 1) {
    variance = std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0));
  }
  report.replications = reps;
  report.mean_phi = std::clamp(mean, 0.0, 1.0);
  report.std_error = std::sqrt(variance / n);
  constexpr double kZ95 = 1.959963984540054;
  report.ci95 = {report.mean_phi - kZ95 * report.std_error,
                 report.mean_phi + kZ95 * report.std_error};
  report.seed = seed;
  report.estimator = options.estimator;
  return report;
}

}  // namespace signtest
