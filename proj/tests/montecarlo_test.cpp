#include "signtest/montecarlo.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "signtest/correlated_size.hpp"
#include "signtest/errors.hpp"
#include "signtest/power.hpp"

namespace signtest {
namespace {

struct Moments {
  std::vector<double> mean;
  std::vector<std::vector<double>> corr;
};

Moments moments(const std::vector<Sample>& draws) {
  const std::size_t q = draws.front().size();
  const double n = static_cast<double>(draws.size());
  Moments m{std::vector<double>(q, 0.0),
            std::vector<std::vector<double>>(q, std::vector<double>(q, 0.0))};
  for (const auto& s : draws) {
    for (std::size_t i = 0; i < q; ++i) m.mean[i] += s.values()[i] / n;
  }
  std::vector<std::vector<double>> cov(q, std::vector<double>(q, 0.0));
  for (const auto& s : draws) {
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        cov[i][j] += (s.values()[i] - m.mean[i]) *
                     (s.values()[j] - m.mean[j]) / (n - 1);
      }
    }
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      m.corr[i][j] = cov[i][j] / std::sqrt(cov[i][i] * cov[j][j]);
    }
    m.corr[i][i] = cov[i][i];  // keep the variance on the diagonal
  }
  return m;
}

TEST(Sampler, EquicorrelatedMoments) {
  const auto draws = sample_equicorrelated(4, 0.6, 1.5, 100000, 7);
  ASSERT_EQ(draws.size(), 100000u);
  const auto m = moments(draws);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(m.mean[i], 1.5, 0.02);
    EXPECT_NEAR(m.corr[i][i], 1.0, 0.02);
    for (int j = 0; j < 4; ++j) {
      if (i != j) EXPECT_NEAR(m.corr[i][j], 0.6, 0.01);
    }
  }
}

TEST(Sampler, MinimalPairMoments) {
  const auto draws = sample_minimal_pair(4, -0.7, 0.0, 100000, 11);
  const auto m = moments(draws);
  EXPECT_NEAR(m.corr[0][1], -0.7, 0.01);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(m.mean[i], 0.0, 0.02);
    EXPECT_NEAR(m.corr[i][i], 1.0, 0.02);
    for (int j = 0; j < 4; ++j) {
      if (i != j && !(i + j == 1)) EXPECT_NEAR(m.corr[i][j], 0.0, 0.01);
    }
  }
}

TEST(Sampler, IndependentScales) {
  const auto draws =
      sample(IndependentNormalSampler{2.0, {0.5, 3.0}}, 100000, 13);
  const auto m = moments(draws);
  EXPECT_NEAR(m.mean[0], 2.0, 0.01);
  EXPECT_NEAR(m.mean[1], 2.0, 0.05);
  EXPECT_NEAR(m.corr[0][0], 0.25, 0.01);
  EXPECT_NEAR(m.corr[1][1], 9.0, 0.2);
  EXPECT_NEAR(m.corr[0][1], 0.0, 0.01);
}

TEST(Sampler, PerfectCorrelationRepeatsCoordinates) {
  for (const auto& s : sample_equicorrelated(5, 1.0, 0.3, 100, 3)) {
    for (double v : s.values()) EXPECT_EQ(v, s.values()[0]);
  }
  for (const auto& s : sample_minimal_pair(3, 1.0, 0.0, 100, 3)) {
    EXPECT_EQ(s.values()[0], s.values()[1]);
  }
}

TEST(Sampler, DeterministicAndPrefixStable) {
  const auto a = sample_equicorrelated(3, 0.4, 0.0, 10000, 99);
  const auto b = sample_equicorrelated(3, 0.4, 0.0, 5000, 99);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_TRUE(std::ranges::equal(a[i].values(), b[i].values()));
  }
  const auto c = sample_equicorrelated(3, 0.4, 0.0, 10, 100);
  EXPECT_FALSE(std::ranges::equal(a[0].values(), c[0].values()));
}

TEST(Sampler, RejectsBadParameters) {
  EXPECT_THROW(sample_equicorrelated(3, 1.2, 0.0, 1, 0), Error);
  EXPECT_THROW(sample_equicorrelated(3, -0.1, 0.0, 1, 0), Error);
  EXPECT_THROW(sample_minimal_pair(1, 0.5, 0.0, 1, 0), Error);
  EXPECT_THROW(sample(IndependentNormalSampler{0.0, {1.0, -1.0}}, 1, 0), Error);
  EXPECT_THROW(sample(IndependentNormalSampler{0.0, {}}, 1, 0), Error);
}

TEST(Simulation, BitIdenticalAcrossThreadCounts) {
  const SamplerSpec sampler = EquicorrelatedSampler{6, 0.3, 0.0};
  const TestSpec spec{0.0, 0.05, Side::kTwoSided};
  const auto one = estimate_rejection(sampler, spec, 50000, 5, {.threads = 1});
  for (const unsigned threads : {2u, 3u, 8u}) {
    const auto many =
        estimate_rejection(sampler, spec, 50000, 5, {.threads = threads});
    EXPECT_EQ(one.mean_phi, many.mean_phi);
    EXPECT_EQ(one.std_error, many.std_error);
    EXPECT_EQ(one.tie_redraws, many.tie_redraws);
  }
  const auto again = estimate_rejection(sampler, spec, 50000, 5);
  EXPECT_EQ(one.mean_phi, again.mean_phi);
}

// Under independence phi has mean exactly alpha; the only error left is
// sampling noise.
TEST(Simulation, NullRateMatchesAlpha) {
  for (const Side side : {Side::kTwoSided, Side::kOneSidedGreater}) {
    const auto r = estimate_rejection(IndependentNormalSampler{0.0, std::vector<double>(8, 1.0)},
                                      {0.0, 0.05, side}, 200000, 21);
    EXPECT_NEAR(r.mean_phi, 0.05, 4 * r.std_error);
    EXPECT_LT(r.std_error, 0.001);
    EXPECT_EQ(r.replications, 200000u);
    EXPECT_LT(r.ci95.first, r.mean_phi);
    EXPECT_GT(r.ci95.second, r.mean_phi);
  }
}

TEST(Simulation, AgreesWithClosedForms) {
  const auto rule = gauss_hermite(kDefaultQuadratureOrder);
  const auto equi = estimate_rejection(EquicorrelatedSampler{7, 0.3, 0.0},
                                       {0.0, 0.05, Side::kTwoSided}, 200000, 1);
  EXPECT_NEAR(equi.mean_phi, equicorrelated_size({7, 0.3}, 0.05, rule),
              4 * equi.std_error);

  const auto pair = estimate_rejection(MinimalPairSampler{7, 0.8, 0.0},
                                       {0.0, 0.05, Side::kTwoSided}, 200000, 2);
  EXPECT_NEAR(pair.mean_phi, minimal_pair_size({7, 0.8}, 0.05),
              4 * pair.std_error);

  const std::vector<double> sigma{1.0, 2.0, 0.5, 1.5, 3.0};
  const auto shifted = estimate_rejection(IndependentNormalSampler{0.4, sigma},
                                          {0.0, 0.1, Side::kTwoSided}, 200000, 3);
  const auto curve = power_curve(sigma, 0.0, std::vector<double>{0.4}, 0.1);
  EXPECT_NEAR(shifted.mean_phi, curve[0].power, 4 * shifted.std_error);
}

TEST(Simulation, LargeShiftRejects) {
  const auto r = estimate_rejection(EquicorrelatedSampler{10, 0.0, 5.0},
                                    {0.0, 0.05, Side::kTwoSided}, 20000, 4);
  EXPECT_GT(r.mean_phi, 0.95);
  const auto centred = estimate_rejection(EquicorrelatedSampler{10, 0.0, 5.0},
                                          {5.0, 0.05, Side::kTwoSided}, 20000, 4);
  EXPECT_NEAR(centred.mean_phi, 0.05, 4 * centred.std_error);
}

TEST(Simulation, CoinFlipAgreesWithLargerError) {
  const SamplerSpec sampler = EquicorrelatedSampler{5, 0.5, 0.0};
  const TestSpec spec{0.0, 0.05, Side::kTwoSided};
  const auto smooth = estimate_rejection(sampler, spec, 200000, 8);
  const auto flips = estimate_rejection(sampler, spec, 200000, 8,
                                        {.estimator = Estimator::kCoinFlip});
  EXPECT_EQ(flips.estimator, Estimator::kCoinFlip);
  EXPECT_LT(smooth.std_error, flips.std_error);
  EXPECT_NEAR(smooth.mean_phi, flips.mean_phi,
              4 * std::hypot(smooth.std_error, flips.std_error));
  const auto flips_again = estimate_rejection(
      sampler, spec, 200000, 8, {.estimator = Estimator::kCoinFlip, .threads = 3});
  EXPECT_EQ(flips.mean_phi, flips_again.mean_phi);
}

// Near 1e20 adjacent doubles are 16384 apart, so a draw of 1e20 + 1e5 z
// rounds to exactly mu0 about 6.5% of the time; those replications must be
// redrawn rather than rejected or counted as ties.
TEST(Simulation, RedrawsTies) {
  const auto r = estimate_rejection(IndependentNormalSampler{1e20, {1e5, 1e5}},
                                    {1e20, 0.1, Side::kTwoSided}, 20000, 4);
  EXPECT_GT(r.tie_redraws, 500u);
  EXPECT_LT(r.tie_redraws, 5000u);
  EXPECT_NEAR(r.mean_phi, 0.1, 4 * r.std_error);
}

TEST(Simulation, RejectsBadArguments) {
  const SamplerSpec sampler = EquicorrelatedSampler{3, 0.5, 0.0};
  EXPECT_THROW(estimate_rejection(sampler, {0.0, 0.05, Side::kTwoSided}, 0, 1),
               Error);
  EXPECT_THROW(estimate_rejection(sampler, {0.0, 1.5, Side::kTwoSided}, 10, 1),
               Error);
}

}  // namespace
}  // namespace signtest
