#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "tnfit/estimator.hpp"
#include "tnfit/synth.hpp"

using tnfit::Interval;
using tnfit::SamplerConfig;
using tnfit::SamplerMethod;
using tnfit::TruncatedModel;

TEST(SplitMix64, ReferenceSequence) {
  // First outputs for seed 1234567, cross-checked with a Python port.
  tnfit::SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
}

TEST(Sample, DeterministicPerSeed) {
  const TruncatedModel m{0.4, 0.9, {-1.0, 2.0}};
  SamplerConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(tnfit::sample(m, 1000, cfg), tnfit::sample(m, 1000, cfg));
  cfg.method = SamplerMethod::Rejection;
  EXPECT_EQ(tnfit::sample(m, 1000, cfg), tnfit::sample(m, 1000, cfg));
  SamplerConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(tnfit::sample(m, 1000, cfg), tnfit::sample(m, 1000, other));
}

TEST(Sample, UniformMean) {
  SamplerConfig cfg;
  cfg.seed = 1;
  const auto data = tnfit::sample({0.0, 0.0, {0.0, 1.0}}, 100'000, cfg);
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  EXPECT_NEAR(mean, 0.5, 0.01);
}

TEST(Sample, TruncatedExponentialKolmogorovSmirnov) {
  for (auto method : {SamplerMethod::InverseCdfTable, SamplerMethod::Rejection}) {
    SamplerConfig cfg;
    cfg.seed = 77;
    cfg.method = method;
    const auto data = tnfit::sample({1.0, 0.0, {0.0, 10.0}}, 100'000, cfg);
    const double d = oracle::ks_statistic(
        data, [](double y) { return oracle::truncated_exponential_cdf(1.0, 10.0, y); });
    EXPECT_LT(d, 0.01);
  }
}

TEST(Sample, StaysInsideSupport) {
  tnfit::SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const double lo = -5.0 + 4.0 * rng.uniform();
    const Interval iv{lo, lo + 0.2 + 5.0 * rng.uniform()};
    const TruncatedModel m{-8.0 + 16.0 * rng.uniform(), -3.0 + 8.0 * rng.uniform(), iv};
    for (auto method : {SamplerMethod::InverseCdfTable, SamplerMethod::Rejection}) {
      SamplerConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(trial);
      cfg.method = method;
      for (double y : tnfit::sample(m, 2000, cfg)) {
        ASSERT_GE(y, iv.lo);
        ASSERT_LE(y, iv.hi);
      }
    }
  }
}

TEST(Sample, MomentsConvergeAtMonteCarloRate) {
  tnfit::SplitMix64 rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const double lo = -3.0 + 2.0 * rng.uniform();
    const TruncatedModel m{-2.0 + 4.0 * rng.uniform(), 0.1 + 2.0 * rng.uniform(),
                           {lo, lo + 2.0 + 4.0 * rng.uniform()}};
    SamplerConfig cfg;
    cfg.seed = 900 + static_cast<std::uint64_t>(trial);
    const auto s = tnfit::compute_moments(tnfit::sample(m, 100'000, cfg));
    const auto e = tnfit::model_moments(m);
    const double n = 100'000.0;
    EXPECT_LE(std::abs(s.m1 - e.e1), 5.0 * std::sqrt((e.e2 - e.e1 * e.e1) / n));
    EXPECT_LE(std::abs(s.m2 - e.e2), 5.0 * std::sqrt((e.e4 - e.e2 * e.e2) / n));
  }
}

TEST(Sample, Errors) {
  SamplerConfig cfg;
  EXPECT_THROW(tnfit::sample({0.0, 0.0, {0.0, 1.0}}, 0, cfg), tnfit::Error);
  cfg.table_resolution = 100;
  EXPECT_THROW(tnfit::sample({0.0, 0.0, {0.0, 1.0}}, 5, cfg), tnfit::Error);
  cfg.method = SamplerMethod::Rejection;
  EXPECT_NO_THROW(tnfit::sample({0.0, 0.0, {0.0, 1.0}}, 5, cfg));
}

TEST(CdfTable, MonotoneAndSpansUnitInterval) {
  for (const TruncatedModel& m : {TruncatedModel{3.0, -1.0, {-2.0, 2.0}},
                                  TruncatedModel{0.0, 40.0, {-5.0, 5.0}},
                                  TruncatedModel{-20.0, 0.0, {0.0, 1.0}}}) {
    const tnfit::CdfTable table(m, 4096);
    const auto cdf = table.cdf();
    EXPECT_NEAR(cdf.front(), 0.0, 1e-9);
    EXPECT_NEAR(cdf.back(), 1.0, 1e-9);
    for (std::size_t i = 1; i < cdf.size(); ++i) ASSERT_GE(cdf[i], cdf[i - 1]);
    EXPECT_DOUBLE_EQ(table.quantile(0.0), table.knots().front());
    EXPECT_DOUBLE_EQ(table.quantile(1.0), table.knots().back());
  }
}

TEST(GridOracle, UniformSampleFindsOrigin) {
  std::vector<double> data;
  for (int i = 0; i <= 200; ++i) data.push_back(-1.0 + i / 100.0);  // evenly spaced on [-1, 1]
  const auto s = tnfit::compute_moments(data);
  const auto fit = tnfit::fit(s, {-1.0, 1.0});
  const auto g = tnfit::grid_mle_oracle(data, {-1.0, 1.0}, {-2.0, 2.0}, {-2.0, 2.0}, 41);
  const double final_cell = 4.0 / 40 / 100;
  // The evenly spaced grid is not exactly uniform, so compare to the fit.
  EXPECT_NEAR(g.alpha, fit.model.alpha(), final_cell);
  EXPECT_NEAR(g.psi, fit.model.psi(), final_cell);
  EXPECT_NEAR(g.alpha, 0.0, 0.05);
  EXPECT_NEAR(g.psi, 0.0, 0.05);
}

TEST(GridOracle, AgreesWithEstimator) {
  const Interval iv{-2.0, 2.0};
  SamplerConfig cfg;
  cfg.seed = 314;
  const auto data = tnfit::sample({0.5, 0.8, iv}, 100, cfg);
  const auto fit = tnfit::fit(tnfit::compute_moments(data), iv);
  const auto g = tnfit::grid_mle_oracle(data, iv, {-3.5, 4.5}, {-1.7, 3.3}, 121);
  EXPECT_NEAR(g.alpha, fit.model.alpha(), 1e-3);
  EXPECT_NEAR(g.psi, fit.model.psi(), 1e-3);
  EXPECT_GE(fit.log_likelihood, g.loglik - 1e-6);
}

TEST(GridOracle, CoarseAndFineGridsAgree) {
  const Interval iv{-1.0, 3.0};
  SamplerConfig cfg;
  cfg.seed = 5;
  const auto data = tnfit::sample({-0.5, 0.6, iv}, 80, cfg);
  const Interval ar{-4.0, 4.0}, pr{-2.0, 3.0};
  const auto coarse = tnfit::grid_mle_oracle(data, iv, ar, pr, 11);
  const auto fine = tnfit::grid_mle_oracle(data, iv, ar, pr, 101);
  EXPECT_NEAR(coarse.alpha, fine.alpha, ar.width() / 10);
  EXPECT_NEAR(coarse.psi, fine.psi, pr.width() / 10);
}
